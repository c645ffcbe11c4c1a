#include "geofence/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace geofence {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kSecondsPerHour = 3600.0;
// Minimum length of the exit leg's passage through the protected square.
constexpr double kMinInteriorChord = 0.01;

bool inside_square(Vec2 center, double a, Vec2 p) {
    return std::abs(p.x - center.x) <= a + kBoundaryTol && std::abs(p.y - center.y) <= a + kBoundaryTol;
}

// Parameter interval [t0, t1] of segment p + t*(q - p), t in [0, 1], inside the
// closed square. Empty when t0 > t1.
std::pair<double, double> clip_segment(Vec2 center, double a, Vec2 p, Vec2 q) {
    double t0 = 0.0;
    double t1 = 1.0;
    const Vec2 d = q - p;
    const double lo[2] = {center.x - a, center.y - a};
    const double hi[2] = {center.x + a, center.y + a};
    const double start[2] = {p.x, p.y};
    const double dir[2] = {d.x, d.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dir[axis]) < 1e-15) {
            if (start[axis] < lo[axis] - kBoundaryTol || start[axis] > hi[axis] + kBoundaryTol) return {1.0, 0.0};
            continue;
        }
        double ta = (lo[axis] - start[axis]) / dir[axis];
        double tb = (hi[axis] - start[axis]) / dir[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return {t0, t1};
}

}  // namespace

void GeofenceLayout::validate() const {
    if (!(protected_half_width > 0.0))
        throw std::invalid_argument("layout.protected_half_width: must be positive");
    if (!(outer_half_width > protected_half_width))
        throw std::invalid_argument("layout.outer_half_width: must exceed protected_half_width");
    if (!std::isfinite(center.x) || !std::isfinite(center.y))
        throw std::invalid_argument("layout.center: must be finite");
}

bool GeofenceLayout::inside_protected(Vec2 p) const { return inside_square(center, protected_half_width, p); }

bool GeofenceLayout::inside_outer(Vec2 p) const { return inside_square(center, outer_half_width, p); }

Vec2 square_perimeter_point(Vec2 center, double a, double s) {
    const double per = 8.0 * a;
    s = std::fmod(s, per);
    if (s < 0.0) s += per;
    Vec2 local;
    if (s < a) {
        local = {s, -a};
    } else if (s < 3.0 * a) {
        local = {a, -a + (s - a)};
    } else if (s < 5.0 * a) {
        local = {a - (s - 3.0 * a), a};
    } else if (s < 7.0 * a) {
        local = {-a, a - (s - 5.0 * a)};
    } else {
        local = {-a + (s - 7.0 * a), -a};
    }
    return center + local;
}

double square_perimeter_normal_deg(double a, double s) {
    const double per = 8.0 * a;
    s = std::fmod(s, per);
    if (s < 0.0) s += per;
    const double tol = 1e-9 * std::max(1.0, a);
    const double corners[4] = {a, 3.0 * a, 5.0 * a, 7.0 * a};
    const double diagonal[4] = {315.0, 45.0, 135.0, 225.0};
    for (int i = 0; i < 4; ++i)
        if (std::abs(s - corners[i]) <= tol) return diagonal[i];
    if (s < a || s > 7.0 * a) return 270.0;
    if (s < 3.0 * a) return 0.0;
    if (s < 5.0 * a) return 90.0;
    return 180.0;
}

void ArrivalProfile::validate() const {
    if (!(day_rate >= 0.0)) throw std::invalid_argument("arrivals.day_rate: must be non-negative");
    if (!(night_rate >= 0.0)) throw std::invalid_argument("arrivals.night_rate: must be non-negative");
    if (!(day_start_hour >= 0.0 && day_end_hour <= 24.0 && day_start_hour < day_end_hour))
        throw std::invalid_argument("arrivals.day_start_hour/day_end_hour: need 0 <= start < end <= 24");
    if (!std::isfinite(clock_origin_hour))
        throw std::invalid_argument("arrivals.clock_origin_hour: must be finite");
}

double ArrivalProfile::rate_per_hour(double h) const {
    return (h >= day_start_hour && h < day_end_hour) ? day_rate : night_rate;
}

double ArrivalProfile::mean_arrivals_per_tti(double tti_duration_s) const {
    const double day_hours = day_end_hour - day_start_hour;
    const double per_day = day_rate * day_hours + night_rate * (24.0 - day_hours);
    return per_day / 24.0 / kSecondsPerHour * tti_duration_s;
}

double hour_of_day(const ArrivalProfile& profile, Tti t, double tti_duration_s) {
    double h = std::fmod(profile.clock_origin_hour + static_cast<double>(t) * tti_duration_s / kSecondsPerHour, 24.0);
    if (h < 0.0) h += 24.0;
    return h;
}

std::vector<Tti> sample_arrivals(const ArrivalProfile& profile, Tti horizon, double tti_duration_s, Rng& rng) {
    if (horizon < 0) throw std::invalid_argument("sample_arrivals: horizon must be non-negative");
    if (!(tti_duration_s > 0.0)) throw std::invalid_argument("sample_arrivals: tti_duration must be positive");
    profile.validate();
    const double max_p = std::max(profile.day_rate, profile.night_rate) / kSecondsPerHour * tti_duration_s;
    if (max_p > 0.1)
        throw std::invalid_argument("arrivals: rate * tti_duration exceeds 0.1, thinning approximation invalid");

    auto rate_at = [&](Tti t) { return profile.rate_per_hour(hour_of_day(profile, t, tti_duration_s)); };
    // First TTI after t whose rate differs from rate_at(t), capped at horizon.
    auto stretch_end = [&](Tti t) {
        const double cur = rate_at(t);
        const double h = hour_of_day(profile, t, tti_duration_s);
        double next_hour = 24.0;
        for (double b : {profile.day_start_hour, profile.day_end_hour})
            if (b > h) next_hour = std::min(next_hour, b);
        const double dt_s = (next_hour - h) * kSecondsPerHour;
        Tti c = t + std::max<Tti>(1, static_cast<Tti>(std::ceil(dt_s / tti_duration_s)));
        while (c - 1 > t && rate_at(c - 1) != cur) --c;
        while (c < horizon && rate_at(c) == cur && c - t < (Tti{1} << 40)) ++c;
        return std::min(c, horizon);
    };

    std::vector<Tti> out;
    Tti t = 0;
    while (t < horizon) {
        const Tti end = stretch_end(t);
        const double p = rate_at(t) / kSecondsPerHour * tti_duration_s;
        if (p <= 0.0) {
            t = end;
            continue;
        }
        const std::int64_t gap = rng.geometric(p);
        if (gap < end - t) {
            out.push_back(t + gap);
            t += gap + 1;
        } else {
            t = end;
        }
    }
    return out;
}

IntruderTrajectory spawn_trajectory(const GeofenceLayout& layout, Tti t_spawn, Rng& rng, ObjectId id, double speed) {
    const double a = layout.protected_half_width;
    const double b = layout.outer_half_width;
    IntruderTrajectory traj;
    traj.id = id;
    traj.t_spawn = t_spawn;
    traj.speed = speed;
    traj.entry_point = square_perimeter_point(layout.center, b, rng.uniform(0.0, 8.0 * b));
    for (;;) {
        const Vec2 via = square_perimeter_point(layout.center, a, rng.uniform(0.0, 8.0 * a));
        if (distance(via, traj.entry_point) < 1e-9) continue;
        const auto [t0, t1] = clip_segment(layout.center, a, traj.entry_point, via);
        if (t0 <= t1 && t0 < 1.0 - 1e-9) continue;  // first leg would cut through the protected square
        traj.via_point = via;
        break;
    }
    for (;;) {
        const Vec2 exit = square_perimeter_point(layout.center, b, rng.uniform(0.0, 8.0 * b));
        const double leg = distance(traj.via_point, exit);
        if (leg < 1e-9) continue;
        const auto [t0, t1] = clip_segment(layout.center, a, traj.via_point, exit);
        if (t0 > t1 || (t1 - t0) * leg < kMinInteriorChord) continue;  // must traverse the protected square
        traj.exit_point = exit;
        break;
    }
    return traj;
}

Tti path_steps(const IntruderTrajectory& traj, double tti_duration_s) {
    const double step = traj.speed * tti_duration_s;
    return static_cast<Tti>(std::floor(traj.length() / step + 1e-9));
}

std::optional<Vec2> position_at(const IntruderTrajectory& traj, Tti t, double tti_duration_s) {
    const Tti k = t - traj.t_spawn;
    if (k < 0 || k > path_steps(traj, tti_duration_s)) return std::nullopt;
    const double s = static_cast<double>(k) * (traj.speed * tti_duration_s);
    const double l1 = traj.first_leg();
    if (s <= l1) {
        if (l1 <= 0.0) return traj.entry_point;
        return traj.entry_point + (traj.via_point - traj.entry_point) * (s / l1);
    }
    const double l2 = distance(traj.via_point, traj.exit_point);
    const double u = std::min(1.0, (s - l1) / l2);
    return traj.via_point + (traj.exit_point - traj.via_point) * u;
}

CrossingTimes crossing_times(const IntruderTrajectory& traj, const GeofenceLayout& layout, double tti_duration_s) {
    const Tti steps = path_steps(traj, tti_duration_s);
    CrossingTimes ct;
    ct.t_in = traj.t_spawn;
    ct.t_exit = traj.t_spawn + steps + 1;
    ct.t_g = ct.t_exit;
    for (Tti k = 0; k <= steps; ++k) {
        const auto p = position_at(traj, traj.t_spawn + k, tti_duration_s);
        if (p && layout.inside_protected(*p)) {
            ct.t_g = traj.t_spawn + k;
            break;
        }
    }
    return ct;
}

void write_trajectory_csv(std::ostream& out, std::span<const IntruderTrajectory> trajectories, double tti_duration_s) {
    out << "id,tti,x,y\n";
    char buf[128];
    for (const auto& traj : trajectories) {
        const Tti steps = path_steps(traj, tti_duration_s);
        for (Tti k = 0; k <= steps; ++k) {
            const Vec2 p = *position_at(traj, traj.t_spawn + k, tti_duration_s);
            std::snprintf(buf, sizeof buf, "%llu,%lld,%.9g,%.9g\n", static_cast<unsigned long long>(traj.id),
                          static_cast<long long>(traj.t_spawn + k), p.x, p.y);
            out << buf;
        }
    }
}

}  // namespace geofence
