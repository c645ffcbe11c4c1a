// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's geometry or scoring code.
#ifndef GEOFENCE_TEST_ORACLES_HPP
#define GEOFENCE_TEST_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

struct P {
    double x, y;
};

// Sensing power by rotating the offset into the sector frame instead of
// normalizing absolute bearings.
inline double sensing_power(P sensor, double theta_min_deg, double fov_deg, double r_max, double eta, P target) {
    const double dx = target.x - sensor.x, dy = target.y - sensor.y;
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r > r_max) return 0.0;
    if (fov_deg < 360.0 && r > 0.0) {
        const double c = std::cos(theta_min_deg * std::numbers::pi / 180.0);
        const double s = std::sin(theta_min_deg * std::numbers::pi / 180.0);
        const double lx = c * dx + s * dy, ly = -s * dx + c * dy;
        double ang = std::atan2(ly, lx) * 180.0 / std::numbers::pi;
        if (ang < 0) ang += 360.0;
        if (ang >= 360.0) ang -= 360.0;
        // The arc end at 360 wraps to 0; accept either side of the seam.
        if (ang > fov_deg && 360.0 - ang > 1e-12) return 0.0;
    } else if (fov_deg < 360.0) {
        // r == 0: bearing 0 by convention
        double off = std::fmod(-theta_min_deg, 360.0);
        if (off < 0) off += 360.0;
        if (off > fov_deg) return 0.0;
    }
    return std::exp(-eta * r);
}

// Max over positions sampled every `step` metres along a polyline, computed
// from scratch by walking the legs.
inline std::vector<P> resample_polyline(std::span<const P> pts, double step, std::size_t count) {
    std::vector<P> out;
    out.reserve(count);
    double total = 0.0;
    std::vector<double> lens;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        lens.push_back(std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y));
        total += lens.back();
    }
    for (std::size_t k = 0; k < count; ++k) {
        double s = std::min(total, static_cast<double>(k) * step);
        std::size_t leg = 0;
        while (leg + 1 < lens.size() && s > lens[leg]) {
            s -= lens[leg];
            ++leg;
        }
        const double u = lens[leg] > 0 ? std::min(1.0, s / lens[leg]) : 0.0;
        out.push_back({pts[leg].x + (pts[leg + 1].x - pts[leg].x) * u, pts[leg].y + (pts[leg + 1].y - pts[leg].y) * u});
    }
    return out;
}

// 0 early, 1 late, 2 miss.
inline int outcome_code(std::optional<std::int64_t> t_det, std::int64_t t_g) {
    if (!t_det.has_value()) return 2;
    return *t_det - t_g < 0 ? 0 : 1;
}

inline double object_error(std::optional<std::int64_t> t_det, std::int64_t t_g, double mu1) {
    const double by_code[3] = {0.0, mu1, 1.0};
    return by_code[outcome_code(t_det, t_g)];
}

inline double reward(std::span<const std::uint8_t> delta, double cov, double err, double alpha, double mu2,
                     double mu3) {
    std::size_t on = 0;
    for (auto d : delta) on += d != 0;
    const double idle = 1.0 - static_cast<double>(on) / static_cast<double>(delta.size());
    return idle + mu2 * cov - alpha * mu3 * err;
}

// Point on a centered square perimeter by arc length from the bottom midpoint, counter-clockwise.
inline P square_point(double a, double s) {
    const double per = 8.0 * a;
    s = std::fmod(s, per);
    if (s < 0) s += per;
    const P corners[4] = {{a, -a}, {a, a}, {-a, a}, {-a, -a}};
    P cur{0.0, -a};
    double left = s;
    for (int i = 0; i < 5; ++i) {
        const P target = corners[i % 4];
        const double len = std::hypot(target.x - cur.x, target.y - cur.y);
        if (left <= len) {
            const double u = len > 0 ? left / len : 0.0;
            return {cur.x + (target.x - cur.x) * u, cur.y + (target.y - cur.y) * u};
        }
        left -= len;
        cur = target;
    }
    return cur;
}

}  // namespace oracle

#endif  // GEOFENCE_TEST_ORACLES_HPP
