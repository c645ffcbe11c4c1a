#ifndef GEOFENCE_ENVIRONMENT_HPP
#define GEOFENCE_ENVIRONMENT_HPP

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "geofence/rng.hpp"
#include "geofence/types.hpp"

namespace geofence {

/// Two concentric axis-aligned squares: the protected geofence and the outer zone.
struct GeofenceLayout {
    double protected_half_width = 3.5;
    double outer_half_width = 4.0;
    Vec2 center;

    void validate() const;

    double protected_perimeter() const { return 8.0 * protected_half_width; }

    /// Closed-boundary membership, with a 1e-9 m tolerance.
    bool inside_protected(Vec2 p) const;
    bool inside_outer(Vec2 p) const;
};

/**
 * Point at arc length `s` along the perimeter of a centered square with
 * the given half-width. Arc length starts at the bottom-side midpoint and
 * runs counter-clockwise, so s = 0, 2a, 4a, 6a are the four side midpoints.
 */
Vec2 square_perimeter_point(Vec2 center, double half_width, double s);

/// Outward unit-normal direction, in degrees, at arc length `s` (corners get the diagonal).
double square_perimeter_normal_deg(double half_width, double s);

/// Day/night intruder intensity. Rates in arrivals per hour, times as hour of day.
struct ArrivalProfile {
    double day_rate = 10.0;
    double night_rate = 0.5;
    double day_start_hour = 6.0;
    double day_end_hour = 18.0;
    /// Wall-clock hour of day at TTI 0.
    double clock_origin_hour = 0.0;

    void validate() const;

    double rate_per_hour(double hour_of_day) const;

    /// Mean arrivals per TTI over a full day; the intensity used in the objective and reward.
    double mean_arrivals_per_tti(double tti_duration_s) const;
};

double hour_of_day(const ArrivalProfile& profile, Tti t, double tti_duration_s);

/**
 * Spawn TTIs of a per-TTI Bernoulli-thinned Poisson process.
 *
 * Within each constant-rate stretch the gap to the next arrival is drawn
 * from the geometric law, which is distributionally identical to testing
 * every TTI but costs one draw per arrival.
 *
 * Throws std::invalid_argument if any per-TTI probability exceeds 0.1.
 */
std::vector<Tti> sample_arrivals(const ArrivalProfile& profile, Tti horizon_ttis, double tti_duration_s,
                                 Rng& rng);

struct IntruderTrajectory {
    ObjectId id = 0;
    Tti t_spawn = 0;
    Vec2 entry_point;
    Vec2 via_point;
    Vec2 exit_point;
    double speed = 1.0;  // m/s

    double first_leg() const { return distance(entry_point, via_point); }
    double length() const { return first_leg() + distance(via_point, exit_point); }
};

/**
 * Random straight two-leg path: entry uniform on the outer perimeter, via
 * uniform on the protected perimeter subject to the first leg touching the
 * protected square only at the via point, exit uniform on the outer perimeter.
 */
IntruderTrajectory spawn_trajectory(const GeofenceLayout& layout, Tti t_spawn, Rng& rng, ObjectId id = 0,
                                    double speed = 1.0);

/// Number of whole TTI steps the intruder stays on its path after spawning.
Tti path_steps(const IntruderTrajectory& traj, double tti_duration_s);

std::optional<Vec2> position_at(const IntruderTrajectory& traj, Tti t, double tti_duration_s);

struct CrossingTimes {
    Tti t_in = 0;    // entry into the outer zone
    Tti t_g = 0;     // first TTI on or inside the protected square
    Tti t_exit = 0;  // first TTI with no position
};

CrossingTimes crossing_times(const IntruderTrajectory& traj, const GeofenceLayout& layout, double tti_duration_s);

/// Writes `id,tti,x,y` rows (with header) for every TTI each trajectory is present.
void write_trajectory_csv(std::ostream& out, std::span<const IntruderTrajectory> trajectories,
                          double tti_duration_s);

}  // namespace geofence

#endif  // GEOFENCE_ENVIRONMENT_HPP
