#ifndef GEOFENCE_SENSING_HPP
#define GEOFENCE_SENSING_HPP

#include <span>

#include "geofence/types.hpp"

namespace geofence {

/// Reorientation granularity, in degrees. Energy is charged per step.
inline constexpr double kRotationStepDeg = 30.0;

/// Wraps an angle in degrees onto [0, 360).
double normalize_deg(double deg);

struct PolarOffset {
    double r = 0.0;      // meters
    double theta = 0.0;  // degrees, [0, 360)
};

/**
 * Mounting and optics of one directional camera.
 *
 * The sector spans [theta_min, theta_min + fov] counter-clockwise from
 * the +x axis. Confidence decays as exp(-eta * r) up to r_max.
 */
struct SensorPose {
    Vec2 position;
    double theta_min = 0.0;  // degrees
    double fov = 60.0;       // degrees, (0, 360]
    double r_max = 3.0;      // meters
    double eta = 1.0;        // 1/m

    double theta_max() const { return normalize_deg(theta_min + fov); }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

PolarOffset to_polar(const SensorPose& sensor, Vec2 target);

/// 1 iff theta_o lies on the closed arc [theta_min, theta_min + fov].
int angular_mask(const SensorPose& pose, double theta_o);

double range_decay(double r, double eta, double r_max);

double sensing_power(const SensorPose& pose, Vec2 target);

/// Maximum per-sample sensing power over a sampled path. Empty -> 0.
double trajectory_confidence(const SensorPose& pose, std::span<const Vec2> positions);

struct RotatedPose {
    SensorPose pose;
    int step_count = 0;
};

/// Shifts theta_min by steps * 30 degrees; step_count = |steps|.
RotatedPose rotate_pose(const SensorPose& pose, int steps);

}  // namespace geofence

#endif  // GEOFENCE_SENSING_HPP
