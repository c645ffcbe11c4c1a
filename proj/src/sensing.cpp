#include "geofence/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace geofence {

double normalize_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a < 0.0) a += 360.0;
    // fmod of a tiny negative value can round up to exactly 360.
    if (a >= 360.0) a = 0.0;
    return a;
}

void SensorPose::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("sensor pose: " + what); };
    if (!std::isfinite(position.x) || !std::isfinite(position.y)) fail("position must be finite");
    if (!(fov > 0.0 && fov <= 360.0)) fail("fov must lie in (0, 360]");
    if (!(r_max > 0.0)) fail("r_max must be positive");
    if (!(eta >= 0.0)) fail("eta must be non-negative");
    if (!std::isfinite(theta_min)) fail("theta_min must be finite");
}

PolarOffset to_polar(const SensorPose& sensor, Vec2 target) {
    const Vec2 d = target - sensor.position;
    const double r = d.norm();
    if (r == 0.0) return {0.0, 0.0};
    return {r, normalize_deg(std::atan2(d.y, d.x) * 180.0 / std::numbers::pi)};
}

int angular_mask(const SensorPose& pose, double theta_o) {
    if (pose.fov >= 360.0) return 1;
    const double offset = normalize_deg(theta_o - pose.theta_min);
    return offset <= pose.fov ? 1 : 0;
}

double range_decay(double r, double eta, double r_max) {
    if (r < 0.0 || r > r_max) return 0.0;
    return std::exp(-eta * r);
}

double sensing_power(const SensorPose& pose, Vec2 target) {
    const double dx = target.x - pose.position.x;
    const double dy = target.y - pose.position.y;
    if (dx * dx + dy * dy > pose.r_max * pose.r_max * (1.0 + 1e-12)) return 0.0;
    const PolarOffset polar = to_polar(pose, target);
    if (!angular_mask(pose, polar.theta)) return 0.0;
    return range_decay(polar.r, pose.eta, pose.r_max);
}

double trajectory_confidence(const SensorPose& pose, std::span<const Vec2> positions) {
    double best = 0.0;
    for (const Vec2& p : positions) best = std::max(best, sensing_power(pose, p));
    return best;
}

RotatedPose rotate_pose(const SensorPose& pose, int steps) {
    RotatedPose out{pose, std::abs(steps)};
    if (steps != 0) out.pose.theta_min = normalize_deg(pose.theta_min + steps * kRotationStepDeg);
    return out;
}

}  // namespace geofence
