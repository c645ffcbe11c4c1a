#ifndef GEOFENCE_TYPES_HPP
#define GEOFENCE_TYPES_HPP

#include <cmath>
#include <cstdint>

namespace geofence {

/// Discrete simulation tick (transmission time interval) index.
using Tti = std::int64_t;
using DeviceId = std::uint32_t;
using ObjectId = std::uint64_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;

    double norm() const { return std::hypot(x, y); }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

}  // namespace geofence

#endif  // GEOFENCE_TYPES_HPP
