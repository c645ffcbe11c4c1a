#ifndef GEOFENCE_FGS_HPP
#define GEOFENCE_FGS_HPP

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geofence/environment.hpp"
#include "geofence/sensing.hpp"
#include "geofence/types.hpp"

namespace geofence {

/// Uplink detection update from one device about one object.
struct DetectionReport {
    DeviceId device_id = 0;
    ObjectId object_id = 0;
    Tti tti = 0;
    double confidence = 0.0;
    Vec2 observed_position;
    std::optional<std::string> class_label;
};

struct TrackEstimate {
    Vec2 last_position;
    Vec2 velocity;  // m/s
    Tti last_tti = 0;
};

struct WakeUpRequest {
    DeviceId device_id = 0;
    Tti issue_tti = 0;
};

bool validate_report(double confidence, double p_th);

/// Earliest TTI among reports with confidence >= p_th, if any.
std::optional<Tti> fuse(std::span<const DetectionReport> reports, double p_th);

struct PredictionParams {
    Vec2 center;                 // single-report fallback aims here
    double nominal_speed = 1.0;  // m/s
    double tti_duration_s = 1e-3;
    double max_speed_factor = 2.0;
};

/**
 * Constant-velocity track from the last two reports with distinct TTIs.
 * Reports sharing a TTI collapse to the one with the higher device id.
 * One distinct report yields nominal speed toward the layout center.
 *
 * Throws std::invalid_argument on an empty report list.
 */
TrackEstimate predict(std::span<const DetectionReport> reports, const PredictionParams& params);

/// View of one device as the Controller sees it when choosing wake-ups.
struct DeviceView {
    DeviceId id = 0;
    SensorPose pose;
    bool sleeping = true;
    bool available = true;
};

struct WakeupParams {
    Tti horizon_ttis = 2000;
    Tti sample_every_ttis = 50;
    double p_th = 0.0;
    double tti_duration_s = 1e-3;
    std::size_t max_per_event = 0;  // 0 = unlimited
};

/**
 * Sleeping, available devices whose sensing power reaches p_th at some
 * sample of the extrapolated track within the horizon. Ordered by the
 * earliest such sample, then id; truncated to max_per_event when set.
 */
std::vector<DeviceId> select_wakeups(const TrackEstimate& track, std::span<const DeviceView> devices,
                                     const WakeupParams& params);

/// Fraction of `samples` equally spaced protected-perimeter points where some pose reaches p_th.
double coverage_fraction(std::span<const SensorPose> active, const GeofenceLayout& layout, int samples, double p_th);

/// The `samples` perimeter points used by coverage_fraction.
std::vector<Vec2> coverage_points(const GeofenceLayout& layout, int samples);

enum class EventKind { Spawn, Report, Sighting, Detection, Miss, Wakeup, Status };

const char* to_string(EventKind kind);

struct EventRecord {
    Tti tti = 0;
    EventKind kind = EventKind::Report;
    std::optional<DeviceId> device_id;
    std::optional<ObjectId> object_id;
    double value = 0.0;
};

/// One JSON object per line: {"tti","event_kind","device_id","object_id","value"}.
void write_event_log(std::ostream& out, std::span<const EventRecord> events);

}  // namespace geofence

#endif  // GEOFENCE_FGS_HPP
