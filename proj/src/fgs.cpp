#include "geofence/fgs.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace geofence {

bool validate_report(double confidence, double p_th) { return confidence >= p_th; }

std::optional<Tti> fuse(std::span<const DetectionReport> reports, double p_th) {
    std::optional<Tti> first;
    for (const auto& r : reports)
        if (validate_report(r.confidence, p_th) && (!first || r.tti < *first)) first = r.tti;
    return first;
}

TrackEstimate predict(std::span<const DetectionReport> reports, const PredictionParams& params) {
    if (reports.empty()) throw std::invalid_argument("predict: at least one report is required");

    std::vector<const DetectionReport*> ordered;
    ordered.reserve(reports.size());
    for (const auto& r : reports) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        return a->tti != b->tti ? a->tti < b->tti : a->device_id < b->device_id;
    });
    // Within a shared TTI the later (higher) device id wins.
    std::vector<const DetectionReport*> distinct;
    for (const auto* r : ordered) {
        if (!distinct.empty() && distinct.back()->tti == r->tti)
            distinct.back() = r;
        else
            distinct.push_back(r);
    }

    const DetectionReport& last = *distinct.back();
    TrackEstimate track{last.observed_position, {}, last.tti};
    if (distinct.size() >= 2) {
        const DetectionReport& prev = *distinct[distinct.size() - 2];
        const double dt = static_cast<double>(last.tti - prev.tti) * params.tti_duration_s;
        track.velocity = (last.observed_position - prev.observed_position) * (1.0 / dt);
    } else {
        const Vec2 to_center = params.center - last.observed_position;
        const double d = to_center.norm();
        if (d > 0.0) track.velocity = to_center * (params.nominal_speed / d);
    }
    const double cap = params.max_speed_factor * params.nominal_speed;
    const double speed = track.velocity.norm();
    if (speed > cap) track.velocity = track.velocity * (cap / speed);
    return track;
}

std::vector<DeviceId> select_wakeups(const TrackEstimate& track, std::span<const DeviceView> devices,
                                     const WakeupParams& params) {
    const Tti every = std::max<Tti>(1, params.sample_every_ttis);
    std::vector<Vec2> samples;
    for (Tti k = every; k <= params.horizon_ttis; k += every)
        samples.push_back(track.last_position + track.velocity * (static_cast<double>(k) * params.tti_duration_s));

    if (samples.empty()) return {};
    Vec2 lo = samples.front(), hi = samples.front();
    for (const Vec2& s : samples) {
        lo = {std::min(lo.x, s.x), std::min(lo.y, s.y)};
        hi = {std::max(hi.x, s.x), std::max(hi.y, s.y)};
    }

    std::vector<std::pair<std::size_t, DeviceId>> hits;  // (first sample index, id)
    for (const auto& dev : devices) {
        if (!dev.sleeping || !dev.available) continue;
        const double reach = dev.pose.r_max + 1e-9;
        const Vec2 p = dev.pose.position;
        if (p.x < lo.x - reach || p.x > hi.x + reach || p.y < lo.y - reach || p.y > hi.y + reach) continue;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (sensing_power(dev.pose, samples[i]) >= params.p_th) {
                hits.emplace_back(i, dev.id);
                break;
            }
        }
    }
    std::sort(hits.begin(), hits.end());
    if (params.max_per_event > 0 && hits.size() > params.max_per_event) hits.resize(params.max_per_event);
    std::vector<DeviceId> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.push_back(h.second);
    return out;
}

std::vector<Vec2> coverage_points(const GeofenceLayout& layout, int samples) {
    if (samples < 4) throw std::invalid_argument("coverage: sample count must be >= 4");
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    const double per = layout.protected_perimeter();
    for (int i = 0; i < samples; ++i)
        pts.push_back(square_perimeter_point(layout.center, layout.protected_half_width, per * i / samples));
    return pts;
}

double coverage_fraction(std::span<const SensorPose> active, const GeofenceLayout& layout, int samples, double p_th) {
    const auto pts = coverage_points(layout, samples);
    if (active.empty()) return 0.0;
    int covered = 0;
    for (const Vec2& p : pts) {
        for (const auto& pose : active) {
            if (sensing_power(pose, p) >= p_th) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / samples;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Spawn: return "spawn";
        case EventKind::Report: return "report";
        case EventKind::Sighting: return "sighting";
        case EventKind::Detection: return "detection";
        case EventKind::Miss: return "miss";
        case EventKind::Wakeup: return "wakeup";
        case EventKind::Status: return "status";
    }
    return "unknown";
}

void write_event_log(std::ostream& out, std::span<const EventRecord> events) {
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["tti"] = e.tti;
        j["event_kind"] = to_string(e.kind);
        j["device_id"] = e.device_id ? nlohmann::ordered_json(*e.device_id) : nlohmann::ordered_json(nullptr);
        j["object_id"] = e.object_id ? nlohmann::ordered_json(*e.object_id) : nlohmann::ordered_json(nullptr);
        j["value"] = e.value;
        out << j.dump() << '\n';
    }
}

}  // namespace geofence
