#include "geofence/placement.hpp"

#include <cmath>
#include <stdexcept>

namespace geofence {

namespace {

constexpr std::uint64_t kStreamProposals = 1;
constexpr std::uint64_t kStreamRollouts = 2;

struct Slot {
    double s = 0.0;  // arc length
    int offset = 0;  // 30 degree steps from outward, 0..11
};

}  // namespace

void PlacementSearchParams::validate() const {
    if (!(slot_spacing > 0.0 && slot_spacing <= 0.5))
        throw std::invalid_argument("placement.slot_spacing: must lie in (0, 0.5]");
    if (budget < 0) throw std::invalid_argument("placement.budget: must be non-negative");
    if (rollouts < 1) throw std::invalid_argument("placement.rollouts: must be >= 1");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("placement.epsilon: must lie in [0, 1]");
}

SensorPose perimeter_pose(const GeofenceLayout& layout, const Optics& optics, double s, int offset) {
    const double a = layout.protected_half_width;
    SensorPose pose;
    pose.position = square_perimeter_point(layout.center, a, s);
    pose.theta_min =
        normalize_deg(square_perimeter_normal_deg(a, s) - optics.fov / 2.0 + offset * kRotationStepDeg);
    pose.fov = optics.fov;
    pose.r_max = optics.r_max;
    pose.eta = optics.eta;
    return pose;
}

double score_placement(const SimConfig& config, const std::vector<SensorPose>& placement, int rollouts,
                       std::uint64_t seed) {
    SimConfig c = config;
    c.policy = PolicyKind::Grid;
    c.placement = placement;
    c.n_devices = static_cast<int>(placement.size());
    c.accumulate_reward = true;
    c.record_events = false;
    double total = 0.0;
    for (int k = 0; k < rollouts; ++k) {
        c.seed = substream_seed(seed, static_cast<std::uint64_t>(k));
        total += run(c).metrics.total_reward;
    }
    return total / rollouts;
}

PlacementSearchResult placement_search(const SimConfig& scenario, const PlacementSearchParams& params) {
    params.validate();
    scenario.validate();
    if (scenario.arrival_mode == ArrivalMode::Profile && scenario.horizon_ttis == 0)
        throw std::invalid_argument("placement: Profile rollouts need horizon_ttis > 0");

    const GeofenceLayout& layout = scenario.layout;
    const double per = layout.protected_perimeter();
    const auto slots = static_cast<long>(std::ceil(per / params.slot_spacing - 1e-9));
    const double step = per / static_cast<double>(slots);

    std::vector<Slot> current;
    const int n = scenario.n_devices;
    for (int k = 0; k < n; ++k) current.push_back({per * k / n, 0});

    auto poses = [&](const std::vector<Slot>& sl) {
        std::vector<SensorPose> out;
        out.reserve(sl.size());
        for (const auto& d : sl) out.push_back(perimeter_pose(layout, scenario.optics, d.s, d.offset));
        return out;
    };

    const std::uint64_t rollout_seed = substream_seed(params.seed, kStreamRollouts);
    Rng rng(substream_seed(params.seed, kStreamProposals));

    PlacementSearchResult result;
    result.placement = grid_placement(n, layout, scenario.optics);
    if (params.budget == 0) {
        result.initial_score = result.best_score = score_placement(scenario, result.placement, params.rollouts,
                                                                   rollout_seed);
        return result;
    }

    double current_score = score_placement(scenario, poses(current), params.rollouts, rollout_seed);
    result.initial_score = result.best_score = current_score;

    for (int b = 0; b < params.budget; ++b) {
        std::vector<Slot> proposal = current;
        Slot& d = proposal[rng.below(static_cast<std::uint64_t>(n))];
        switch (rng.below(4)) {
            case 0:
            case 1: {
                // Neighboring lattice slot; off-lattice starts snap to the adjacent slot.
                const double idx = d.s / step;
                long k = rng.below(2) == 0 ? static_cast<long>(std::ceil(idx - 1e-9)) - 1
                                           : static_cast<long>(std::floor(idx + 1e-9)) + 1;
                k = ((k % slots) + slots) % slots;
                d.s = step * static_cast<double>(k);
                break;
            }
            case 2: d.offset = (d.offset + 1) % 12; break;
            default: d.offset = (d.offset + 11) % 12; break;
        }
        const double score = score_placement(scenario, poses(proposal), params.rollouts, rollout_seed);
        if (score >= current_score || rng.bernoulli(params.epsilon)) {
            current = std::move(proposal);
            current_score = score;
            ++result.accepted;
            if (score > result.best_score) {
                result.best_score = score;
                result.placement = poses(current);
            }
        }
    }
    return result;
}

}  // namespace geofence
