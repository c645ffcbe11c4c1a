#ifndef GEOFENCE_PLACEMENT_HPP
#define GEOFENCE_PLACEMENT_HPP

#include <cstdint>
#include <vector>

#include "geofence/sim.hpp"

namespace geofence {

struct PlacementSearchParams {
    /// Candidate slot spacing along the protected perimeter, meters. Must be <= 0.5.
    double slot_spacing = 0.25;
    /// Number of proposals to score.
    int budget = 200;
    /// Seeded rollouts per score.
    int rollouts = 8;
    /// Probability of accepting a worse proposal.
    double epsilon = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PlacementSearchResult {
    std::vector<SensorPose> placement;
    double initial_score = 0.0;
    double best_score = 0.0;
    int accepted = 0;
};

/// Mean total reward of `config` with the given placement over `rollouts` seeded runs.
double score_placement(const SimConfig& config, const std::vector<SensorPose>& placement, int rollouts,
                       std::uint64_t seed);

/**
 * Offline local search over device placements, starting from the grid
 * placement. Each proposal moves one device to a neighboring perimeter
 * slot or turns its home orientation by 30 degrees. Proposals that do not
 * lower the score are kept; worse ones are kept with probability epsilon.
 * Every proposal is scored on the same rollout seeds.
 *
 * `scenario` supplies the layout, optics, arrivals and horizon of the
 * rollouts. It must describe a finite run (Scripted or Sequential, or
 * horizon_ttis > 0). Rollouts use the grid schedule.
 */
PlacementSearchResult placement_search(const SimConfig& scenario, const PlacementSearchParams& params);

/// Pose of a device at arc length `s`, turned `offset` 30 degree steps counter-clockwise from outward.
SensorPose perimeter_pose(const GeofenceLayout& layout, const Optics& optics, double s, int offset);

}  // namespace geofence

#endif  // GEOFENCE_PLACEMENT_HPP
