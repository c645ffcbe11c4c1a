#ifndef GEOFENCE_CONFIG_HPP
#define GEOFENCE_CONFIG_HPP

#include <filesystem>
#include <string>

#include "geofence/experiment.hpp"
#include "geofence/placement.hpp"
#include "json.hpp"

namespace geofence {

/**
 * Everything one config file describes. Sections other than the
 * simulation itself are only read by the matching CLI subcommand.
 */
struct ExperimentConfig {
    SimConfig sim;
    SweepSpec sweep;
    /// find_nmin is run once per (policy, tau) pair.
    std::vector<Tti> nmin_taus = {4, 64, 1024};
    std::vector<PolicyKind> nmin_policies = {PolicyKind::Grid, PolicyKind::Rl};
    NminSpec nmin;
    PlacementSearchParams placement_search;
    ExecutionOptions exec;
    /// Q-table to load for RL runs instead of training.
    std::string qtable_file;
    /// Placement CSV overriding the grid placement.
    std::string placement_file;
};

/**
 * Parses a config object. Unknown keys are errors, `seed` is mandatory and
 * every other key falls back to its default. Relative file paths are
 * resolved against `base_dir`. Throws std::invalid_argument with the key path.
 */
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded config, suitable for parse_config.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

PolicyKind parse_policy(const std::string& name);

}  // namespace geofence

#endif  // GEOFENCE_CONFIG_HPP
