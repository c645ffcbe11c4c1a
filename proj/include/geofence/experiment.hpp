#ifndef GEOFENCE_EXPERIMENT_HPP
#define GEOFENCE_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "geofence/sim.hpp"

namespace geofence {

struct ProportionInterval {
    double lower = 0.0;
    double upper = 1.0;
};

/// Wilson score interval for a binomial proportion (95% by default).
ProportionInterval wilson_interval(int successes, int trials, double z = 1.959963984540054);

/// Half-width of the 95% Wilson interval.
double ci_halfwidth(int successes, int trials);

inline constexpr std::uint32_t kMaxTrials = (1u << 20) - 1;
/// Trial index reserved for the per-cell controller training run.
inline constexpr std::uint32_t kTrainingTrial = kMaxTrials;

/**
 * Seed of one trial. Packs (policy, N, tau, trial) into 64 bits and mixes
 * it with the root through a bijection, so distinct cells never share a
 * seed under one root. Requires N < 2^23, tau < 2^20, trial < 2^20.
 */
std::uint64_t trial_seed(std::uint64_t root, PolicyKind policy, int n, Tti tau, std::uint32_t trial);

struct CellResult {
    PolicyKind policy = PolicyKind::Grid;
    int n = 0;
    Tti tau = 1;
    int trials = 0;
    int detected = 0;
    int early = 0;
    double p_det = 0.0;
    double p_early = 0.0;
    std::optional<double> mean_t_det_s;
    double ci_halfwidth = 0.0;
    std::string status = "ok";
};

struct ExecutionOptions {
    unsigned workers = 1;
    /// Device counts above this are reported as infeasible instead of run.
    int max_devices = 2800;
};

/**
 * `trials` independent single-intruder runs of one (policy, N, tau) cell.
 * RL cells first train a controller with the cell's reserved training seed,
 * then evaluate it frozen.
 */
CellResult evaluate_cell(const SimConfig& base, PolicyKind policy, int n, Tti tau, int trials, std::uint64_t root,
                         const ExecutionOptions& exec = {});

struct SweepSpec {
    std::vector<int> n_values = {4, 8, 16, 32, 64, 128, 256, 512};
    std::vector<Tti> tau_values = {1, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    int trials = 1000;
    std::vector<PolicyKind> policies = {PolicyKind::Grid, PolicyKind::Rl};
    SimConfig base;
    std::uint64_t seed_root = 0;

    void validate() const;
};

/// One row per (policy, N, tau), sorted by policy, then N, then tau.
std::vector<CellResult> sweep(const SweepSpec& spec, const ExecutionOptions& exec = {});

/// Header: policy,N,tau_ms,trials,P_det,P_early,mean_T_det_s,ci_halfwidth,status
void write_sweep_csv(std::ostream& out, std::span<const CellResult> rows, double tti_duration_s);

struct NminSpec {
    std::vector<int> candidates = {4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
    Tti tau = 1;
    double target = 0.99;
    int trials = 1000;
    PolicyKind policy = PolicyKind::Grid;
    SimConfig base;
    std::uint64_t seed_root = 0;

    /// Also rejects trials < 10 / (1 - target).
    void validate() const;
};

struct NminResult {
    std::optional<int> n_min;
    std::vector<CellResult> probes;  // in probe order
};

/**
 * Smallest candidate N whose lower 95% bound on P_det meets the target:
 * doubling ramp over the sorted candidates, then binary search between
 * the last failing and first passing probe. Absent if none qualifies.
 */
NminResult find_nmin(const NminSpec& spec, const ExecutionOptions& exec = {});

/// Header: policy,tau_ms,target,trials,N_min (empty when absent)
void write_nmin_csv(std::ostream& out, std::span<const NminSpec> specs, std::span<const NminResult> results,
                    double tti_duration_s);

struct EnergyTableRow {
    double hour = 0.0;
    EnergySnapshot grid;
    EnergySnapshot rl;
};

/// Matched 24 h runs (same seed) of both policies. RL trains first unless `controller` is given.
std::vector<EnergyTableRow> energy_table(const SimConfig& base, QPolicy* controller = nullptr);

/// Header: hour,grid_avg_pct,grid_available,grid_depleted,rl_avg_pct,rl_available,rl_depleted
void write_energy_table_csv(std::ostream& out, std::span<const EnergyTableRow> rows);

}  // namespace geofence

#endif  // GEOFENCE_EXPERIMENT_HPP
