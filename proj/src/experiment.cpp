#include "geofence/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

namespace geofence {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Runs body(i) for i in [0, count) on up to `workers` threads. Results must
// be written by index so the outcome is independent of scheduling.
template <typename Body>
void parallel_for(int count, unsigned workers, Body body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1))));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

ProportionInterval wilson_interval(int successes, int trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double ci_halfwidth(int successes, int trials) {
    const auto ci = wilson_interval(successes, trials);
    return (ci.upper - ci.lower) / 2.0;
}

std::uint64_t trial_seed(std::uint64_t root, PolicyKind policy, int n, Tti tau, std::uint32_t trial) {
    if (n < 0 || n >= (1 << 23)) throw std::invalid_argument("trial_seed: N out of range");
    if (tau < 0 || tau >= (1 << 20)) throw std::invalid_argument("trial_seed: tau out of range");
    if (trial > kMaxTrials) throw std::invalid_argument("trial_seed: trial index out of range");
    const std::uint64_t packed = (policy == PolicyKind::Rl ? 1ULL : 0ULL) | (static_cast<std::uint64_t>(n) << 1) |
                                 (static_cast<std::uint64_t>(tau) << 24) | (static_cast<std::uint64_t>(trial) << 44);
    return mix64(packed ^ mix64(root));
}

CellResult evaluate_cell(const SimConfig& base, PolicyKind policy, int n, Tti tau, int trials, std::uint64_t root,
                         const ExecutionOptions& exec) {
    CellResult cell;
    cell.policy = policy;
    cell.n = n;
    cell.tau = tau;
    cell.trials = trials;
    if (trials < 1 || static_cast<std::uint32_t>(trials) > kMaxTrials - 1)
        throw std::invalid_argument("trials: must lie in [1, 2^20 - 2]");
    if (n > exec.max_devices) {
        cell.status = "infeasible";
        return cell;
    }

    SimConfig cfg = base;
    cfg.policy = policy;
    cfg.n_devices = n;
    cfg.tau = tau;
    cfg.placement.clear();
    cfg.arrival_mode = ArrivalMode::Sequential;
    cfg.trajectories = 1;
    cfg.horizon_ttis = 0;
    cfg.record_events = false;

    QPolicy controller;
    if (policy == PolicyKind::Rl) {
        SimConfig train = cfg;
        train.seed = trial_seed(root, policy, n, tau, kTrainingTrial);
        controller = train_policy(train);
    }

    std::vector<ObjectOutcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for(trials, exec.workers, [&](int i) {
        SimConfig c = cfg;
        c.seed = trial_seed(root, policy, n, tau, static_cast<std::uint32_t>(i));
        QPolicy local = controller;  // read-only use, but each run owns its copy
        const RunResult r = run(c, policy == PolicyKind::Rl ? &local : nullptr, false);
        outcomes[static_cast<std::size_t>(i)] = r.metrics.outcomes.at(0);
    });

    const DetectionMetrics m = metrics(outcomes, cfg.tti_duration_s);
    cell.detected = m.detected;
    cell.early = m.early;
    cell.p_det = m.p_det;
    cell.p_early = m.p_early;
    cell.mean_t_det_s = m.mean_t_det_s;
    cell.ci_halfwidth = ci_halfwidth(m.detected, trials);
    return cell;
}

void SweepSpec::validate() const {
    if (n_values.empty()) throw std::invalid_argument("sweep.n_values: must not be empty");
    if (tau_values.empty()) throw std::invalid_argument("sweep.tau_values: must not be empty");
    if (policies.empty()) throw std::invalid_argument("sweep.policies: must not be empty");
    if (trials < 1) throw std::invalid_argument("sweep.trials: must be >= 1");
    for (int n : n_values)
        if (n < 1) throw std::invalid_argument("sweep.n_values: entries must be >= 1");
    for (Tti t : tau_values)
        if (t < 1) throw std::invalid_argument("sweep.tau_values: entries must be >= 1");
}

std::vector<CellResult> sweep(const SweepSpec& spec, const ExecutionOptions& exec) {
    spec.validate();
    auto policies = spec.policies;
    std::sort(policies.begin(), policies.end());
    policies.erase(std::unique(policies.begin(), policies.end()), policies.end());
    auto ns = spec.n_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    auto taus = spec.tau_values;
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    std::vector<CellResult> rows;
    for (PolicyKind p : policies)
        for (int n : ns)
            for (Tti tau : taus) rows.push_back(evaluate_cell(spec.base, p, n, tau, spec.trials, spec.seed_root, exec));
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const CellResult> rows, double tti_duration_s) {
    out << "policy,N,tau_ms,trials,P_det,P_early,mean_T_det_s,ci_halfwidth,status\n";
    for (const auto& r : rows) {
        out << to_string(r.policy) << ',' << r.n << ',' << fmt(static_cast<double>(r.tau) * tti_duration_s * 1e3)
            << ',' << r.trials << ',';
        if (r.status == "ok") {
            out << fmt(r.p_det) << ',' << fmt(r.p_early) << ','
                << (r.mean_t_det_s ? fmt(*r.mean_t_det_s) : std::string()) << ',' << fmt(r.ci_halfwidth);
        } else {
            out << ",,,";
        }
        out << ',' << r.status << '\n';
    }
}

void NminSpec::validate() const {
    if (candidates.empty()) throw std::invalid_argument("nmin.candidates: must not be empty");
    for (int n : candidates)
        if (n < 1) throw std::invalid_argument("nmin.candidates: entries must be >= 1");
    if (tau < 1) throw std::invalid_argument("nmin.tau: must be >= 1");
    if (!(target >= 0.0 && target < 1.0)) throw std::invalid_argument("nmin.target: must lie in [0, 1)");
    if (trials < 10.0 / (1.0 - target))
        throw std::invalid_argument("nmin.trials: need at least 10 / (1 - target) trials per probe");
}

NminResult find_nmin(const NminSpec& spec, const ExecutionOptions& exec) {
    spec.validate();
    auto cands = spec.candidates;
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    NminResult result;
    std::map<std::size_t, bool> verdict;
    auto probe = [&](std::size_t i) {
        if (auto it = verdict.find(i); it != verdict.end()) return it->second;
        const CellResult cell =
            evaluate_cell(spec.base, spec.policy, cands[i], spec.tau, spec.trials, spec.seed_root, exec);
        const bool ok = cell.status == "ok" && wilson_interval(cell.detected, cell.trials).lower >= spec.target;
        result.probes.push_back(cell);
        verdict[i] = ok;
        return ok;
    };

    // Ramp over indices 0, 1, 3, 7, ... until a probe passes.
    std::optional<std::size_t> fail_below;
    std::optional<std::size_t> pass_at;
    for (std::size_t step = 1, i = 0;; step *= 2) {
        if (probe(i)) {
            pass_at = i;
            break;
        }
        fail_below = i;
        if (i == cands.size() - 1) break;
        i = std::min(cands.size() - 1, i + step);
    }
    if (!pass_at) return result;

    std::size_t lo = fail_below ? *fail_below + 1 : 0;
    std::size_t hi = *pass_at;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (probe(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    result.n_min = cands[hi];
    return result;
}

void write_nmin_csv(std::ostream& out, std::span<const NminSpec> specs, std::span<const NminResult> results,
                    double tti_duration_s) {
    out << "policy,tau_ms,target,trials,N_min\n";
    for (std::size_t i = 0; i < specs.size() && i < results.size(); ++i) {
        const auto& s = specs[i];
        out << to_string(s.policy) << ',' << fmt(static_cast<double>(s.tau) * tti_duration_s * 1e3) << ','
            << fmt(s.target) << ',' << s.trials << ',';
        if (results[i].n_min) out << *results[i].n_min;
        out << '\n';
    }
}

std::vector<EnergyTableRow> energy_table(const SimConfig& base, QPolicy* controller) {
    SimConfig grid = base;
    grid.policy = PolicyKind::Grid;
    SimConfig rl = base;
    rl.policy = PolicyKind::Rl;
    const auto g = run_day(grid);
    const auto r = run_day(rl, controller);
    std::vector<EnergyTableRow> rows;
    for (std::size_t i = 0; i < g.size() && i < r.size(); ++i) rows.push_back({g[i].hour, g[i], r[i]});
    return rows;
}

void write_energy_table_csv(std::ostream& out, std::span<const EnergyTableRow> rows) {
    out << "hour,grid_avg_pct,grid_available,grid_depleted,rl_avg_pct,rl_available,rl_depleted\n";
    for (const auto& row : rows)
        out << fmt(row.hour) << ',' << fmt(row.grid.average_pct) << ',' << row.grid.available << ','
            << row.grid.depleted << ',' << fmt(row.rl.average_pct) << ',' << row.rl.available << ','
            << row.rl.depleted << '\n';
}

}  // namespace geofence
