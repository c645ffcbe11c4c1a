// Command-line front end: run-one, sweep, nmin, energy-table, place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "geofence/config.hpp"

namespace fs = std::filesystem;
using namespace geofence;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<int> trials;
    std::optional<double> target;
    std::optional<unsigned> parallel;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "Output directory (created if missing)")->required();
    cmd->add_option("--seed", o.seed, "Override the config seed");
    cmd->add_option("--policy", o.policy, "grid or rl")->check(CLI::IsMember({"grid", "rl"}));
    cmd->add_option("--trials", o.trials, "Trials per cell or probe")->check(CLI::PositiveNumber);
    cmd->add_option("--target", o.target, "Reliability target for nmin")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig prepare(const Overrides& o) {
    ExperimentConfig cfg = load_config(o.config);
    if (o.seed) {
        cfg.sim.seed = *o.seed;
        cfg.sweep.seed_root = *o.seed;
        cfg.nmin.seed_root = *o.seed;
        cfg.placement_search.seed = *o.seed;
    }
    if (o.policy) {
        const PolicyKind p = parse_policy(*o.policy);
        cfg.sim.policy = p;
        cfg.sweep.policies = {p};
        cfg.nmin_policies = {p};
    }
    if (o.trials) {
        cfg.sim.trajectories = *o.trials;
        cfg.sweep.trials = *o.trials;
        cfg.nmin.trials = *o.trials;
    }
    if (o.target) cfg.nmin.target = *o.target;
    if (o.parallel) cfg.exec.workers = *o.parallel;
    if (!cfg.placement_file.empty()) {
        std::ifstream in(cfg.placement_file);
        if (!in) throw std::invalid_argument("cannot open placement_file " + cfg.placement_file);
        cfg.sim.placement = load_placement_csv(in, cfg.sim.optics);
        cfg.sim.n_devices = static_cast<int>(cfg.sim.placement.size());
    }
    cfg.sim.validate();
    cfg.sweep.base = cfg.sim;
    cfg.nmin.base = cfg.sim;
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "config.json") << to_json(cfg).dump(2) << '\n';
    return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
}

std::optional<QPolicy> controller_for(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.sim.policy != PolicyKind::Rl) return std::nullopt;
    if (!cfg.qtable_file.empty()) {
        std::ifstream in(cfg.qtable_file);
        if (!in) throw std::invalid_argument("cannot open qtable_file " + cfg.qtable_file);
        return load_qtable(in);
    }
    QPolicy q = train_policy(cfg.sim);
    auto f = open_out(out_dir, "qtable.txt");
    save_qtable(f, q);
    return q;
}

void cmd_run_one(const Overrides& o) {
    ExperimentConfig cfg = prepare(o);
    auto q = controller_for(cfg, o.out);
    const RunResult r = run(cfg.sim, q ? &*q : nullptr, false);
    {
        auto f = open_out(o.out, "metrics.json");
        write_metrics_json(f, r.metrics);
    }
    {
        auto f = open_out(o.out, "trajectories.csv");
        write_trajectory_csv(f, r.trajectories, cfg.sim.tti_duration_s);
    }
    if (cfg.sim.record_events) {
        auto f = open_out(o.out, "events.jsonl");
        write_event_log(f, r.events);
    }
    {
        auto f = open_out(o.out, "device_energy.csv");
        f << "device_id,initial,harvested,tx_report,tx_sighting,tx_status,wur,rotation,sensing,final_level\n";
        char buf[64];
        auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return std::string(buf);
        };
        for (std::size_t i = 0; i < r.device_energy.size(); ++i) {
            const auto& a = r.device_energy[i];
            f << i << ',' << num(a.initial) << ',' << num(a.harvested) << ',' << num(a.tx_report) << ','
              << num(a.tx_sighting) << ',' << num(a.tx_status) << ',' << num(a.wur) << ',' << num(a.rotation) << ','
              << num(a.sensing) << ',' << num(a.final_level) << '\n';
        }
    }
    std::cout << "P_det=" << r.metrics.detection.p_det << " P_early=" << r.metrics.detection.p_early
              << " intruders=" << r.metrics.detection.total << '\n';
}

void cmd_sweep(const Overrides& o) {
    ExperimentConfig cfg = prepare(o);
    const auto rows = sweep(cfg.sweep, cfg.exec);
    auto f = open_out(o.out, "sweep.csv");
    write_sweep_csv(f, rows, cfg.sim.tti_duration_s);
    std::cout << rows.size() << " cells written\n";
}

void cmd_nmin(const Overrides& o) {
    ExperimentConfig cfg = prepare(o);
    std::vector<NminSpec> specs;
    std::vector<NminResult> results;
    std::vector<CellResult> probes;
    for (PolicyKind p : cfg.nmin_policies) {
        for (Tti tau : cfg.nmin_taus) {
            NminSpec s = cfg.nmin;
            s.policy = p;
            s.tau = tau;
            specs.push_back(s);
            results.push_back(find_nmin(s, cfg.exec));
            probes.insert(probes.end(), results.back().probes.begin(), results.back().probes.end());
            std::cout << to_string(p) << " tau=" << tau << " N_min="
                      << (results.back().n_min ? std::to_string(*results.back().n_min) : std::string("absent"))
                      << '\n';
        }
    }
    auto f = open_out(o.out, "nmin.csv");
    write_nmin_csv(f, specs, results, cfg.sim.tti_duration_s);
    auto g = open_out(o.out, "nmin_probes.csv");
    write_sweep_csv(g, probes, cfg.sim.tti_duration_s);
}

void cmd_energy_table(const Overrides& o) {
    ExperimentConfig cfg = prepare(o);
    std::optional<QPolicy> q;
    if (!cfg.qtable_file.empty()) {
        SimConfig rl = cfg.sim;
        rl.policy = PolicyKind::Rl;
        ExperimentConfig tmp = cfg;
        tmp.sim = rl;
        q = controller_for(tmp, o.out);
    }
    const auto rows = energy_table(cfg.sim, q ? &*q : nullptr);
    auto f = open_out(o.out, "energy_table.csv");
    write_energy_table_csv(f, rows);
    write_energy_table_csv(std::cout, rows);
}

void cmd_place(const Overrides& o) {
    ExperimentConfig cfg = prepare(o);
    const auto result = placement_search(cfg.sim, cfg.placement_search);
    auto f = open_out(o.out, "placement.csv");
    save_placement_csv(f, result.placement);
    std::cout << "initial score " << result.initial_score << ", best " << result.best_score << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-aware geofencing simulator"};
    app.require_subcommand(1);
    Overrides o;
    auto* run_one = app.add_subcommand("run-one", "Run one simulation and write its metrics, traces and energy accounts");
    auto* sweep_cmd = app.add_subcommand("sweep", "Detection metrics over an (N, tau) grid");
    auto* nmin_cmd = app.add_subcommand("nmin", "Minimum device count reaching the reliability target");
    auto* energy_cmd = app.add_subcommand("energy-table", "Energy snapshots of matched 24 h grid and RL runs");
    auto* place_cmd = app.add_subcommand("place", "Offline placement search");
    for (auto* c : {run_one, sweep_cmd, nmin_cmd, energy_cmd, place_cmd}) add_common(c, o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_one) cmd_run_one(o);
        else if (*sweep_cmd) cmd_sweep(o);
        else if (*nmin_cmd) cmd_nmin(o);
        else if (*energy_cmd) cmd_energy_table(o);
        else if (*place_cmd) cmd_place(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
