#include "geofence/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace geofence {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument(path + ": " + what);
}

// Reads keys out of one JSON object and rejects any it did not consume.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(key_path(key), "has the wrong type");
        }
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        return Section(j_.at(key), key_path(key));
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(key_path(k), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

PhaseMode parse_phase(const std::string& s, const std::string& path) {
    if (s == "staggered") return PhaseMode::Staggered;
    if (s == "aligned") return PhaseMode::Aligned;
    fail(path, "expected \"staggered\" or \"aligned\"");
}

ArrivalMode parse_arrival_mode(const std::string& s, const std::string& path) {
    if (s == "profile") return ArrivalMode::Profile;
    if (s == "sequential") return ArrivalMode::Sequential;
    if (s == "scripted") return ArrivalMode::Scripted;
    fail(path, "expected \"profile\", \"sequential\" or \"scripted\"");
}

const char* arrival_mode_name(ArrivalMode m) {
    switch (m) {
        case ArrivalMode::Profile: return "profile";
        case ArrivalMode::Sequential: return "sequential";
        case ArrivalMode::Scripted: return "scripted";
    }
    return "profile";
}

std::vector<PolicyKind> parse_policies(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "must be an array");
    std::vector<PolicyKind> out;
    for (const auto& e : j) {
        if (!e.is_string()) fail(path, "entries must be strings");
        try {
            out.push_back(parse_policy(e.get<std::string>()));
        } catch (const std::invalid_argument& ex) {
            fail(path, ex.what());
        }
    }
    return out;
}

Vec2 parse_point(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string resolve(const std::string& file, const std::filesystem::path& base_dir) {
    if (file.empty()) return file;
    std::filesystem::path p(file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.string();
}

}  // namespace

PolicyKind parse_policy(const std::string& name) {
    if (name == "grid") return PolicyKind::Grid;
    if (name == "rl") return PolicyKind::Rl;
    throw std::invalid_argument("unknown policy \"" + name + "\" (expected grid or rl)");
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    SimConfig& s = cfg.sim;
    Section top(j, "");

    if (!top.has("seed")) fail("seed", "is required");
    top.get("seed", s.seed);
    cfg.sweep.seed_root = s.seed;
    cfg.nmin.seed_root = s.seed;

    if (top.has("layout")) {
        Section sec = top.child("layout");
        sec.get("protected_half_width", s.layout.protected_half_width);
        sec.get("outer_half_width", s.layout.outer_half_width);
        if (sec.has("center")) s.layout.center = parse_point(sec.raw("center"), sec.key_path("center"));
        sec.finish();
    }
    if (top.has("arrivals")) {
        Section sec = top.child("arrivals");
        sec.get("day_rate", s.arrivals.day_rate);
        sec.get("night_rate", s.arrivals.night_rate);
        sec.get("day_start_hour", s.arrivals.day_start_hour);
        sec.get("day_end_hour", s.arrivals.day_end_hour);
        sec.get("clock_origin_hour", s.arrivals.clock_origin_hour);
        if (sec.has("mode")) {
            s.arrival_mode = parse_arrival_mode(sec.raw("mode").is_string() ? sec.raw("mode").get<std::string>() : "",
                                                sec.key_path("mode"));
        }
        sec.get("trajectories", s.trajectories);
        sec.get("warmup_ttis", s.warmup_ttis);
        sec.get("intruder_speed", s.intruder_speed);
        sec.finish();
    }
    if (top.has("energy")) {
        Section sec = top.child("energy");
        sec.get("c_max", s.energy.c_max);
        sec.get("p_b", s.energy.p_b);
        sec.get("lambda", s.energy.lambda);
        sec.get("p_tx", s.energy.p_tx);
        sec.get("p_wur", s.energy.p_wur);
        sec.get("p_rot_bin", s.energy.p_rot_bin);
        sec.get("p_sense", s.energy.p_sense);
        sec.get("harvest_period_ttis", s.energy.harvest_period_ttis);
        sec.get("initial_level_fraction", s.initial_level_fraction);
        sec.finish();
    }
    if (top.has("optics")) {
        Section sec = top.child("optics");
        sec.get("fov", s.optics.fov);
        sec.get("r_max", s.optics.r_max);
        sec.get("eta", s.optics.eta);
        sec.get("p_th", s.p_th);
        sec.finish();
    }
    top.get("n_devices", s.n_devices);
    if (top.has("policy")) {
        std::string name;
        top.get("policy", name);
        try {
            s.policy = parse_policy(name);
        } catch (const std::invalid_argument& e) {
            fail("policy", e.what());
        }
    }
    top.get("tau", s.tau);
    if (top.has("phase_mode")) {
        std::string name;
        top.get("phase_mode", name);
        s.phase_mode = parse_phase(name, "phase_mode");
    }
    top.get("tti_duration_s", s.tti_duration_s);
    top.get("horizon_ttis", s.horizon_ttis);
    if (top.has("weights")) {
        Section sec = top.child("weights");
        sec.get("mu1", s.weights.mu1);
        sec.get("mu2", s.weights.mu2);
        sec.get("mu3", s.weights.mu3);
        sec.finish();
    }
    if (top.has("rl")) {
        Section sec = top.child("rl");
        sec.get("epsilon", s.rl.epsilon);
        sec.get("alpha_lr", s.rl.alpha_lr);
        sec.get("gamma", s.rl.gamma);
        sec.get("training_episodes", s.rl.training_episodes);
        sec.get("eval_epsilon", s.rl.eval_epsilon);
        sec.get("k_rot", s.k_rot);
        sec.finish();
    }
    if (top.has("fgs")) {
        Section sec = top.child("fgs");
        sec.get("status_report_period_ttis", s.status_report_period_ttis);
        sec.get("wakeup_horizon_ttis", s.wakeup_horizon_ttis);
        sec.get("wakeup_sample_every_ttis", s.wakeup_sample_every_ttis);
        sec.get("wakeup_max_per_event", s.wakeup_max_per_event);
        sec.get("wake_window_ttis", s.wake_window_ttis);
        sec.get("grid_wakeups", s.grid_wakeups);
        sec.get("report_sightings", s.report_sightings);
        sec.get("sighting_repeat_ttis", s.sighting_repeat_ttis);
        sec.get("suppress_after_fusion", s.suppress_after_fusion);
        sec.finish();
    }
    top.get("coverage_samples", s.coverage_samples);
    top.get("snapshot_hours", s.snapshot_hours);
    top.get("record_events", s.record_events);
    top.get("qtable_file", cfg.qtable_file);
    top.get("placement_file", cfg.placement_file);
    cfg.qtable_file = resolve(cfg.qtable_file, base_dir);
    cfg.placement_file = resolve(cfg.placement_file, base_dir);

    if (top.has("sweep")) {
        Section sec = top.child("sweep");
        sec.get("n_values", cfg.sweep.n_values);
        sec.get("tau_values", cfg.sweep.tau_values);
        sec.get("trials", cfg.sweep.trials);
        if (sec.has("policies")) cfg.sweep.policies = parse_policies(sec.raw("policies"), sec.key_path("policies"));
        sec.get("seed_root", cfg.sweep.seed_root);
        sec.finish();
    }
    if (top.has("nmin")) {
        Section sec = top.child("nmin");
        sec.get("candidates", cfg.nmin.candidates);
        sec.get("taus", cfg.nmin_taus);
        sec.get("target", cfg.nmin.target);
        sec.get("trials", cfg.nmin.trials);
        if (sec.has("policies")) cfg.nmin_policies = parse_policies(sec.raw("policies"), sec.key_path("policies"));
        sec.get("seed_root", cfg.nmin.seed_root);
        sec.finish();
    }
    if (top.has("placement_search")) {
        Section sec = top.child("placement_search");
        sec.get("slot_spacing", cfg.placement_search.slot_spacing);
        sec.get("budget", cfg.placement_search.budget);
        sec.get("rollouts", cfg.placement_search.rollouts);
        sec.get("epsilon", cfg.placement_search.epsilon);
        sec.finish();
    }
    cfg.placement_search.seed = s.seed;
    if (top.has("execution")) {
        Section sec = top.child("execution");
        sec.get("workers", cfg.exec.workers);
        sec.get("max_devices", cfg.exec.max_devices);
        sec.finish();
    }
    top.finish();

    s.validate();
    cfg.sweep.base = s;
    cfg.nmin.base = s;
    cfg.sweep.validate();
    cfg.placement_search.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

ordered_json to_json(const ExperimentConfig& cfg) {
    const SimConfig& s = cfg.sim;
    auto policy_list = [](const std::vector<PolicyKind>& ps) {
        ordered_json a = ordered_json::array();
        for (auto p : ps) a.push_back(to_string(p));
        return a;
    };
    ordered_json j;
    j["seed"] = s.seed;
    j["layout"] = {{"protected_half_width", s.layout.protected_half_width},
                   {"outer_half_width", s.layout.outer_half_width},
                   {"center", {s.layout.center.x, s.layout.center.y}}};
    j["arrivals"] = {{"day_rate", s.arrivals.day_rate},
                     {"night_rate", s.arrivals.night_rate},
                     {"day_start_hour", s.arrivals.day_start_hour},
                     {"day_end_hour", s.arrivals.day_end_hour},
                     {"clock_origin_hour", s.arrivals.clock_origin_hour},
                     {"mode", arrival_mode_name(s.arrival_mode)},
                     {"trajectories", s.trajectories},
                     {"warmup_ttis", s.warmup_ttis},
                     {"intruder_speed", s.intruder_speed}};
    j["energy"] = {{"c_max", s.energy.c_max},
                   {"p_b", s.energy.p_b},
                   {"lambda", s.energy.lambda},
                   {"p_tx", s.energy.p_tx},
                   {"p_wur", s.energy.p_wur},
                   {"p_rot_bin", s.energy.p_rot_bin},
                   {"p_sense", s.energy.p_sense},
                   {"harvest_period_ttis", s.energy.harvest_period_ttis},
                   {"initial_level_fraction", s.initial_level_fraction}};
    j["optics"] = {{"fov", s.optics.fov}, {"r_max", s.optics.r_max}, {"eta", s.optics.eta}, {"p_th", s.p_th}};
    j["n_devices"] = s.n_devices;
    j["policy"] = to_string(s.policy);
    j["tau"] = s.tau;
    j["phase_mode"] = s.phase_mode == PhaseMode::Staggered ? "staggered" : "aligned";
    j["tti_duration_s"] = s.tti_duration_s;
    j["horizon_ttis"] = s.horizon_ttis;
    j["weights"] = {{"mu1", s.weights.mu1}, {"mu2", s.weights.mu2}, {"mu3", s.weights.mu3}};
    j["rl"] = {{"epsilon", s.rl.epsilon},
               {"alpha_lr", s.rl.alpha_lr},
               {"gamma", s.rl.gamma},
               {"training_episodes", s.rl.training_episodes},
               {"eval_epsilon", s.rl.eval_epsilon},
               {"k_rot", s.k_rot}};
    j["fgs"] = {{"status_report_period_ttis", s.status_report_period_ttis},
                {"wakeup_horizon_ttis", s.wakeup_horizon_ttis},
                {"wakeup_sample_every_ttis", s.wakeup_sample_every_ttis},
                {"wakeup_max_per_event", s.wakeup_max_per_event},
                {"wake_window_ttis", s.wake_window_ttis},
                {"grid_wakeups", s.grid_wakeups},
                {"report_sightings", s.report_sightings},
                {"sighting_repeat_ttis", s.sighting_repeat_ttis},
                {"suppress_after_fusion", s.suppress_after_fusion}};
    j["coverage_samples"] = s.coverage_samples;
    j["snapshot_hours"] = s.snapshot_hours;
    j["record_events"] = s.record_events;
    if (!cfg.qtable_file.empty()) j["qtable_file"] = cfg.qtable_file;
    if (!cfg.placement_file.empty()) j["placement_file"] = cfg.placement_file;
    j["sweep"] = {{"n_values", cfg.sweep.n_values},
                  {"tau_values", cfg.sweep.tau_values},
                  {"trials", cfg.sweep.trials},
                  {"policies", policy_list(cfg.sweep.policies)},
                  {"seed_root", cfg.sweep.seed_root}};
    j["nmin"] = {{"candidates", cfg.nmin.candidates},
                 {"taus", cfg.nmin_taus},
                 {"target", cfg.nmin.target},
                 {"trials", cfg.nmin.trials},
                 {"policies", policy_list(cfg.nmin_policies)},
                 {"seed_root", cfg.nmin.seed_root}};
    j["placement_search"] = {{"slot_spacing", cfg.placement_search.slot_spacing},
                             {"budget", cfg.placement_search.budget},
                             {"rollouts", cfg.placement_search.rollouts},
                             {"epsilon", cfg.placement_search.epsilon}};
    j["execution"] = {{"workers", cfg.exec.workers}, {"max_devices", cfg.exec.max_devices}};
    return j;
}

}  // namespace geofence
