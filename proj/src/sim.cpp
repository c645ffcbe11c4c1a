#include "geofence/sim.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace geofence {

namespace {

constexpr std::uint64_t kStreamArrivals = 1;
constexpr std::uint64_t kStreamTrajectories = 2;
constexpr std::uint64_t kStreamHarvest = 3;
constexpr std::uint64_t kStreamControl = 4;
constexpr std::uint64_t kStreamTraining = 5;
constexpr int kOrientations = 12;

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

const char* to_string(PolicyKind kind) { return kind == PolicyKind::Rl ? "rl" : "grid"; }

void SimConfig::validate() const {
    layout.validate();
    arrivals.validate();
    energy.validate();
    weights.validate();
    require(n_devices >= 1, "n_devices", "must be >= 1");
    require(tau >= 1, "tau", "must be >= 1");
    require(tti_duration_s > 0.0, "tti_duration_s", "must be positive");
    require(p_th > 0.0 && p_th <= 1.0, "p_th", "must lie in (0, 1]");
    require(initial_level_fraction >= 0.0 && initial_level_fraction <= 1.0, "initial_level_fraction",
            "must lie in [0, 1]");
    require(optics.fov > 0.0 && optics.fov <= 360.0, "optics.fov", "must lie in (0, 360]");
    require(optics.r_max > 0.0, "optics.r_max", "must be positive");
    require(optics.eta >= 0.0, "optics.eta", "must be non-negative");
    require(intruder_speed > 0.0, "intruder_speed", "must be positive");
    require(horizon_ttis >= 0, "horizon_ttis", "must be non-negative");
    if (arrival_mode == ArrivalMode::Sequential) require(trajectories >= 1, "trajectories", "must be >= 1");
    require(warmup_ttis >= 0, "warmup_ttis", "must be non-negative");
    if (arrival_mode == ArrivalMode::Scripted) {
        require(!scripted.empty(), "scripted", "must list at least one trajectory");
        for (const auto& t : scripted) require(t.t_spawn >= 0, "scripted.t_spawn", "must be non-negative");
    }
    require(placement.empty() || static_cast<int>(placement.size()) == n_devices, "placement",
            "must hold exactly n_devices poses");
    for (const auto& p : placement) p.validate();
    require(status_report_period_ttis >= 1, "status_report_period_ttis", "must be >= 1");
    require(k_rot >= 0, "k_rot", "must be non-negative");
    require(wakeup_horizon_ttis >= 0, "wakeup_horizon_ttis", "must be non-negative");
    require(wakeup_sample_every_ttis >= 1, "wakeup_sample_every_ttis", "must be >= 1");
    require(wake_window_ttis >= 1, "wake_window_ttis", "must be >= 1");
    require(coverage_samples >= 4, "coverage_samples", "must be >= 4");
    require(rl.epsilon >= 0.0 && rl.epsilon <= 1.0, "rl.epsilon", "must lie in [0, 1]");
    require(rl.eval_epsilon >= 0.0 && rl.eval_epsilon <= 1.0, "rl.eval_epsilon", "must lie in [0, 1]");
    require(rl.alpha_lr >= 0.0 && rl.alpha_lr <= 1.0, "rl.alpha_lr", "must lie in [0, 1]");
    require(rl.gamma >= 0.0 && rl.gamma < 1.0, "rl.gamma", "must lie in [0, 1)");
    require(rl.training_episodes >= 0, "rl.training_episodes", "must be non-negative");
    for (double h : snapshot_hours) require(h >= 0.0 && h < 24.0, "snapshot_hours", "must lie in [0, 24)");
}

std::vector<SensorPose> SimConfig::device_poses() const {
    if (!placement.empty()) return placement;
    return grid_placement(n_devices, layout, optics);
}

Simulation::Simulation(SimConfig config, QPolicy* policy, bool learn)
    : config_(std::move(config)),
      policy_(policy),
      learn_(learn),
      arrival_rng_(substream_seed(config_.seed, kStreamArrivals)),
      trajectory_rng_(substream_seed(config_.seed, kStreamTrajectories)),
      harvest_rng_(substream_seed(config_.seed, kStreamHarvest)),
      control_rng_(substream_seed(config_.seed, kStreamControl)) {
    config_.validate();
    if (config_.policy == PolicyKind::Rl && policy_ == nullptr)
        throw std::invalid_argument("policy: an RL run needs a controller");
    if (policy_) policy_->validate();

    alpha_ = config_.arrivals.mean_arrivals_per_tti(config_.tti_duration_s);
    bins_ = StateBins{config_.p_th, config_.energy.c_max, 1.0};
    grid_ = GridConfig{config_.n_devices, config_.tau, config_.phase_mode};

    const auto poses = config_.device_poses();
    devices_.resize(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        Device& d = devices_[i];
        d.id = static_cast<DeviceId>(i);
        d.home = poses[i];
        d.pose = poses[i];
        d.buffer.level = config_.initial_level_fraction * config_.energy.c_max;
        d.account.initial = d.buffer.level;
        slot_members_[grid_phase(static_cast<int>(i), grid_) % config_.tau].push_back(static_cast<int>(i));
    }

    switch (config_.arrival_mode) {
        case ArrivalMode::Profile:
            pending_spawns_ = sample_arrivals(config_.arrivals, config_.horizon_ttis, config_.tti_duration_s,
                                              arrival_rng_);
            std::reverse(pending_spawns_.begin(), pending_spawns_.end());
            break;
        case ArrivalMode::Sequential:
            next_sequential_spawn_ =
                config_.warmup_ttis + static_cast<Tti>(arrival_rng_.below(static_cast<std::uint64_t>(config_.tau)));
            break;
        case ArrivalMode::Scripted:
            scripted_pending_ = config_.scripted;
            std::stable_sort(scripted_pending_.begin(), scripted_pending_.end(),
                             [](const auto& a, const auto& b) { return a.t_spawn > b.t_spawn; });
            break;
    }

    coverage_points_ = coverage_points(config_.layout, config_.coverage_samples);
    coverage_cache_.resize(devices_.size() * kOrientations);

    for (double h : config_.snapshot_hours) {
        double offset = std::fmod(h - config_.arrivals.clock_origin_hour, 24.0);
        if (offset < 0.0) offset += 24.0;
        snapshot_schedule_.emplace_back(static_cast<Tti>(std::llround(offset * 3600.0 / config_.tti_duration_s)), h);
    }
    std::sort(snapshot_schedule_.begin(), snapshot_schedule_.end());
}

bool Simulation::done() const {
    if (config_.horizon_ttis > 0 || config_.arrival_mode == ArrivalMode::Profile) return tti_ >= config_.horizon_ttis;
    switch (config_.arrival_mode) {
        case ArrivalMode::Profile: return false;
        case ArrivalMode::Sequential: return resolved_ >= config_.trajectories;
        case ArrivalMode::Scripted: return scripted_pending_.empty() && live_.empty();
    }
    return true;
}

void Simulation::log(EventKind kind, std::optional<DeviceId> dev, std::optional<ObjectId> obj, double value) {
    if (config_.record_events) events_.push_back(EventRecord{tti_, kind, dev, obj, value});
}

void Simulation::spawn(const IntruderTrajectory& traj) {
    LiveIntruder o;
    o.traj = traj;
    o.times = crossing_times(traj, config_.layout, config_.tti_duration_s);
    o.running_max.assign(devices_.size(), 0.0);
    o.reported.assign(devices_.size(), 0);
    o.last_sighting.assign(devices_.size(), -1);
    trajectories_.push_back(traj);
    log(EventKind::Spawn, std::nullopt, traj.id, static_cast<double>(o.times.t_g));
    live_.push_back(std::move(o));
    ++spawned_;
}

void Simulation::charge(Device& dev, double cost, double EnergyAccount::*bucket, bool& ok) {
    const auto r = try_consume(dev.buffer, cost);
    ok = r.success;
    if (ok) {
        dev.buffer = r.buffer;
        dev.account.*bucket += cost;
    } else {
        dev.blocked_until_level = cost;
        ++counters_.failed_actions;
    }
}

DeviceState Simulation::observe(const Device& dev) const {
    return DeviceState{dev.mode_delta, dev.pose.theta_min, dev.last_confidence, dev.pose.position, dev.buffer.level};
}

const std::vector<std::uint64_t>& Simulation::coverage_bits(std::size_t index) {
    const Device& dev = devices_[index];
    auto& bits = coverage_cache_[index * kOrientations + static_cast<std::size_t>(dev.rotation_offset)];
    if (bits.empty()) {
        bits.assign((coverage_points_.size() + 63) / 64, 0);
        for (std::size_t k = 0; k < coverage_points_.size(); ++k)
            if (sensing_power(dev.pose, coverage_points_[k]) >= config_.p_th) bits[k / 64] |= std::uint64_t{1} << (k % 64);
    }
    return bits;
}

double Simulation::current_coverage() {
    if (active_.empty()) return 0.0;
    cover_scratch_.assign((coverage_points_.size() + 63) / 64, 0);
    for (int idx : active_) {
        const auto& bits = coverage_bits(static_cast<std::size_t>(idx));
        for (std::size_t w = 0; w < bits.size(); ++w) cover_scratch_[w] |= bits[w];
    }
    int covered = 0;
    for (auto w : cover_scratch_) covered += std::popcount(w);
    return static_cast<double>(covered) / static_cast<double>(coverage_points_.size());
}

void Simulation::take_snapshot(double hour) {
    EnergySnapshot s;
    s.hour = hour;
    s.tti = tti_;
    double sum = 0.0;
    for (const auto& d : devices_) {
        sum += d.buffer.level;
        if (is_available(d.buffer, config_.energy)) ++s.available;
        if (is_depleted(d.buffer)) ++s.depleted;
    }
    s.average_pct = 100.0 * sum / (config_.energy.c_max * static_cast<double>(devices_.size()));
    snapshots_.push_back(s);
}

void Simulation::step() {
    const Tti t = tti_;
    const double dt = config_.tti_duration_s;
    const EnergyParams& ep = config_.energy;

    while (next_snapshot_ < snapshot_schedule_.size() && snapshot_schedule_[next_snapshot_].first <= t) {
        if (snapshot_schedule_[next_snapshot_].first == t) take_snapshot(snapshot_schedule_[next_snapshot_].second);
        ++next_snapshot_;
    }

    // Spawns.
    switch (config_.arrival_mode) {
        case ArrivalMode::Profile:
            while (!pending_spawns_.empty() && pending_spawns_.back() <= t) {
                spawn(spawn_trajectory(config_.layout, t, trajectory_rng_, next_object_id_++, config_.intruder_speed));
                pending_spawns_.pop_back();
            }
            break;
        case ArrivalMode::Sequential:
            if (next_sequential_spawn_ && *next_sequential_spawn_ == t) {
                spawn(spawn_trajectory(config_.layout, t, trajectory_rng_, next_object_id_++, config_.intruder_speed));
                next_sequential_spawn_.reset();
            }
            break;
        case ArrivalMode::Scripted:
            while (!scripted_pending_.empty() && scripted_pending_.back().t_spawn <= t) {
                IntruderTrajectory traj = scripted_pending_.back();
                traj.t_spawn = t;
                spawn(traj);
                scripted_pending_.pop_back();
            }
            break;
    }

    // Intruder motion.
    for (auto& o : live_) {
        const auto pos = position_at(o.traj, t, dt);
        o.present = pos.has_value();
        if (pos) o.position = *pos;
    }

    // Harvest tick. Levels only rise here, so blocked devices are released here too.
    if ((t + 1) % ep.harvest_period_ttis == 0) {
        for (auto& d : devices_) {
            const double before = d.buffer.level;
            d.buffer = harvest_step(d.buffer, ep, harvest_rng_);
            d.account.harvested += d.buffer.level - before;
            if (d.blocked() && d.buffer.level >= d.blocked_until_level) d.blocked_until_level = 0.0;
        }
    }

    // Decisions and action charging.
    for (int idx : active_) devices_[static_cast<std::size_t>(idx)].sensing = false;
    active_.clear();
    decisions_.clear();

    {
        std::size_t keep = 0;
        for (int idx : awake_)
            if (devices_[static_cast<std::size_t>(idx)].wake_until >= t) awake_[keep++] = idx;
        awake_.resize(keep);
    }
    for (int idx : pending_wake_) {
        Device& d = devices_[static_cast<std::size_t>(idx)];
        d.wake_pending = false;
        if (d.blocked()) continue;
        bool ok = false;
        charge(d, ep.p_wur, &EnergyAccount::wur, ok);
        if (!ok) continue;
        if (d.wake_until < t) awake_.push_back(idx);
        d.wake_until = t + config_.wake_window_ttis - 1;
    }
    pending_wake_.clear();

    auto mark_sensing = [&](int idx) {
        Device& d = devices_[static_cast<std::size_t>(idx)];
        if (d.sensing || d.blocked()) return;
        d.sensing = true;
        active_.push_back(idx);
    };

    const auto slot = slot_members_.find(t % config_.tau);
    if (slot != slot_members_.end()) {
        for (int idx : slot->second) {
            Device& d = devices_[static_cast<std::size_t>(idx)];
            if (d.blocked()) continue;
            if (config_.policy == PolicyKind::Grid) {
                d.mode_delta = 1;
                mark_sensing(idx);
                continue;
            }
            const StateKey key = encode_state(observe(d), bins_);
            const double eps = learn_ ? policy_->epsilon : config_.rl.eval_epsilon;
            Action a = (eps > 0.0 && control_rng_.uniform() < eps)
                           ? action_from_index(static_cast<int>(control_rng_.below(kActionCount)))
                           : greedy_action(*policy_, key);
            if (a.rotation != 0 && t - d.last_rotation_tti < config_.k_rot) a.rotation = 0;
            if (a.rotation != 0) {
                bool ok = false;
                charge(d, ep.p_rot_bin * std::abs(a.rotation), &EnergyAccount::rotation, ok);
                if (ok) {
                    d.rotation_offset = ((d.rotation_offset + a.rotation) % kOrientations + kOrientations) % kOrientations;
                    d.pose = rotate_pose(d.home, d.rotation_offset).pose;
                    d.last_rotation_tti = t;
                } else {
                    a.rotation = 0;
                }
            }
            d.mode_delta = a.delta;
            if (a.delta == 1) mark_sensing(idx);
            decisions_.push_back(Decision{idx, key, a});
        }
    }

    for (int idx : awake_) mark_sensing(idx);

    if (ep.p_sense > 0.0) {
        std::size_t keep = 0;
        for (int idx : active_) {
            Device& d = devices_[static_cast<std::size_t>(idx)];
            bool ok = false;
            charge(d, ep.p_sense, &EnergyAccount::sensing, ok);
            if (ok)
                active_[keep++] = idx;
            else
                d.sensing = false;
        }
        active_.resize(keep);
    }
    std::sort(active_.begin(), active_.end());

    // Sensing plus detection and sighting reports.
    const bool sightings = config_.fgs_feedback() && config_.report_sightings;
    std::vector<std::size_t> touched;  // live objects with new reports this TTI
    for (int idx : active_) {
        Device& d = devices_[static_cast<std::size_t>(idx)];
        const auto j = static_cast<std::size_t>(idx);
        d.last_confidence = 0.0;
        for (std::size_t oi = 0; oi < live_.size(); ++oi) {
            LiveIntruder& o = live_[oi];
            if (!o.present) continue;
            const double p = sensing_power(d.pose, o.position);
            if (p <= 0.0) continue;
            d.last_confidence = std::max(d.last_confidence, p);
            o.running_max[j] = std::max(o.running_max[j], p);
            const bool open = !o.t_det || !config_.suppress_after_fusion;
            bool is_report = false;
            if (p >= config_.p_th && !o.reported[j] && open) {
                o.reported[j] = 1;
                is_report = true;
            } else if (sightings && p < config_.p_th && !o.reported[j] && !o.t_det &&
                       (o.last_sighting[j] < 0 ||
                        (config_.sighting_repeat_ttis > 0 && t - o.last_sighting[j] >= config_.sighting_repeat_ttis))) {
                o.last_sighting[j] = t;
            } else {
                continue;
            }
            bool ok = false;
            charge(d, ep.p_tx, is_report ? &EnergyAccount::tx_report : &EnergyAccount::tx_sighting, ok);
            if (!ok) continue;
            o.reports.push_back(DetectionReport{d.id, o.traj.id, t, p, o.position, std::nullopt});
            if (is_report) {
                ++counters_.reports;
                log(EventKind::Report, d.id, o.traj.id, p);
            } else {
                ++counters_.sightings;
                log(EventKind::Sighting, d.id, o.traj.id, p);
            }
            if (touched.empty() || touched.back() != oi) {
                if (std::find(touched.begin(), touched.end(), oi) == touched.end()) touched.push_back(oi);
            }
        }
    }

    // Status reports.
    if ((t + 1) % config_.status_report_period_ttis == 0) {
        for (auto& d : devices_) {
            if (d.blocked()) continue;
            bool ok = false;
            charge(d, ep.p_tx, &EnergyAccount::tx_status, ok);
            if (ok) log(EventKind::Status, d.id, std::nullopt, d.buffer.level);
        }
    }

    // Fusion and wake-ups.
    std::sort(touched.begin(), touched.end());
    for (std::size_t oi : touched) {
        LiveIntruder& o = live_[oi];
        if (o.t_det) continue;
        const auto fused = fuse(o.reports, config_.p_th);
        if (fused) {
            o.t_det = *fused;
            log(EventKind::Detection, std::nullopt, o.traj.id, static_cast<double>(*o.t_det - o.times.t_in) * dt);
            continue;
        }
        if (!config_.fgs_feedback()) continue;
        const TrackEstimate track = predict(o.reports, PredictionParams{config_.layout.center, config_.intruder_speed, dt, 2.0});
        std::vector<DeviceView> views;
        views.reserve(devices_.size());
        for (const auto& d : devices_) {
            const bool sleeping = !d.sensing && !d.wake_pending && d.wake_until <= t;
            views.push_back(DeviceView{d.id, d.pose, sleeping, !d.blocked() && is_available(d.buffer, ep)});
        }
        const WakeupParams wp{config_.wakeup_horizon_ttis, config_.wakeup_sample_every_ttis, config_.p_th, dt,
                              config_.wakeup_max_per_event};
        for (DeviceId id : select_wakeups(track, views, wp)) {
            Device& d = devices_[id];
            d.wake_pending = true;
            pending_wake_.push_back(static_cast<int>(id));
            ++counters_.wakeups;
            log(EventKind::Wakeup, id, o.traj.id, 0.0);
        }
    }

    // Outcome resolution.
    double resolved_error = 0.0;
    {
        std::size_t keep = 0;
        for (std::size_t oi = 0; oi < live_.size(); ++oi) {
            LiveIntruder& o = live_[oi];
            bool remove = false;
            bool resolve = false;
            if (o.t_det && *o.t_det == t) {
                resolve = true;
                remove = config_.suppress_after_fusion;
            } else if (!o.present) {
                remove = true;
                resolve = !o.t_det;
                if (resolve) log(EventKind::Miss, std::nullopt, o.traj.id, 1.0);
            }
            if (resolve) {
                ObjectOutcome out{o.traj.id, o.times.t_in, o.times.t_g, o.times.t_exit, o.t_det,
                                  classify(o.t_det, o.times.t_g)};
                resolved_error += object_error(o.t_det, o.times.t_g, config_.weights);
                outcomes_.push_back(out);
                ++resolved_;
                if (config_.arrival_mode == ArrivalMode::Sequential && spawned_ < config_.trajectories)
                    next_sequential_spawn_ = t + 1 + static_cast<Tti>(
                        arrival_rng_.below(static_cast<std::uint64_t>(config_.tau)));
            }
            if (!remove) {
                if (keep != oi) live_[keep] = std::move(o);
                ++keep;
            }
        }
        live_.resize(keep);
    }

    // Reward and learning.
    if (config_.policy == PolicyKind::Rl || config_.accumulate_reward) {
        const double r = reward(static_cast<int>(active_.size()), config_.n_devices, current_coverage(),
                                resolved_error, alpha_, config_.weights);
        counters_.total_reward += r;
        if (learn_) {
            for (const auto& dec : decisions_) {
                const Device& d = devices_[static_cast<std::size_t>(dec.device)];
                q_update(*policy_, dec.key, dec.action, r, encode_state(observe(d), bins_));
            }
        }
    }

    ++tti_;
}

RunResult Simulation::finish() && {
    while (next_snapshot_ < snapshot_schedule_.size() && snapshot_schedule_[next_snapshot_].first <= tti_) {
        if (snapshot_schedule_[next_snapshot_].first == tti_) take_snapshot(snapshot_schedule_[next_snapshot_].second);
        ++next_snapshot_;
    }

    RunResult r;
    MetricsRecord& m = r.metrics;
    m = counters_;
    m.detection = metrics(outcomes_, config_.tti_duration_s);
    m.ttis_simulated = tti_;
    std::vector<double> errors;
    errors.reserve(outcomes_.size());
    for (const auto& o : outcomes_) errors.push_back(object_error(o.t_det, o.t_g, config_.weights));
    if (tti_ > 0 && alpha_ > 0.0) m.objective = objective(errors, alpha_, tti_);
    m.outcomes = std::move(outcomes_);
    m.snapshots = std::move(snapshots_);

    for (auto& d : devices_) {
        d.account.final_level = d.buffer.level;
        r.device_energy.push_back(d.account);
        EnergyAccount& s = m.energy_total;
        s.initial += d.account.initial;
        s.harvested += d.account.harvested;
        s.tx_report += d.account.tx_report;
        s.tx_sighting += d.account.tx_sighting;
        s.tx_status += d.account.tx_status;
        s.wur += d.account.wur;
        s.rotation += d.account.rotation;
        s.sensing += d.account.sensing;
        s.final_level += d.account.final_level;
    }
    r.events = std::move(events_);
    r.trajectories = std::move(trajectories_);
    return r;
}

RunResult run(const SimConfig& config, QPolicy* policy, bool learn) {
    Simulation sim(config, policy, learn);
    while (!sim.done()) sim.step();
    return std::move(sim).finish();
}

QPolicy train_policy(const SimConfig& config) {
    QPolicy q;
    q.epsilon = config.rl.epsilon;
    q.alpha_lr = config.rl.alpha_lr;
    q.gamma = config.rl.gamma;
    q.validate();
    // Each episode is an independent single-intruder run from fresh buffers,
    // the same protocol the sweep trials are evaluated under.
    SimConfig tc = config;
    tc.policy = PolicyKind::Rl;
    tc.arrival_mode = ArrivalMode::Sequential;
    tc.trajectories = 1;
    tc.horizon_ttis = 0;
    tc.record_events = false;
    const std::uint64_t root = substream_seed(config.seed, kStreamTraining);
    for (int e = 0; e < config.rl.training_episodes; ++e) {
        tc.seed = substream_seed(root, static_cast<std::uint64_t>(e));
        run(tc, &q, true);
    }
    return q;
}

RunResult run_with_training(const SimConfig& config) {
    if (config.policy == PolicyKind::Grid) return run(config);
    QPolicy q = train_policy(config);
    return run(config, &q, false);
}

std::vector<EnergySnapshot> run_day(const SimConfig& config, QPolicy* policy) {
    SimConfig day = config;
    day.arrival_mode = ArrivalMode::Profile;
    day.horizon_ttis = static_cast<Tti>(std::llround(24.0 * 3600.0 / config.tti_duration_s));
    if (day.policy == PolicyKind::Rl && policy == nullptr) {
        QPolicy q = train_policy(day);
        return run(day, &q, false).metrics.snapshots;
    }
    return run(day, policy, false).metrics.snapshots;
}

void write_metrics_json(std::ostream& out, const MetricsRecord& m) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["p_det"] = m.detection.p_det;
    j["p_early"] = m.detection.p_early;
    j["mean_t_det_s"] = m.detection.mean_t_det_s ? ordered_json(*m.detection.mean_t_det_s) : ordered_json(nullptr);
    j["objects"] = m.detection.total;
    j["detected"] = m.detection.detected;
    j["early"] = m.detection.early;
    j["ttis_simulated"] = m.ttis_simulated;
    j["objective"] = m.objective;
    j["total_reward"] = m.total_reward;
    j["reports"] = m.reports;
    j["sightings"] = m.sightings;
    j["wakeups"] = m.wakeups;
    j["failed_actions"] = m.failed_actions;
    ordered_json energy;
    energy["initial"] = m.energy_total.initial;
    energy["harvested"] = m.energy_total.harvested;
    energy["tx_report"] = m.energy_total.tx_report;
    energy["tx_sighting"] = m.energy_total.tx_sighting;
    energy["tx_status"] = m.energy_total.tx_status;
    energy["wur"] = m.energy_total.wur;
    energy["rotation"] = m.energy_total.rotation;
    energy["sensing"] = m.energy_total.sensing;
    energy["final"] = m.energy_total.final_level;
    j["energy"] = energy;
    ordered_json snaps = ordered_json::array();
    for (const auto& s : m.snapshots)
        snaps.push_back({{"hour", s.hour}, {"tti", s.tti}, {"avg_pct", s.average_pct}, {"available", s.available},
                         {"depleted", s.depleted}});
    j["snapshots"] = snaps;
    ordered_json outs = ordered_json::array();
    for (const auto& o : m.outcomes)
        outs.push_back({{"id", o.id},
                        {"t_in", o.t_in},
                        {"t_g", o.t_g},
                        {"t_exit", o.t_exit},
                        {"t_det", o.t_det ? ordered_json(*o.t_det) : ordered_json(nullptr)},
                        {"outcome", to_string(o.outcome)}});
    j["outcomes"] = outs;
    out << j.dump(2) << '\n';
}

}  // namespace geofence
