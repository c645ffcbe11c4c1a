#ifndef GEOFENCE_SIM_HPP
#define GEOFENCE_SIM_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "geofence/energy.hpp"
#include "geofence/environment.hpp"
#include "geofence/fgs.hpp"
#include "geofence/policy.hpp"
#include "geofence/rng.hpp"
#include "geofence/sensing.hpp"

namespace geofence {

enum class PolicyKind { Grid, Rl };

const char* to_string(PolicyKind kind);

/**
 * Where intruders come from.
 *
 * Profile:    time-of-day Poisson arrivals over [0, horizon_ttis).
 * Sequential: `trajectories` intruders, one at a time. The first spawns
 *             warmup_ttis plus a uniform 0..tau-1 TTIs into the run, each
 *             later one a uniform 0..tau-1 TTIs after the previous resolved.
 * Scripted:   exactly the trajectories listed in SimConfig::scripted.
 */
enum class ArrivalMode { Profile, Sequential, Scripted };

struct RlParams {
    double epsilon = 0.1;
    double alpha_lr = 0.5;
    double gamma = 0.5;
    int training_episodes = 200;
    double eval_epsilon = 0.0;
};

struct SimConfig {
    GeofenceLayout layout;
    ArrivalProfile arrivals;
    ArrivalMode arrival_mode = ArrivalMode::Profile;
    int trajectories = 1;
    /// Lead time before the first Sequential spawn, so controllers start from a settled configuration.
    Tti warmup_ttis = 8192;
    std::vector<IntruderTrajectory> scripted;
    double intruder_speed = 1.0;

    EnergyParams energy;
    double initial_level_fraction = 1.0;

    Optics optics;
    double p_th = std::exp(-0.5);

    int n_devices = 20;
    /// Overrides grid_placement when non-empty; must hold n_devices poses.
    std::vector<SensorPose> placement;

    PolicyKind policy = PolicyKind::Grid;
    Tti tau = 1;
    PhaseMode phase_mode = PhaseMode::Staggered;

    double tti_duration_s = 1e-3;
    /// Run length. 0 ends Sequential and Scripted runs once every intruder resolved.
    Tti horizon_ttis = 0;
    std::uint64_t seed = 0;

    OutcomeWeights weights;
    RlParams rl;

    Tti status_report_period_ttis = 900000;  // 15 simulated minutes
    Tti k_rot = 100;
    Tti wakeup_horizon_ttis = 2000;
    Tti wakeup_sample_every_ttis = 50;
    std::size_t wakeup_max_per_event = 0;
    /// How long a woken device keeps sensing every TTI.
    Tti wake_window_ttis = 500;
    /// Lets grid devices receive FGS wake-ups too. Off: pure periodic schedule.
    bool grid_wakeups = false;
    /// Sub-threshold sightings are reported (and feed the FGS) under FGS feedback.
    bool report_sightings = true;
    /// Minimum spacing of repeated sightings of one object by one device. 0: at most one.
    Tti sighting_repeat_ttis = 0;
    bool suppress_after_fusion = true;
    /// Accumulate the per-TTI reward even for grid runs (placement scoring).
    bool accumulate_reward = false;

    int coverage_samples = 1024;
    std::vector<double> snapshot_hours = {6.0, 9.0, 12.0, 15.0, 18.0, 21.0};
    bool record_events = false;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool fgs_feedback() const { return policy == PolicyKind::Rl || grid_wakeups; }
    std::vector<SensorPose> device_poses() const;
};

struct EnergyAccount {
    double initial = 0.0;
    double harvested = 0.0;
    double tx_report = 0.0;
    double tx_sighting = 0.0;
    double tx_status = 0.0;
    double wur = 0.0;
    double rotation = 0.0;
    double sensing = 0.0;
    double final_level = 0.0;

    double consumed() const { return tx_report + tx_sighting + tx_status + wur + rotation + sensing; }
};

struct EnergySnapshot {
    double hour = 0.0;
    Tti tti = 0;
    double average_pct = 0.0;
    int available = 0;
    int depleted = 0;
};

struct MetricsRecord {
    DetectionMetrics detection;
    std::vector<ObjectOutcome> outcomes;
    std::vector<EnergySnapshot> snapshots;
    EnergyAccount energy_total;  // summed over devices
    Tti ttis_simulated = 0;
    double objective = 0.0;
    double total_reward = 0.0;
    int reports = 0;
    int sightings = 0;
    int wakeups = 0;
    int failed_actions = 0;
};

struct RunResult {
    MetricsRecord metrics;
    std::vector<EventRecord> events;
    std::vector<IntruderTrajectory> trajectories;
    std::vector<EnergyAccount> device_energy;
};

/// Live per-device simulation state.
struct Device {
    DeviceId id = 0;
    SensorPose home;
    SensorPose pose;
    int rotation_offset = 0;  // 30 degree steps from home, 0..11
    EnergyBuffer buffer;
    EnergyAccount account;
    int mode_delta = 0;       // last controller decision
    bool sensing = false;     // delta for the current TTI
    double last_confidence = 0.0;
    Tti wake_until = -1;      // senses every TTI while tti <= wake_until
    bool wake_pending = false;
    Tti last_rotation_tti = INT64_MIN / 2;
    double blocked_until_level = 0.0;  // > 0: failed action, waiting for this much energy

    bool blocked() const { return blocked_until_level > 0.0; }
};

struct LiveIntruder {
    IntruderTrajectory traj;
    CrossingTimes times;
    Vec2 position;
    bool present = false;
    std::optional<Tti> t_det;
    std::vector<double> running_max;   // per device
    std::vector<std::uint8_t> reported;  // per device
    std::vector<Tti> last_sighting;      // per device, -1 if never
    std::vector<DetectionReport> reports;
};

/**
 * One simulation run as a sequential state machine.
 *
 * Each step() executes, in order: spawns, intruder motion, harvest tick,
 * controller/schedule decisions, action charging, sensing, detection and
 * sighting reports, status reports, fusion and wake-ups, outcome
 * resolution, controller learning, and metric accumulation.
 */
class Simulation {
public:
    /// `policy` is required for PolicyKind::Rl; it is updated in place when `learn` is set.
    explicit Simulation(SimConfig config, QPolicy* policy = nullptr, bool learn = false);

    bool done() const;
    void step();
    Tti tti() const { return tti_; }

    const SimConfig& config() const { return config_; }
    const std::vector<Device>& devices() const { return devices_; }
    std::vector<Device>& mutable_devices() { return devices_; }
    const std::vector<LiveIntruder>& live() const { return live_; }
    const std::vector<EventRecord>& events() const { return events_; }
    double alpha() const { return alpha_; }

    RunResult finish() &&;

private:
    void spawn(const IntruderTrajectory& traj);
    void schedule_next_sequential(Tti after);
    void charge(Device& dev, double cost, double EnergyAccount::*bucket, bool& ok);
    const std::vector<std::uint64_t>& coverage_bits(std::size_t device_index);
    double current_coverage();
    DeviceState observe(const Device& dev) const;
    void take_snapshot(double hour);
    void log(EventKind kind, std::optional<DeviceId> dev, std::optional<ObjectId> obj, double value);

    SimConfig config_;
    QPolicy* policy_;
    bool learn_;
    double alpha_;
    StateBins bins_;
    GridConfig grid_;
    Tti tti_ = 0;

    Rng arrival_rng_;
    Rng trajectory_rng_;
    Rng harvest_rng_;
    Rng control_rng_;

    std::vector<Device> devices_;
    std::unordered_map<Tti, std::vector<int>> slot_members_;
    std::vector<LiveIntruder> live_;
    std::vector<Tti> pending_spawns_;     // sorted descending, popped from the back
    std::vector<IntruderTrajectory> scripted_pending_;  // sorted by spawn descending
    std::optional<Tti> next_sequential_spawn_;
    int spawned_ = 0;
    int resolved_ = 0;
    ObjectId next_object_id_ = 0;

    std::vector<Vec2> coverage_points_;
    std::vector<std::vector<std::uint64_t>> coverage_cache_;  // [device * 12 + offset]
    std::vector<std::uint64_t> cover_scratch_;

    struct Decision {
        int device = 0;
        StateKey key;
        Action action;
    };
    std::vector<int> active_;        // devices sensing this TTI, ascending
    std::vector<int> awake_;         // devices inside a wake window
    std::vector<int> pending_wake_;  // wake-ups issued last TTI
    std::vector<Decision> decisions_;

    std::vector<ObjectOutcome> outcomes_;
    std::vector<IntruderTrajectory> trajectories_;
    std::vector<EventRecord> events_;
    std::vector<EnergySnapshot> snapshots_;
    std::vector<std::pair<Tti, double>> snapshot_schedule_;  // (tti, hour), ascending
    std::size_t next_snapshot_ = 0;
    MetricsRecord counters_;
};

/// Runs to completion. RL runs use `policy` (greedy, frozen unless `learn`).
RunResult run(const SimConfig& config, QPolicy* policy = nullptr, bool learn = false);

/// Trains a fresh controller on `config.rl.training_episodes` independent single-intruder episodes.
QPolicy train_policy(const SimConfig& config);

/// RL runs without an explicit policy train one first; grid runs ignore `policy`.
RunResult run_with_training(const SimConfig& config);

/// 24 hour Profile run; returns the energy snapshot table.
std::vector<EnergySnapshot> run_day(const SimConfig& config, QPolicy* policy = nullptr);

void write_metrics_json(std::ostream& out, const MetricsRecord& metrics);

}  // namespace geofence

#endif  // GEOFENCE_SIM_HPP
