#ifndef GEOFENCE_POLICY_HPP
#define GEOFENCE_POLICY_HPP

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "geofence/environment.hpp"
#include "geofence/rng.hpp"
#include "geofence/sensing.hpp"
#include "geofence/types.hpp"

namespace geofence {

// ---------------------------------------------------------------------------
// Scoring

struct OutcomeWeights {
    double mu1 = 0.5;  // late-detection penalty
    double mu2 = 0.5;  // coverage weight in the reward
    double mu3 = 1.0;  // detection-error weight in the reward

    void validate() const;
};

enum class Outcome { Early, Late, Miss };

const char* to_string(Outcome o);

/// Early iff t_det < t_g; late iff t_det >= t_g; miss iff never detected.
Outcome classify(std::optional<Tti> t_det, Tti t_g);

/// Per-object error: 0 early, mu1 late, 1 missed.
double object_error(std::optional<Tti> t_det, Tti t_g, const OutcomeWeights& weights);

/// Mean detection error per expected intruder: sum(errors) / (alpha * T).
double objective(std::span<const double> errors, double alpha, Tti horizon_ttis);

/**
 * Per-TTI reward: the idle fraction (1 - active/N), plus mu2 times the
 * perimeter coverage, minus alpha * mu3 times the detection error that
 * resolved this TTI.
 */
double reward(int active_count, int n_devices, double coverage, double resolved_error, double alpha,
              const OutcomeWeights& weights);

double reward(std::span<const std::uint8_t> delta, double coverage, double resolved_error, double alpha,
              const OutcomeWeights& weights);

struct ObjectOutcome {
    ObjectId id = 0;
    Tti t_in = 0;
    Tti t_g = 0;
    Tti t_exit = 0;
    std::optional<Tti> t_det;
    Outcome outcome = Outcome::Miss;
};

struct DetectionMetrics {
    int total = 0;
    int detected = 0;
    int early = 0;
    double p_det = 0.0;
    double p_early = 0.0;
    std::optional<double> mean_t_det_s;  // absent when nothing was detected
};

/// Detection rate, early rate and mean entry-to-detection delay. An empty input yields zeros.
DetectionMetrics metrics(std::span<const ObjectOutcome> outcomes, double tti_duration_s);

// ---------------------------------------------------------------------------
// Grid baseline

/// Camera optics shared by every device.
struct Optics {
    double fov = 60.0;
    double r_max = 3.0;
    double eta = 1.0;
};

/**
 * `n` devices equally spaced by arc length along the protected perimeter,
 * starting at the bottom-side midpoint, each facing outward with the FoV
 * bisector on the outward normal.
 */
std::vector<SensorPose> grid_placement(int n, const GeofenceLayout& layout, const Optics& optics = {});

enum class PhaseMode { Aligned, Staggered };

struct GridConfig {
    int n_devices = 1;
    Tti tau = 1;  // duty-cycle period in TTIs
    PhaseMode phase_mode = PhaseMode::Staggered;

    void validate() const;
};

Tti grid_phase(int device_index, const GridConfig& config);

/// 1 exactly when (t - phase) is a multiple of tau.
int grid_schedule(int device_index, Tti t, const GridConfig& config);

// ---------------------------------------------------------------------------
// Tabular controller

/// Per-device observation used by the controller.
struct DeviceState {
    int delta = 0;
    double theta_min = 0.0;
    double last_confidence = 0.0;
    Vec2 position;
    double buffer_level = 0.0;
};

struct StateBins {
    double p_th = 0.0;
    double c_max = 10.0;
    double cell_size = 1.0;  // meters
};

struct StateKey {
    std::uint8_t delta = 0;
    std::uint8_t orientation_bin = 0;  // 30 degree bins, 0..11
    std::uint8_t confidence_bin = 0;   // 0: none, 1: below p_th, 2: valid
    std::uint16_t energy_bin = 0;      // 0..ceil(c_max)-1
    std::int16_t x_cell = 0;
    std::int16_t y_cell = 0;

    std::uint64_t packed() const;
    static StateKey unpack(std::uint64_t packed);
    friend bool operator==(const StateKey&, const StateKey&) = default;
};

StateKey encode_state(const DeviceState& state, const StateBins& bins);

struct Action {
    int delta = 0;     // 0 sleep, 1 activate
    int rotation = 0;  // -1, 0, +1 steps of 30 degrees
    friend bool operator==(const Action&, const Action&) = default;
};

inline constexpr int kActionCount = 6;

/// Index order doubles as the greedy tie-break order:
/// sleep before activate, then 0 before -30 before +30.
Action action_from_index(int index);
int action_index(Action action);

class QPolicy {
public:
    using Values = std::array<double, kActionCount>;

    double epsilon = 0.1;
    double alpha_lr = 0.1;
    double gamma = 0.9;

    /// Action values for a key; unseen keys read as all zeros.
    Values values(const StateKey& key) const;
    Values& mutable_values(const StateKey& key);
    std::size_t size() const { return table_.size(); }
    const std::unordered_map<std::uint64_t, Values>& table() const { return table_; }

    void validate() const;

private:
    std::unordered_map<std::uint64_t, Values> table_;
};

/// Epsilon-greedy choice with the fixed tie-break order.
Action select_action(const QPolicy& policy, const StateKey& key, Rng& rng);

/// Greedy action, ignoring epsilon.
Action greedy_action(const QPolicy& policy, const StateKey& key);

/// One-step Q-learning update toward reward + gamma * max Q(next).
void q_update(QPolicy& policy, const StateKey& key, Action action, double reward, const StateKey& next_key);

/// Text format, see README ("Q-table format").
void save_qtable(std::ostream& out, const QPolicy& policy);
QPolicy load_qtable(std::istream& in);

/// CSV with header `device_id,x,y,theta_min`.
void save_placement_csv(std::ostream& out, std::span<const SensorPose> poses);
std::vector<SensorPose> load_placement_csv(std::istream& in, const Optics& optics = {});

}  // namespace geofence

#endif  // GEOFENCE_POLICY_HPP
