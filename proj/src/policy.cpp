#include "geofence/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace geofence {

void OutcomeWeights::validate() const {
    if (!(mu1 >= 0.0 && mu1 <= 1.0)) throw std::invalid_argument("weights.mu1: must lie in [0, 1]");
    if (!(mu2 >= 0.0)) throw std::invalid_argument("weights.mu2: must be non-negative");
    if (!(mu3 >= 0.0)) throw std::invalid_argument("weights.mu3: must be non-negative");
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Early: return "early";
        case Outcome::Late: return "late";
        case Outcome::Miss: return "miss";
    }
    return "unknown";
}

Outcome classify(std::optional<Tti> t_det, Tti t_g) {
    if (!t_det) return Outcome::Miss;
    return *t_det < t_g ? Outcome::Early : Outcome::Late;
}

double object_error(std::optional<Tti> t_det, Tti t_g, const OutcomeWeights& weights) {
    switch (classify(t_det, t_g)) {
        case Outcome::Early: return 0.0;
        case Outcome::Late: return weights.mu1;
        case Outcome::Miss: return 1.0;
    }
    return 1.0;
}

double objective(std::span<const double> errors, double alpha, Tti horizon_ttis) {
    if (!(alpha > 0.0) || horizon_ttis <= 0) throw std::invalid_argument("objective: alpha and T must be positive");
    double sum = 0.0;
    for (double e : errors) sum += e;
    return sum / (alpha * static_cast<double>(horizon_ttis));
}

double reward(int active_count, int n_devices, double coverage, double resolved_error, double alpha,
              const OutcomeWeights& weights) {
    const double idle = 1.0 - static_cast<double>(active_count) / static_cast<double>(n_devices);
    return idle + weights.mu2 * coverage - alpha * weights.mu3 * resolved_error;
}

double reward(std::span<const std::uint8_t> delta, double coverage, double resolved_error, double alpha,
              const OutcomeWeights& weights) {
    int active = 0;
    for (auto d : delta) active += d ? 1 : 0;
    return reward(active, static_cast<int>(delta.size()), coverage, resolved_error, alpha, weights);
}

DetectionMetrics metrics(std::span<const ObjectOutcome> outcomes, double tti_duration_s) {
    DetectionMetrics m;
    m.total = static_cast<int>(outcomes.size());
    double delay_sum = 0.0;
    for (const auto& o : outcomes) {
        if (o.outcome == Outcome::Miss) continue;
        ++m.detected;
        if (o.outcome == Outcome::Early) ++m.early;
        delay_sum += static_cast<double>(*o.t_det - o.t_in) * tti_duration_s;
    }
    if (m.total > 0) {
        m.p_det = static_cast<double>(m.detected) / m.total;
        m.p_early = static_cast<double>(m.early) / m.total;
    }
    if (m.detected > 0) m.mean_t_det_s = delay_sum / m.detected;
    return m;
}

std::vector<SensorPose> grid_placement(int n, const GeofenceLayout& layout, const Optics& optics) {
    if (n < 1) throw std::invalid_argument("grid_placement: n must be >= 1");
    const double a = layout.protected_half_width;
    const double per = layout.protected_perimeter();
    std::vector<SensorPose> poses;
    poses.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double s = per * k / n;
        SensorPose pose;
        pose.position = square_perimeter_point(layout.center, a, s);
        pose.theta_min = normalize_deg(square_perimeter_normal_deg(a, s) - optics.fov / 2.0);
        pose.fov = optics.fov;
        pose.r_max = optics.r_max;
        pose.eta = optics.eta;
        poses.push_back(pose);
    }
    return poses;
}

void GridConfig::validate() const {
    if (n_devices < 1) throw std::invalid_argument("grid.n_devices: must be >= 1");
    if (tau < 1) throw std::invalid_argument("grid.tau: must be >= 1");
}

Tti grid_phase(int device_index, const GridConfig& config) {
    if (config.phase_mode == PhaseMode::Aligned) return 0;
    return static_cast<Tti>(device_index) * (config.tau / config.n_devices);
}

int grid_schedule(int device_index, Tti t, const GridConfig& config) {
    Tti d = (t - grid_phase(device_index, config)) % config.tau;
    if (d < 0) d += config.tau;
    return d == 0 ? 1 : 0;
}

std::uint64_t StateKey::packed() const {
    return static_cast<std::uint64_t>(delta & 1u) | (static_cast<std::uint64_t>(orientation_bin & 0xFu) << 1) |
           (static_cast<std::uint64_t>(confidence_bin & 0x3u) << 5) | (static_cast<std::uint64_t>(energy_bin) << 7) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(x_cell)) << 23) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(y_cell)) << 39);
}

StateKey StateKey::unpack(std::uint64_t p) {
    StateKey k;
    k.delta = static_cast<std::uint8_t>(p & 1u);
    k.orientation_bin = static_cast<std::uint8_t>((p >> 1) & 0xFu);
    k.confidence_bin = static_cast<std::uint8_t>((p >> 5) & 0x3u);
    k.energy_bin = static_cast<std::uint16_t>((p >> 7) & 0xFFFFu);
    k.x_cell = static_cast<std::int16_t>(static_cast<std::uint16_t>((p >> 23) & 0xFFFFu));
    k.y_cell = static_cast<std::int16_t>(static_cast<std::uint16_t>((p >> 39) & 0xFFFFu));
    return k;
}

StateKey encode_state(const DeviceState& s, const StateBins& bins) {
    StateKey k;
    k.delta = s.delta ? 1 : 0;
    k.orientation_bin =
        static_cast<std::uint8_t>(static_cast<int>(std::floor(normalize_deg(s.theta_min) / kRotationStepDeg + 1e-9)) % 12);
    if (s.last_confidence >= bins.p_th && s.last_confidence > 0.0)
        k.confidence_bin = 2;
    else if (s.last_confidence > 0.0)
        k.confidence_bin = 1;
    const int levels = std::max(1, static_cast<int>(std::ceil(bins.c_max)));
    const double frac = std::clamp(s.buffer_level / bins.c_max, 0.0, 1.0);
    k.energy_bin = static_cast<std::uint16_t>(std::min(levels - 1, static_cast<int>(std::floor(frac * levels))));
    auto cell = [&](double v) {
        const double c = std::floor(v / bins.cell_size);
        return static_cast<std::int16_t>(std::clamp(c, -32768.0, 32767.0));
    };
    k.x_cell = cell(s.position.x);
    k.y_cell = cell(s.position.y);
    return k;
}

Action action_from_index(int index) {
    static constexpr Action kActions[kActionCount] = {{0, 0}, {0, -1}, {0, 1}, {1, 0}, {1, -1}, {1, 1}};
    return kActions[index];
}

int action_index(Action action) {
    const int rot = action.rotation == 0 ? 0 : (action.rotation < 0 ? 1 : 2);
    return (action.delta ? 3 : 0) + rot;
}

QPolicy::Values QPolicy::values(const StateKey& key) const {
    const auto it = table_.find(key.packed());
    return it == table_.end() ? Values{} : it->second;
}

QPolicy::Values& QPolicy::mutable_values(const StateKey& key) { return table_[key.packed()]; }

void QPolicy::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("rl.epsilon: must lie in [0, 1]");
    if (!(alpha_lr >= 0.0 && alpha_lr <= 1.0)) throw std::invalid_argument("rl.alpha_lr: must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("rl.gamma: must lie in [0, 1)");
}

Action greedy_action(const QPolicy& policy, const StateKey& key) {
    const auto q = policy.values(key);
    int best = 0;
    for (int i = 1; i < kActionCount; ++i)
        if (q[i] > q[best]) best = i;
    return action_from_index(best);
}

Action select_action(const QPolicy& policy, const StateKey& key, Rng& rng) {
    if (policy.epsilon > 0.0 && rng.uniform() < policy.epsilon)
        return action_from_index(static_cast<int>(rng.below(kActionCount)));
    return greedy_action(policy, key);
}

void q_update(QPolicy& policy, const StateKey& key, Action action, double reward, const StateKey& next_key) {
    const auto next = policy.values(next_key);
    const double best_next = *std::max_element(next.begin(), next.end());
    double& q = policy.mutable_values(key)[action_index(action)];
    q += policy.alpha_lr * (reward + policy.gamma * best_next - q);
}

namespace {

constexpr const char* kQTableMagic = "geofence-qtable";
constexpr int kQTableVersion = 1;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_qtable(std::ostream& out, const QPolicy& policy) {
    std::vector<std::uint64_t> keys;
    keys.reserve(policy.size());
    for (const auto& [k, v] : policy.table()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    out << kQTableMagic << ' ' << kQTableVersion << '\n';
    out << "epsilon " << fmt17(policy.epsilon) << '\n';
    out << "alpha_lr " << fmt17(policy.alpha_lr) << '\n';
    out << "gamma " << fmt17(policy.gamma) << '\n';
    out << "entries " << keys.size() << '\n';
    for (auto packed : keys) {
        const StateKey k = StateKey::unpack(packed);
        out << int(k.delta) << ' ' << int(k.orientation_bin) << ' ' << int(k.confidence_bin) << ' ' << k.energy_bin
            << ' ' << k.x_cell << ' ' << k.y_cell;
        for (double q : policy.table().at(packed)) out << ' ' << fmt17(q);
        out << '\n';
    }
}

QPolicy load_qtable(std::istream& in) {
    auto fail = [](const std::string& why) { throw std::runtime_error("q-table: " + why); };
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kQTableMagic) fail("missing header");
    if (version != kQTableVersion) fail("unsupported version " + std::to_string(version));
    QPolicy policy;
    std::string name;
    std::size_t entries = 0;
    if (!(in >> name >> policy.epsilon) || name != "epsilon") fail("expected epsilon");
    if (!(in >> name >> policy.alpha_lr) || name != "alpha_lr") fail("expected alpha_lr");
    if (!(in >> name >> policy.gamma) || name != "gamma") fail("expected gamma");
    if (!(in >> name >> entries) || name != "entries") fail("expected entries");
    for (std::size_t i = 0; i < entries; ++i) {
        int delta, orient, conf, energy, x, y;
        if (!(in >> delta >> orient >> conf >> energy >> x >> y)) fail("truncated entry " + std::to_string(i));
        StateKey k;
        k.delta = static_cast<std::uint8_t>(delta);
        k.orientation_bin = static_cast<std::uint8_t>(orient);
        k.confidence_bin = static_cast<std::uint8_t>(conf);
        k.energy_bin = static_cast<std::uint16_t>(energy);
        k.x_cell = static_cast<std::int16_t>(x);
        k.y_cell = static_cast<std::int16_t>(y);
        auto& values = policy.mutable_values(k);
        for (double& q : values) {
            // operator>> rejects "inf"/"nan"; a q-table with either is corrupt anyway.
            if (!(in >> q) || !std::isfinite(q)) fail("bad action value in entry " + std::to_string(i));
        }
    }
    policy.validate();
    return policy;
}

void save_placement_csv(std::ostream& out, std::span<const SensorPose> poses) {
    out << "device_id,x,y,theta_min\n";
    for (std::size_t i = 0; i < poses.size(); ++i)
        out << i << ',' << fmt17(poses[i].position.x) << ',' << fmt17(poses[i].position.y) << ','
            << fmt17(poses[i].theta_min) << '\n';
}

std::vector<SensorPose> load_placement_csv(std::istream& in, const Optics& optics) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("device_id,x,y,theta_min", 0) != 0)
        throw std::runtime_error("placement csv: missing header");
    std::vector<SensorPose> poses;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string id, x, y, th;
        if (!std::getline(row, id, ',') || !std::getline(row, x, ',') || !std::getline(row, y, ',') ||
            !std::getline(row, th))
            throw std::runtime_error("placement csv: malformed row '" + line + "'");
        SensorPose p;
        p.position = {std::stod(x), std::stod(y)};
        p.theta_min = normalize_deg(std::stod(th));
        p.fov = optics.fov;
        p.r_max = optics.r_max;
        p.eta = optics.eta;
        poses.push_back(p);
    }
    return poses;
}

}  // namespace geofence
