#ifndef GEOFENCE_ENERGY_HPP
#define GEOFENCE_ENERGY_HPP

#include <cstdint>

#include "geofence/rng.hpp"

namespace geofence {

/// Fraction of capacity at or above which a device counts as available.
inline constexpr double kAvailabilityFraction = 0.15;

/// Normalized energy-harvesting and consumption parameters, in units.
struct EnergyParams {
    double c_max = 10.0;
    double p_b = 1.0;        // units per successful harvest event
    double lambda = 0.1;     // harvest success probability per harvest tick
    double p_tx = 1.0;       // per uplink report
    double p_wur = 0.01;     // per processed wake-up request
    double p_rot_bin = 0.1;  // per 30 degree reorientation step
    double p_sense = 0.0;    // per active sensing TTI
    std::int64_t harvest_period_ttis = 60000;

    void validate() const;
};

struct EnergyBuffer {
    double level = 0.0;
};

/// One harvest tick: with probability lambda, add p_b and clip at c_max.
EnergyBuffer harvest_step(EnergyBuffer buffer, const EnergyParams& params, Rng& rng);

struct ConsumeResult {
    bool success = false;
    EnergyBuffer buffer;
};

/// Spends `cost` if the buffer holds at least that much; otherwise leaves it untouched.
ConsumeResult try_consume(EnergyBuffer buffer, double cost);

bool is_available(EnergyBuffer buffer, const EnergyParams& params);

/// Depleted means an empty buffer, up to floating round-off.
bool is_depleted(EnergyBuffer buffer);

}  // namespace geofence

#endif  // GEOFENCE_ENERGY_HPP
