#include "geofence/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geofence {

void EnergyParams::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("energy." + field + ": " + why);
    };
    if (!(c_max > 0.0) || !std::isfinite(c_max)) fail("c_max", "must be positive");
    if (!(p_b >= 0.0)) fail("p_b", "must be non-negative");
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda", "must lie in [0, 1]");
    if (!(p_tx >= 0.0)) fail("p_tx", "must be non-negative");
    if (!(p_wur >= 0.0)) fail("p_wur", "must be non-negative");
    if (!(p_rot_bin >= 0.0)) fail("p_rot_bin", "must be non-negative");
    if (!(p_sense >= 0.0)) fail("p_sense", "must be non-negative");
    if (harvest_period_ttis < 1) fail("harvest_period_ttis", "must be >= 1");
}

EnergyBuffer harvest_step(EnergyBuffer buffer, const EnergyParams& params, Rng& rng) {
    if (rng.bernoulli(params.lambda)) buffer.level = std::min(buffer.level + params.p_b, params.c_max);
    return buffer;
}

ConsumeResult try_consume(EnergyBuffer buffer, double cost) {
    if (buffer.level >= cost) return {true, EnergyBuffer{buffer.level - cost}};
    return {false, buffer};
}

bool is_available(EnergyBuffer buffer, const EnergyParams& params) {
    return buffer.level >= kAvailabilityFraction * params.c_max;
}

bool is_depleted(EnergyBuffer buffer) { return buffer.level <= 1e-9; }

}  // namespace geofence
