// Shared fixtures for the unit tests.

#pragma once

#include "polaron/config.hpp"
#include "polaron/scenario.hpp"

namespace testing_support {

// Dimensionless chain (J = 1) on four sites at the ideal point.
inline polaron::ScenarioConfig unit_config() {
    polaron::ScenarioConfig cfg;
    cfg.chain = polaron::ChainParams{};
    return cfg;
}

inline double calibrated_scale(const polaron::BathParams& bath = {}) {
    polaron::BathParams ref = bath;
    ref.sigma = 0.6;
    return polaron::calibrate_scale(ref, 0.07);
}

inline polaron::EvolutionModel model_for(const polaron::ScenarioConfig& cfg, double norm_scale) {
    return polaron::assemble_model(cfg.chain, polaron::scaled_bath(cfg, norm_scale), cfg);
}

} // namespace testing_support
