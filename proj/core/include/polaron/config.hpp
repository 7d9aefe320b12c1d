// config.hpp: scenario configuration: flat `key = value` documents with
// dotted keys and `#` comments.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polaron/chain_model.hpp"
#include "polaron/phonon_bath.hpp"
#include "polaron/propagator.hpp"

namespace polaron {

enum class Scenario { single, compare_variants, sigma_sweep, u_sweep, calibrate };

std::string_view to_string(Scenario s) noexcept;

// Pairing of the pre-quench Hamiltonian.
enum class InitialPairing { bare, dressed_zero_temperature };

// Which Hamiltonian defines gamma_L, gamma_R.
enum class ModeBasis { initial, renormalized };

struct ScenarioConfig {
    Scenario scenario = Scenario::single;
    ChainParams chain{.J = 9.0, .delta = 9.0}; // 1/ps
    BathParams bath;
    EvolutionConfig evolution;
    InitialPairing initial_pairing = InitialPairing::bare;
    ModeBasis mode_basis = ModeBasis::initial;
    double doublet_gap = 1e-6;
    // Lindblad rate fitted against the full-memory run when unset.
    std::optional<double> lindblad_rate;
    // End of the Lindblad fit window; 0 means the first minimum of the full-memory theta.
    double lindblad_fit_time = 0.0;
    double calibration_sigma = 0.6;
    double calibration_target_b = 0.07;
    std::optional<double> norm_scale; // overrides the calibration file
    std::vector<double> sweep_values;
    std::filesystem::path output_dir = "out";
    int output_stride = 10;
    int threads = 1;

    void validate() const;
    // Every key with its effective value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Default sigma grid bracketing the critical window.
std::vector<double> default_sigma_grid();
std::vector<double> default_u_grid();

} // namespace polaron
