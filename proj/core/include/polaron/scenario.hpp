// scenario.hpp: model assembly and the scenario runners behind the CLI

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polaron/config.hpp"
#include "polaron/propagator.hpp"

namespace polaron {

// Bath of the config with the given coupling scale and an optional sigma override.
BathParams scaled_bath(const ScenarioConfig& cfg, double norm_scale, std::optional<double> sigma = {});

// Renormalized Hamiltonian, collective operators, Majorana pair and initial state.
EvolutionModel assemble_model(const ChainParams& chain, const BathParams& bath, const ScenarioConfig& cfg);

// Pairing of the pre-quench Hamiltonian.
double initial_pairing(const ChainParams& chain, const BathParams& bath, InitialPairing mode);

struct RunRecord {
    double parameter = 0.0; // sigma or U for sweeps
    double B = 1.0;
    Trajectory trajectory;
    double dt = 0.0;
    double theta_inf = 0.0; // mean over the final window
    bool converged = false; // final-window drift within tolerance
    double drift = 0.0;
    std::string error; // non-empty when the run aborted
};

RunRecord run_single(const ScenarioConfig& cfg, double norm_scale, Variant variant,
                     std::optional<double> sigma = {}, std::optional<double> U = {},
                     double lindblad_rate = 0.0);

struct VariantComparison {
    RunRecord full;
    RunRecord markovian;
    RunRecord lindblad;
    RunRecord unitary;
    double lindblad_rate = 0.0;
    double fit_window_end = 0.0; // 0 when the rate was given
};

VariantComparison compare_variants(const ScenarioConfig& cfg, double norm_scale);

// Dephasing rate whose Lindblad theta(t) best matches `reference` in the
// least-squares sense. `reference` must be sampled every step (stride 1).
double fit_lindblad_rate(const ScenarioConfig& cfg, double norm_scale, const Trajectory& reference);

// End of the initial decay: first local minimum of theta, or the last sample.
double initial_decay_end(const Trajectory& traj);

// Results in the order of cfg.sweep_values, independent of the thread count.
std::vector<RunRecord> sigma_sweep(const ScenarioConfig& cfg, double norm_scale);
std::vector<RunRecord> u_sweep(const ScenarioConfig& cfg, double norm_scale);

std::optional<double> read_calibration(const std::filesystem::path& path);
void write_calibration(const std::filesystem::path& path, double norm_scale);

struct ScenarioOutcome {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
    std::string message;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitHealth = 3;
inline constexpr int kExitCalibration = 4;

// Runs the configured scenario and writes its outputs under cfg.output_dir.
// `config_text` feeds the content hash in the metadata file.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& calibration_path,
                             const std::string& config_text);

} // namespace polaron
