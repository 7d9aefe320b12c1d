#include "polaron/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "polaron/csv.hpp"
#include "polaron/errors.hpp"
#include "polaron/observables.hpp"

namespace polaron {

BathParams scaled_bath(const ScenarioConfig& cfg, double norm_scale, std::optional<double> sigma) {
    BathParams bath = cfg.bath;
    bath.norm_scale = norm_scale;
    if (sigma) {
        bath.sigma = *sigma;
    }
    return bath;
}

double initial_pairing(const ChainParams& chain, const BathParams& bath, InitialPairing mode) {
    if (mode == InitialPairing::bare) {
        return chain.delta;
    }
    BathParams cold = bath;
    cold.temperature = 0.0;
    return chain.delta * franck_condon_B(cold);
}

EvolutionModel assemble_model(const ChainParams& chain, const BathParams& bath, const ScenarioConfig& cfg) {
    chain.validate();
    EvolutionModel model;
    model.space = build_space(chain.n_sites);
    model.bath = bath;
    model.B = franck_condon_B(bath);
    model.h_sys = build_kitaev(model.space, chain.J, chain.delta * model.B, chain.mu);
    if (chain.U != 0.0) {
        model.h_sys += build_interaction(model.space, chain.U);
    }
    model.x = build_collective_X(model.space, chain.J);
    model.es = eigensystem(model.h_sys);

    const double delta_init = initial_pairing(chain, bath, cfg.initial_pairing);
    const double delta_modes = cfg.mode_basis == ModeBasis::initial ? delta_init : chain.delta * model.B;
    model.pair = majorana_edge_modes(model.space, chain, delta_modes);
    const Operator h_init = build_kitaev(model.space, chain.J, delta_init, chain.mu);
    model.rho0 = initial_ground_state(h_init, model.pair, {cfg.doublet_gap, chain.J});
    return model;
}

namespace {

double window_mean(const Trajectory& traj, double fraction) {
    if (traj.size() == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    EvolutionConfig loose;
    loose.steady_window_fraction = fraction;
    loose.drift_tolerance = std::numeric_limits<double>::infinity();
    return steady_state_value(traj, loose);
}

} // namespace

RunRecord run_single(const ScenarioConfig& cfg, double norm_scale, Variant variant, std::optional<double> sigma,
                     std::optional<double> U, double lindblad_rate) {
    ChainParams chain = cfg.chain;
    if (U) {
        chain.U = *U;
    }
    const BathParams bath = scaled_bath(cfg, norm_scale, sigma);
    const EvolutionModel model = assemble_model(chain, bath, cfg);

    EvolutionConfig ev = cfg.evolution;
    ev.variant = variant;
    ev.output_stride = cfg.output_stride;
    ev.lindblad_rate = lindblad_rate;
    ev = resolve_config(ev, model, chain.J);

    RunRecord rec;
    rec.parameter = sigma ? *sigma : (U ? *U : bath.sigma);
    rec.B = model.B;
    rec.dt = ev.dt;
    try {
        rec.trajectory = run_trajectory(ev, model);
    } catch (const TrajectoryAborted& e) {
        rec.trajectory = e.partial();
        rec.error = e.what();
    }
    rec.theta_inf = window_mean(rec.trajectory, ev.steady_window_fraction);
    rec.drift = window_drift(rec.trajectory, ev.steady_window_fraction);
    rec.converged = rec.error.empty() && std::abs(rec.drift) <= ev.drift_tolerance;
    return rec;
}

namespace {

RunRecord fixed_grid_run(const ScenarioConfig& cfg, double norm_scale, Variant variant, double dt,
                         std::size_t steps, double rate) {
    ScenarioConfig grid = cfg;
    grid.evolution.dt = dt;
    grid.evolution.t_max = dt * static_cast<double>(steps);
    grid.output_stride = 1;
    RunRecord rec = run_single(grid, norm_scale, variant, {}, {}, rate);
    if (!rec.error.empty()) {
        throw HealthError("Lindblad fit run aborted: " + rec.error, grid.evolution.t_max);
    }
    return rec;
}

} // namespace

double initial_decay_end(const Trajectory& traj) {
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        if (traj.theta[i] < traj.theta[i - 1] && traj.theta[i] <= traj.theta[i + 1]) {
            return traj.times[i];
        }
    }
    return traj.times.empty() ? 0.0 : traj.times.back();
}

double fit_lindblad_rate(const ScenarioConfig& cfg, double norm_scale, const Trajectory& reference) {
    if (reference.size() < 3) {
        throw CalibrationError("Lindblad fit needs a reference with at least three samples");
    }
    const std::size_t steps = reference.size() - 1;
    auto mismatch = [&](double log_rate) {
        const RunRecord rec =
            fixed_grid_run(cfg, norm_scale, Variant::lindblad, reference.dt, steps, std::exp(log_rate));
        double sum = 0.0;
        for (std::size_t i = 0; i < reference.size(); ++i) {
            const double d = rec.trajectory.theta[i] - reference.theta[i];
            sum += d * d;
        }
        return sum;
    };
    // coarse log scan, then golden section around the best node
    const double lo = std::log(1e-3 * cfg.chain.J);
    const double hi = std::log(1e2 * cfg.chain.J);
    constexpr int kNodes = 26;
    const double h = (hi - lo) / (kNodes - 1);
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kNodes; ++i) {
        const double v = mismatch(lo + h * i);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    double a = lo + h * std::max(best - 1, 0);
    double b = lo + h * std::min(best + 1, kNodes - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = mismatch(x1);
    double f2 = mismatch(x2);
    while (b - a > 1e-9) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = mismatch(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = mismatch(x2);
        }
    }
    return std::exp(0.5 * (a + b));
}

namespace {

// Full-memory theta at every step up to the end of the fit window.
Trajectory fit_reference(const ScenarioConfig& cfg, double norm_scale) {
    ScenarioConfig probe = cfg;
    probe.evolution.t_max = cfg.lindblad_fit_time > 0.0 ? cfg.lindblad_fit_time : 5.0 / cfg.chain.J;
    probe.evolution.dt = 0.0;
    probe.output_stride = 1;
    const RunRecord rec = run_single(probe, norm_scale, Variant::full_memory);
    if (!rec.error.empty()) {
        throw HealthError("Lindblad fit reference aborted: " + rec.error, probe.evolution.t_max);
    }
    Trajectory ref = rec.trajectory;
    if (cfg.lindblad_fit_time == 0.0) {
        const double t_end = initial_decay_end(ref);
        std::size_t keep = 0;
        while (keep < ref.size() && ref.times[keep] <= t_end * (1.0 + 1e-12)) {
            ++keep;
        }
        ref.times.resize(keep);
        ref.theta.resize(keep);
    }
    return ref;
}

} // namespace

VariantComparison compare_variants(const ScenarioConfig& cfg, double norm_scale) {
    VariantComparison out;
    if (cfg.lindblad_rate) {
        out.lindblad_rate = *cfg.lindblad_rate;
    } else {
        const Trajectory reference = fit_reference(cfg, norm_scale);
        out.fit_window_end = reference.times.back();
        out.lindblad_rate = fit_lindblad_rate(cfg, norm_scale, reference);
    }
    out.full = run_single(cfg, norm_scale, Variant::full_memory);
    out.markovian = run_single(cfg, norm_scale, Variant::markovian_limit);
    out.lindblad = run_single(cfg, norm_scale, Variant::lindblad, {}, {}, out.lindblad_rate);
    out.unitary = run_single(cfg, norm_scale, Variant::unitary_quench);
    return out;
}

namespace {

template <class Fn>
std::vector<RunRecord> parallel_map(const std::vector<double>& values, int threads, Fn fn) {
    std::vector<RunRecord> results(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                results[i] = fn(values[i]);
            } catch (const Error& e) {
                results[i].parameter = values[i];
                results[i].error = e.what();
                results[i].theta_inf = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, threads));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(n, values.size()); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    return results;
}

} // namespace

std::vector<RunRecord> sigma_sweep(const ScenarioConfig& cfg, double norm_scale) {
    return parallel_map(cfg.sweep_values, cfg.threads, [&](double sigma) {
        return run_single(cfg, norm_scale, cfg.evolution.variant, sigma);
    });
}

std::vector<RunRecord> u_sweep(const ScenarioConfig& cfg, double norm_scale) {
    return parallel_map(cfg.sweep_values, cfg.threads, [&](double u) {
        RunRecord rec = run_single(cfg, norm_scale, cfg.evolution.variant, {}, u);
        rec.parameter = u;
        return rec;
    });
}

std::optional<double> read_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto eq = text.find('=');
    if (text.rfind("norm_scale", 0) != 0 || eq == std::string::npos) {
        throw ConfigError("calibration file " + path.string() + " must hold a single 'norm_scale = <value>' line");
    }
    try {
        const double v = std::stod(text.substr(eq + 1));
        if (!(v > 0.0)) {
            throw ConfigError("calibration file holds a non-positive norm_scale");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("calibration file " + path.string() + " holds no number");
    }
}

void write_calibration(const std::filesystem::path& path, double norm_scale) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write calibration file " + path.string());
    }
    out << "norm_scale = " << format_number(norm_scale) << '\n';
}

namespace {

std::string label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_snapshot(const RunRecord& rec, const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "# " << rec.error << '\n';
    out << "# partial trajectory follows\n";
    out.close();
    const std::filesystem::path csv = path.string() + ".csv";
    emit_csv(rec.trajectory, csv);
}

struct Emitter {
    std::filesystem::path dir;
    ScenarioOutcome outcome;

    void trajectory(const RunRecord& rec, const std::string& stem) {
        const auto path = dir / (stem + ".csv");
        emit_csv(rec.trajectory, path);
        outcome.files.push_back(path);
        if (!rec.error.empty()) {
            const auto snap = dir / (stem + "_abort_snapshot.txt");
            write_snapshot(rec, snap);
            outcome.files.push_back(snap);
            outcome.exit_code = kExitHealth;
            outcome.message += stem + ": " + rec.error + " (snapshot " + snap.string() + ")\n";
        }
    }
};

void emit_phi(const BathParams& bath, double dt, double t_max, const std::filesystem::path& path) {
    const CorrelationTable table = correlation_table(bath, dt, t_max);
    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < table.values.size(); m += 2) {
        rows.push_back({table.tau(m), table.values[m].real(), table.values[m].imag()});
    }
    emit_table({"tau", "phi_re", "phi_im"}, rows, path);
}

} // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& calibration_path,
                             const std::string& config_text) {
    const auto started = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.output_dir);
    Emitter emit{cfg.output_dir, {}};
    auto meta = cfg.entries();
    meta.emplace_back("config_hash", git_blob_hash(config_text));
    meta.emplace_back("units", "hbar = 1; t in ps; energies in 1/ps; k in 1/nm; c_s in nm/ps; T in K");

    if (cfg.scenario == Scenario::calibrate) {
        BathParams ref = cfg.bath;
        ref.sigma = cfg.calibration_sigma;
        const double scale = calibrate_scale(ref, cfg.calibration_target_b);
        write_calibration(calibration_path, scale);
        emit.outcome.files.push_back(calibration_path);
        meta.emplace_back("resolved.norm_scale", format_number(scale));
    } else {
        double scale = 0.0;
        if (cfg.norm_scale) {
            scale = *cfg.norm_scale;
        } else if (const auto read = read_calibration(calibration_path)) {
            scale = *read;
        } else {
            return {kExitCalibration, {}, "calibration file " + calibration_path.string() +
                                               " not found; run the calibrate scenario first"};
        }
        meta.emplace_back("resolved.norm_scale", format_number(scale));
        meta.emplace_back("resolved.calibration_file", cfg.norm_scale ? "unused" : calibration_path.string());

        auto note_run = [&](const std::string& prefix, const RunRecord& rec) {
            meta.emplace_back(prefix + ".B", format_number(rec.B));
            meta.emplace_back(prefix + ".dt", format_number(rec.dt));
            meta.emplace_back(prefix + ".t_max", format_number(rec.trajectory.times.empty() ? 0.0
                                                                 : rec.trajectory.times.back()));
            meta.emplace_back(prefix + ".theta_inf", format_number(rec.theta_inf));
            meta.emplace_back(prefix + ".converged", rec.converged ? "true" : "false");
        };

        switch (cfg.scenario) {
        case Scenario::single: {
            const RunRecord rec = run_single(cfg, scale, cfg.evolution.variant, {}, {}, cfg.lindblad_rate.value_or(0.0));
            emit.trajectory(rec, std::string(to_string(cfg.evolution.variant)));
            note_run("resolved", rec);
            break;
        }
        case Scenario::compare_variants: {
            const VariantComparison cmp = compare_variants(cfg, scale);
            emit.trajectory(cmp.full, "full_memory");
            emit.trajectory(cmp.markovian, "markovian_limit");
            emit.trajectory(cmp.lindblad, "lindblad");
            emit.trajectory(cmp.unitary, "unitary_quench");
            meta.emplace_back("resolved.lindblad_rate", format_number(cmp.lindblad_rate));
            meta.emplace_back("resolved.lindblad_fit_window", format_number(cmp.fit_window_end));
            note_run("full_memory", cmp.full);
            note_run("markovian_limit", cmp.markovian);
            note_run("lindblad", cmp.lindblad);
            note_run("unitary_quench", cmp.unitary);
            break;
        }
        case Scenario::sigma_sweep:
        case Scenario::u_sweep: {
            const bool sigma = cfg.scenario == Scenario::sigma_sweep;
            const auto records = sigma ? sigma_sweep(cfg, scale) : u_sweep(cfg, scale);
            std::vector<std::vector<double>> rows;
            for (const RunRecord& rec : records) {
                const std::string stem = (sigma ? "sigma_" : "U_") + label(rec.parameter);
                emit.trajectory(rec, stem);
                note_run(stem, rec);
                rows.push_back({rec.parameter, rec.B, rec.theta_inf, rec.converged ? 1.0 : 0.0});
                if (sigma && rec.dt > 0.0) {
                    const auto phi_path = cfg.output_dir / ("phi_" + stem + ".csv");
                    emit_phi(scaled_bath(cfg, scale, rec.parameter), rec.dt, rec.trajectory.times.back(), phi_path);
                    emit.outcome.files.push_back(phi_path);
                }
            }
            const auto summary = cfg.output_dir / (sigma ? "sigma_sweep_summary.csv" : "u_sweep_summary.csv");
            emit_table({sigma ? "sigma" : "U", "B", "theta_inf", "converged"}, rows, summary);
            emit.outcome.files.push_back(summary);
            break;
        }
        case Scenario::calibrate:
            break;
        }
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    meta.emplace_back("wall_clock_seconds", format_number(seconds));
    const auto meta_path = cfg.output_dir / "metadata.txt";
    emit_metadata(meta, meta_path);
    emit.outcome.files.push_back(meta_path);
    return emit.outcome;
}

} // namespace polaron
