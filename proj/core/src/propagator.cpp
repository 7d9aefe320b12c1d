#include "polaron/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polaron/observables.hpp"

namespace polaron {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
    case Variant::full_memory:
        return "full_memory";
    case Variant::markovian_limit:
        return "markovian_limit";
    case Variant::lindblad:
        return "lindblad";
    case Variant::unitary_quench:
        return "unitary_quench";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    for (Variant v : {Variant::full_memory, Variant::markovian_limit, Variant::lindblad,
                      Variant::unitary_quench}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    throw ConfigError("unknown evolution variant '" + std::string(name) + "'");
}

HeisenbergEvolver::HeisenbergEvolver(const Operator& x, const Eigensystem& es)
    : es_(es), x_eig_(es.vectors.adjoint() * x * es.vectors) {}

Operator HeisenbergEvolver::at(double tau) const {
    const Eigen::VectorXcd phase =
        (std::complex<double>(0.0, -tau) * es_.values.cast<std::complex<double>>()).array().exp();
    const Operator rotated = phase.asDiagonal() * x_eig_ * phase.conjugate().asDiagonal();
    return es_.vectors * rotated * es_.vectors.adjoint();
}

KernelAccumulators KernelAccumulators::zero(Eigen::Index dim) {
    return {Operator::Zero(dim, dim), Operator::Zero(dim, dim), 0.0, 0};
}

namespace {

template <class T>
struct SimpsonStep {
    T mid;
    T end;
};

// Nodes at t, t + h/2, t + h.
template <class T>
SimpsonStep<T> simpson_step(const T& acc, const T& f0, const T& f1, const T& f2, double h) {
    return {acc + (h / 24.0) * (5.0 * f0 + 8.0 * f1 - f2), acc + (h / 6.0) * (f0 + 4.0 * f1 + f2)};
}

void check_table(const CorrelationTable& table, std::size_t step, double dt) {
    if (std::abs(table.dt - dt) > 1e-12 * std::max(1.0, std::abs(dt))) {
        throw RangeError("kernel step dt does not match the correlation table grid");
    }
    if (2 * step + 2 >= table.values.size()) {
        throw RangeError("correlation table exhausted at t = " +
                         std::to_string(static_cast<double>(step) * dt));
    }
}

std::complex<double> weight_a(std::complex<double> phi) { return std::cosh(phi) - 1.0; }
std::complex<double> weight_b(std::complex<double> phi) { return std::sinh(phi); }

} // namespace

KernelStep accumulators_advance_with_midpoint(const KernelAccumulators& acc, const CorrelationTable& table,
                                              const Eigensystem& es, const Operator& x_a,
                                              const Operator& x_b, double dt) {
    check_table(table, acc.step, dt);
    const HeisenbergEvolver ea(x_a, es);
    const HeisenbergEvolver eb(x_b, es);
    const std::size_t m = 2 * acc.step;
    Operator fa[3];
    Operator fb[3];
    for (std::size_t i = 0; i < 3; ++i) {
        const double tau = table.tau(m + i);
        fa[i] = weight_a(table.values[m + i]) * ea.at(tau);
        fb[i] = weight_b(table.values[m + i]) * eb.at(tau);
    }
    const auto sa = simpson_step<Operator>(acc.k_a, fa[0], fa[1], fa[2], dt);
    const auto sb = simpson_step<Operator>(acc.k_b, fb[0], fb[1], fb[2], dt);
    const double t_next = static_cast<double>(acc.step + 1) * dt;
    return {{sa.mid, sb.mid, t_next - 0.5 * dt, acc.step},
            {sa.end, sb.end, t_next, acc.step + 1}};
}

KernelAccumulators accumulators_advance(const KernelAccumulators& acc, const CorrelationTable& table,
                                        const Eigensystem& es, const Operator& x_a, const Operator& x_b,
                                        double dt) {
    return accumulators_advance_with_midpoint(acc, table, es, x_a, x_b, dt).end;
}

MarkovianCoefficients markovian_coefficients(const CorrelationTable& table, std::size_t half_steps) {
    const std::size_t full = half_steps / 2;
    const bool odd = (half_steps % 2) != 0;
    const std::size_t last_node = odd ? half_steps + 1 : half_steps;
    if (last_node >= table.values.size()) {
        throw RangeError("correlation table exhausted for Markovian coefficients");
    }
    std::complex<double> ca = 0.0;
    std::complex<double> cb = 0.0;
    for (std::size_t n = 0; n < full; ++n) {
        const auto& v = table.values;
        const std::size_t m = 2 * n;
        ca = simpson_step(ca, weight_a(v[m]), weight_a(v[m + 1]), weight_a(v[m + 2]), table.dt).end;
        cb = simpson_step(cb, weight_b(v[m]), weight_b(v[m + 1]), weight_b(v[m + 2]), table.dt).end;
    }
    if (odd) {
        const auto& v = table.values;
        const std::size_t m = 2 * full;
        ca = simpson_step(ca, weight_a(v[m]), weight_a(v[m + 1]), weight_a(v[m + 2]), table.dt).mid;
        cb = simpson_step(cb, weight_b(v[m]), weight_b(v[m + 1]), weight_b(v[m + 2]), table.dt).mid;
    }
    return {ca, cb};
}

Operator memory_dissipator(const Operator& rho, const CollectiveOps& x, const Operator& k_a,
                           const Operator& k_b, double B) {
    const Operator ka_rho = k_a * rho;
    const Operator kb_rho = k_b * rho;
    const Operator d = (B * B) * (x.x_a * ka_rho - ka_rho * x.x_a - x.x_b * kb_rho + kb_rho * x.x_b);
    return d + d.adjoint();
}

namespace {

Operator von_neumann(const Operator& rho, const Operator& h) {
    const std::complex<double> minus_i(0.0, -1.0);
    return minus_i * (h * rho - rho * h);
}

Operator symmetrized(const Operator& m) { return 0.5 * (m + m.adjoint()); }

} // namespace

Operator liouvillian_full(const Operator& rho, const Operator& h_sys, const CollectiveOps& x,
                          const KernelAccumulators& acc, double B) {
    return symmetrized(von_neumann(rho, h_sys) - memory_dissipator(rho, x, acc.k_a, acc.k_b, B));
}

Operator liouvillian_markovian(const Operator& rho, const Operator& h_sys, const CollectiveOps& x,
                               const CorrelationTable& table, double t, double B) {
    const double half = 0.5 * table.dt;
    const double m_real = t / half;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (t < 0.0 || std::abs(m_real - static_cast<double>(m)) > 1e-9) {
        throw RangeError("liouvillian_markovian: t is not on the half-step grid");
    }
    const MarkovianCoefficients c = markovian_coefficients(table, m);
    return symmetrized(von_neumann(rho, h_sys) - memory_dissipator(rho, x, c.c_a * x.x_a, c.c_b * x.x_b, B));
}

Operator liouvillian_lindblad(const Operator& rho, const Operator& h_sys, double rate,
                              const std::vector<Operator>& number_ops) {
    Operator out = von_neumann(rho, h_sys);
    if (rate != 0.0) {
        for (const Operator& n : number_ops) {
            // n^2 = n for fermion number operators
            const Operator n_rho = n * rho;
            const Operator rho_n = rho * n;
            out += rate * (n_rho * n - 0.5 * (n * n_rho + rho_n * n));
        }
    }
    return symmetrized(out);
}

Operator liouvillian_lindblad(const Operator& rho, const Operator& h_sys, double rate, const FockSpace& space) {
    if (rate < 0.0) {
        throw ConfigError("Lindblad dephasing rate must be non-negative");
    }
    std::vector<Operator> n;
    for (int l = 1; l <= space.n_sites(); ++l) {
        n.push_back(number_op(space, l));
    }
    return liouvillian_lindblad(rho, h_sys, rate, n);
}

Operator liouvillian_unitary(const Operator& rho, const Operator& h_quench) {
    return symmetrized(von_neumann(rho, h_quench));
}

Operator rk4_step(const Operator& rho, double dt, const StageLiouvillians& stages,
                  double* hermiticity_defect_out) {
    const Operator k1 = stages.start(rho);
    const Operator k2 = stages.mid(rho + (0.5 * dt) * k1);
    const Operator k3 = stages.mid(rho + (0.5 * dt) * k2);
    const Operator k4 = stages.end(rho + dt * k3);
    const Operator next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (hermiticity_defect_out != nullptr) {
        *hermiticity_defect_out = hermiticity_defect(next);
    }
    return symmetrized(next);
}

double max_stable_dt(const EvolutionModel& model) {
    const double radius = model.es.values.cwiseAbs().maxCoeff();
    double inverse_memory = 0.0;
    if (model.bath.f_ph != 0.0) {
        inverse_memory = 1.0 / memory_time(model.bath);
    }
    const double fastest = std::max(radius, inverse_memory);
    return fastest > 0.0 ? 0.02 / fastest : 0.02;
}

EvolutionConfig resolve_config(EvolutionConfig config, const EvolutionModel& model, double J) {
    if (config.t_max == 0.0) {
        config.t_max = 50.0 / J;
    }
    if (!(config.t_max > 0.0)) {
        throw ConfigError("evolution.t_max must be positive");
    }
    const double bound = max_stable_dt(model);
    if (config.dt == 0.0) {
        const double steps = std::ceil(config.t_max / bound - 1e-9);
        config.dt = config.t_max / steps;
    } else if (!(config.dt > 0.0)) {
        throw ConfigError("evolution.dt must be positive");
    } else if (config.dt > bound * (1.0 + 1e-9)) {
        throw ConfigError("evolution.dt = " + std::to_string(config.dt) +
                          " exceeds the resolution bound " + std::to_string(bound));
    }
    if (!(config.steady_window_fraction > 0.0 && config.steady_window_fraction < 1.0)) {
        throw ConfigError("evolution.steady_window_fraction must lie in (0, 1)");
    }
    if (config.output_stride < 1) {
        throw ConfigError("output_stride must be at least 1");
    }
    if (config.lindblad_rate < 0.0) {
        throw ConfigError("evolution.lindblad_rate must be non-negative");
    }
    return config;
}

namespace {

class Sampler {
public:
    Sampler(const EvolutionModel& model, Trajectory& traj) : model_(model), traj_(traj) {}

    void record(double t, const Operator& rho, double herm_defect) {
        const HealthReport h = health(rho, model_.space);
        const ThetaValue th = theta_value(rho, model_.pair);
        traj_.times.push_back(t);
        traj_.theta.push_back(th.value);
        traj_.theta_imag.push_back(th.imag);
        traj_.purity.push_back(h.purity);
        traj_.parity.push_back(h.parity);
        traj_.trace_error.push_back(h.trace_error);
        traj_.min_eig.push_back(h.min_eigenvalue);
        traj_.hermiticity_defect.push_back(herm_defect);
    }

private:
    const EvolutionModel& model_;
    Trajectory& traj_;
};

} // namespace

Trajectory run_trajectory(const EvolutionConfig& config, const EvolutionModel& model) {
    if (!(config.dt > 0.0) || !(config.t_max > 0.0)) {
        throw ConfigError("run_trajectory: dt and t_max must be resolved before the run");
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(config.t_max / config.dt));
    const double dt = config.dt;
    const bool needs_table =
        config.variant == Variant::full_memory || config.variant == Variant::markovian_limit;

    CorrelationTable table;
    if (needs_table) {
        table = correlation_table(model.bath, dt, static_cast<double>(n_steps) * dt);
    }
    std::vector<Operator> number_ops;
    for (int l = 1; l <= model.space.n_sites(); ++l) {
        number_ops.push_back(number_op(model.space, l));
    }
    const HeisenbergEvolver evolve_a(model.x.x_a, model.es);
    const HeisenbergEvolver evolve_b(model.x.x_b, model.es);

    Trajectory traj;
    traj.dt = dt;
    Sampler sampler(model, traj);
    Operator rho = model.rho0.matrix();
    sampler.record(0.0, rho, hermiticity_defect(rho));

    // Operator kernels, cached integrand at the left node.
    Operator k_a = model.space.zero();
    Operator k_b = model.space.zero();
    Operator fa_left;
    Operator fb_left;
    std::complex<double> c_a = 0.0;
    std::complex<double> c_b = 0.0;
    if (config.variant == Variant::full_memory) {
        fa_left = weight_a(table.values[0]) * model.x.x_a;
        fb_left = weight_b(table.values[0]) * model.x.x_b;
    }

    const Operator& h = model.h_sys;
    const double B = model.B;
    double worst_herm = 0.0;

    for (std::size_t n = 0; n < n_steps; ++n) {
        StageLiouvillians stages;
        Operator fa_right;
        Operator fb_right;
        std::complex<double> ca_end = 0.0;
        std::complex<double> cb_end = 0.0;
        switch (config.variant) {
        case Variant::full_memory: {
            const std::size_t m = 2 * n;
            const Operator fa_mid = weight_a(table.values[m + 1]) * evolve_a.at(table.tau(m + 1));
            const Operator fb_mid = weight_b(table.values[m + 1]) * evolve_b.at(table.tau(m + 1));
            fa_right = weight_a(table.values[m + 2]) * evolve_a.at(table.tau(m + 2));
            fb_right = weight_b(table.values[m + 2]) * evolve_b.at(table.tau(m + 2));
            const auto sa = simpson_step<Operator>(k_a, fa_left, fa_mid, fa_right, dt);
            const auto sb = simpson_step<Operator>(k_b, fb_left, fb_mid, fb_right, dt);
            auto make = [&](Operator ka, Operator kb) {
                return [&, ka = std::move(ka), kb = std::move(kb)](const Operator& r) {
                    return symmetrized(von_neumann(r, h) - memory_dissipator(r, model.x, ka, kb, B));
                };
            };
            stages = {make(k_a, k_b), make(sa.mid, sb.mid), make(sa.end, sb.end)};
            k_a = sa.end;
            k_b = sb.end;
            break;
        }
        case Variant::markovian_limit: {
            const auto& v = table.values;
            const std::size_t m = 2 * n;
            const auto sa = simpson_step(c_a, weight_a(v[m]), weight_a(v[m + 1]), weight_a(v[m + 2]), dt);
            const auto sb = simpson_step(c_b, weight_b(v[m]), weight_b(v[m + 1]), weight_b(v[m + 2]), dt);
            auto make = [&](std::complex<double> ca, std::complex<double> cb) {
                return [&, ca, cb](const Operator& r) {
                    return symmetrized(von_neumann(r, h) -
                                       memory_dissipator(r, model.x, ca * model.x.x_a, cb * model.x.x_b, B));
                };
            };
            stages = {make(c_a, c_b), make(sa.mid, sb.mid), make(sa.end, sb.end)};
            ca_end = sa.end;
            cb_end = sb.end;
            break;
        }
        case Variant::lindblad: {
            auto f = [&](const Operator& r) {
                return liouvillian_lindblad(r, h, config.lindblad_rate, number_ops);
            };
            stages = {f, f, f};
            break;
        }
        case Variant::unitary_quench: {
            auto f = [&](const Operator& r) { return liouvillian_unitary(r, h); };
            stages = {f, f, f};
            break;
        }
        }

        double herm = 0.0;
        rho = rk4_step(rho, dt, stages, &herm);
        worst_herm = std::max(worst_herm, herm);

        if (config.variant == Variant::full_memory) {
            fa_left = std::move(fa_right);
            fb_left = std::move(fb_right);
        } else if (config.variant == Variant::markovian_limit) {
            c_a = ca_end;
            c_b = cb_end;
        }

        const std::size_t done = n + 1;
        if (done % static_cast<std::size_t>(config.output_stride) == 0 || done == n_steps) {
            const double t = static_cast<double>(done) * dt;
            sampler.record(t, rho, worst_herm);
            worst_herm = 0.0;
            if (config.health.abort) {
                const double te = traj.trace_error.back();
                const double me = traj.min_eig.back();
                if (te > config.health.max_trace_error || me < config.health.min_eigenvalue ||
                    !std::isfinite(traj.theta.back())) {
                    throw TrajectoryAborted("numerical health violation at t = " + std::to_string(t) +
                                                ": trace error " + std::to_string(te) +
                                                ", min eigenvalue " + std::to_string(me),
                                            t, traj, rho);
                }
            }
        }
    }
    return traj;
}

double window_drift(const Trajectory& traj, double window_fraction) {
    if (traj.size() < 2) {
        return 0.0;
    }
    const double t_end = traj.times.back();
    const double t_start = t_end - window_fraction * (t_end - traj.times.front());
    double st = 0.0;
    double sy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] >= t_start) {
            st += traj.times[i];
            sy += traj.theta[i];
            ++count;
        }
    }
    if (count < 2) {
        return 0.0;
    }
    const double mt = st / static_cast<double>(count);
    const double my = sy / static_cast<double>(count);
    double sxy = 0.0;
    double sxx = 0.0;
    double lo = traj.times.back();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] >= t_start) {
            sxy += (traj.times[i] - mt) * (traj.theta[i] - my);
            sxx += (traj.times[i] - mt) * (traj.times[i] - mt);
            lo = std::min(lo, traj.times[i]);
        }
    }
    return sxx > 0.0 ? (sxy / sxx) * (t_end - lo) : 0.0;
}

double steady_state_value(const Trajectory& traj, const EvolutionConfig& config) {
    if (traj.size() == 0) {
        throw NotConvergedError("empty trajectory", 0.0);
    }
    const double fraction = config.steady_window_fraction;
    const double drift = window_drift(traj, fraction);
    if (std::abs(drift) > config.drift_tolerance) {
        throw NotConvergedError("theta still drifting by " + std::to_string(drift) +
                                    " across the final window",
                                drift);
    }
    const double t_end = traj.times.back();
    const double t_start = t_end - fraction * (t_end - traj.times.front());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] >= t_start) {
            sum += traj.theta[i];
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

} // namespace polaron
