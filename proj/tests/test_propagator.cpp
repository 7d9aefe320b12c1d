#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "polaron/errors.hpp"
#include "polaron/observables.hpp"
#include "polaron/propagator.hpp"
#include "support.hpp"

using namespace polaron;
using testing_support::calibrated_scale;
using testing_support::model_for;
using testing_support::unit_config;

namespace {

const std::complex<double> I(0.0, 1.0);

Operator random_state(Eigen::Index dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Operator a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            a(i, j) = {n(rng), n(rng)};
        }
    }
    Operator rho = a * a.adjoint();
    return rho / rho.trace();
}

// From-scratch composite Simpson of int_0^{n dt} w(phi(tau)) e^{-iH tau} X e^{iH tau} dtau,
// with the propagator from a dense matrix exponential.
Operator simpson_oracle(const BathParams& bath, const Operator& h, const Operator& x, double dt, int n,
                        bool cosh_weight) {
    Operator sum = Operator::Zero(h.rows(), h.cols());
    const Operator u_half = (-I * (0.5 * dt) * h).exp();
    Operator u = Operator::Identity(h.rows(), h.cols());
    std::vector<Operator> f;
    for (int m = 0; m <= 2 * n; ++m) {
        const std::complex<double> p = phi(bath, 0.5 * dt * m);
        const std::complex<double> w = cosh_weight ? std::cosh(p) - 1.0 : std::sinh(p);
        f.push_back(w * (u * x * u.adjoint()));
        u = u * u_half;
    }
    for (int k = 0; k < n; ++k) {
        sum += dt / 6.0 * (f[2 * k] + 4.0 * f[2 * k + 1] + f[2 * k + 2]);
    }
    return sum;
}

EvolutionConfig resolved(EvolutionConfig ev, const EvolutionModel& model, double J = 1.0) {
    return resolve_config(ev, model, J);
}

} // namespace

TEST(Variants, NamesRoundTrip) {
    for (Variant v : {Variant::full_memory, Variant::markovian_limit, Variant::lindblad, Variant::unitary_quench}) {
        EXPECT_EQ(parse_variant(to_string(v)), v);
    }
    EXPECT_THROW(parse_variant("secular"), ConfigError);
}

TEST(Accumulators, StayZeroWithoutCoupling) {
    ScenarioConfig cfg = unit_config();
    cfg.bath.f_ph = 0.0;
    const EvolutionModel m = model_for(cfg, 1.0);
    const CorrelationTable table = correlation_table(m.bath, 0.01, 1.0);
    KernelAccumulators acc = KernelAccumulators::zero(16);
    for (int n = 0; n < 100; ++n) {
        acc = accumulators_advance(acc, table, m.es, m.x.x_a, m.x.x_b, 0.01);
    }
    EXPECT_EQ(acc.k_a.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(acc.k_b.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(acc.t_current, 1.0, 1e-12);
    EXPECT_EQ(acc.step, 100u);
}

TEST(Accumulators, OneStepMatchesDirectQuadrature) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const double dt = 0.004;
    const CorrelationTable table = correlation_table(m.bath, dt, dt);
    const KernelAccumulators acc = accumulators_advance(KernelAccumulators::zero(16), table, m.es, m.x.x_a, m.x.x_b, dt);
    EXPECT_LT(max_abs_diff(acc.k_a, simpson_oracle(m.bath, m.h_sys, m.x.x_a, dt, 1, true)), 1e-12);
    EXPECT_LT(max_abs_diff(acc.k_b, simpson_oracle(m.bath, m.h_sys, m.x.x_b, dt, 1, false)), 1e-12);
}

TEST(Accumulators, FiveHundredStepsMatchFromScratchSimpson) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const double dt = 0.004;
    const int n = 500;
    const CorrelationTable table = correlation_table(m.bath, dt, n * dt);
    KernelAccumulators acc = KernelAccumulators::zero(16);
    for (int k = 0; k < n; ++k) {
        acc = accumulators_advance(acc, table, m.es, m.x.x_a, m.x.x_b, dt);
    }
    EXPECT_LT(max_abs_diff(acc.k_a, simpson_oracle(m.bath, m.h_sys, m.x.x_a, dt, n, true)), 1e-8);
    EXPECT_LT(max_abs_diff(acc.k_b, simpson_oracle(m.bath, m.h_sys, m.x.x_b, dt, n, false)), 1e-8);
    EXPECT_THROW(accumulators_advance(acc, table, m.es, m.x.x_a, m.x.x_b, dt), RangeError);
    EXPECT_THROW(accumulators_advance(KernelAccumulators::zero(16), table, m.es, m.x.x_a, m.x.x_b, 2 * dt),
                 RangeError);
}

TEST(Accumulators, MidpointUsesQuadraticInterpolant) {
    // For an integrand that is exactly quadratic the half-step value is exact;
    // here check consistency with a much finer Simpson rule over [0, dt/2].
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const double dt = 0.002;
    const CorrelationTable table = correlation_table(m.bath, dt, dt);
    const KernelStep s =
        accumulators_advance_with_midpoint(KernelAccumulators::zero(16), table, m.es, m.x.x_a, m.x.x_b, dt);
    const Operator fine = simpson_oracle(m.bath, m.h_sys, m.x.x_a, dt / 64.0, 32, true);
    EXPECT_LT(max_abs_diff(s.mid.k_a, fine), 1e-6 * fine.cwiseAbs().maxCoeff());
    EXPECT_NEAR(s.mid.t_current, dt / 2.0, 1e-15);
}

TEST(Markovian, CoefficientsStartAtZeroAndSaturate) {
    BathParams bath;
    bath.norm_scale = calibrated_scale();
    const double dt = 0.002;
    const double t_long = 20.0 / (bath.c_s * bath.sigma);
    const CorrelationTable table = correlation_table(bath, dt, t_long);
    const MarkovianCoefficients zero = markovian_coefficients(table, 0);
    EXPECT_EQ(zero.c_a, 0.0);
    EXPECT_EQ(zero.c_b, 0.0);
    const std::size_t last = table.values.size() - 1;
    const MarkovianCoefficients a = markovian_coefficients(table, last - 200);
    const MarkovianCoefficients b = markovian_coefficients(table, last);
    EXPECT_LT(std::abs(b.c_a - a.c_a), 1e-3 * std::abs(b.c_a));
    EXPECT_LT(std::abs(b.c_b - a.c_b), 1e-3 * std::abs(b.c_b) + 1e-9);
    EXPECT_THROW(markovian_coefficients(table, last + 1), RangeError);
}

TEST(Liouvillian, FullWithZeroKernelsIsVonNeumann) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const Operator rho = random_state(16, 4);
    const Operator l = liouvillian_full(rho, m.h_sys, m.x, KernelAccumulators::zero(16), m.B);
    EXPECT_LT(max_abs_diff(l, -I * commutator(m.h_sys, rho)), 1e-13);
}

TEST(Liouvillian, MaximallyMixedIsStationaryUnderUnitaryFlow) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const Operator mixed = m.space.identity() / 16.0;
    EXPECT_LT(liouvillian_full(mixed, m.h_sys, m.x, KernelAccumulators::zero(16), m.B).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Liouvillian, AllVariantsAreTraceFreeAndHermitian) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const double dt = 0.01;
    const CorrelationTable table = correlation_table(m.bath, dt, 1.0);
    KernelAccumulators acc = KernelAccumulators::zero(16);
    for (int k = 0; k < 30; ++k) {
        acc = accumulators_advance(acc, table, m.es, m.x.x_a, m.x.x_b, dt);
    }
    for (unsigned seed = 0; seed < 10; ++seed) {
        const Operator rho = random_state(16, seed);
        const Operator outs[] = {liouvillian_full(rho, m.h_sys, m.x, acc, m.B),
                                 liouvillian_markovian(rho, m.h_sys, m.x, table, 0.3, m.B),
                                 liouvillian_lindblad(rho, m.h_sys, 0.7, m.space),
                                 liouvillian_unitary(rho, m.h_sys)};
        for (const Operator& l : outs) {
            EXPECT_LT(std::abs(l.trace()), 1e-12);
            EXPECT_LT(hermiticity_defect(l), 1e-12);
        }
    }
    EXPECT_THROW(liouvillian_markovian(random_state(16, 1), m.h_sys, m.x, table, 0.0031, m.B), RangeError);
}

TEST(Liouvillian, MarkovianAtZeroTimeIsUnitary) {
    const ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    const CorrelationTable table = correlation_table(m.bath, 0.01, 0.1);
    const Operator rho = random_state(16, 9);
    EXPECT_LT(max_abs_diff(liouvillian_markovian(rho, m.h_sys, m.x, table, 0.0, m.B), liouvillian_unitary(rho, m.h_sys)),
              1e-15);
}

TEST(Liouvillian, LindbladLimitsAndDiagonalStates) {
    const FockSpace s = build_space(4);
    const Operator h = build_kitaev(s, 1.0, 0.5, 0.2);
    const Operator rho = random_state(16, 3);
    EXPECT_LT(max_abs_diff(liouvillian_lindblad(rho, h, 0.0, s), liouvillian_unitary(rho, h)), 1e-15);
    EXPECT_THROW(liouvillian_lindblad(rho, h, -1.0, s), ConfigError);

    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd d(16);
    for (auto& v : d) {
        v = u(rng);
    }
    const Operator diag_rho = (d / d.sum()).cast<std::complex<double>>().asDiagonal();
    Operator diag_h = Operator::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        diag_h(i, i) = u(rng);
    }
    EXPECT_LT(liouvillian_lindblad(diag_rho, diag_h, 2.0, s).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Liouvillian, UnitaryAnnihilatesEigenprojectors) {
    const FockSpace s = build_space(4);
    const Operator h = build_kitaev(s, 1.0, 0.3, 0.1);
    const Eigensystem es = eigensystem(h);
    const Operator p = es.vectors.col(3) * es.vectors.col(3).adjoint();
    EXPECT_LT(liouvillian_unitary(p, h).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Rk4, UnitaryStepMatchesExactPropagator) {
    const FockSpace s = build_space(4);
    const Operator h = build_kitaev(s, 1.0, 0.6, 0.3);
    const Eigensystem es = eigensystem(h);
    const Operator rho = random_state(16, 8);
    const double dt = 1e-3;
    auto f = [&](const Operator& r) { return liouvillian_unitary(r, h); };
    const Operator next = rk4_step(rho, dt, {f, f, f});
    const Operator u = es.vectors *
                       (std::complex<double>(0.0, -dt) * es.values.cast<std::complex<double>>()).array().exp().matrix().asDiagonal() *
                       es.vectors.adjoint();
    EXPECT_LT(max_abs_diff(next, u * rho * u.adjoint()), 1e-10);
}

TEST(Rk4, FourthOrderGlobalConvergence) {
    const FockSpace s = build_space(4);
    const Operator h = build_kitaev(s, 1.0, 0.6, 0.3);
    const Operator rho0 = random_state(16, 12);
    auto f = [&](const Operator& r) { return liouvillian_lindblad(r, h, 0.4, s); };
    auto evolve = [&](int steps) {
        Operator r = rho0;
        for (int k = 0; k < steps; ++k) {
            r = rk4_step(r, 1.0 / steps, {f, f, f});
        }
        return r;
    };
    const Operator a = evolve(20), b = evolve(40), c = evolve(80);
    const double ratio = max_abs_diff(a, b) / max_abs_diff(b, c);
    EXPECT_NEAR(ratio, 16.0, 3.0);
}

TEST(Rk4, ReportsPreSymmetrizationDefect) {
    const FockSpace s = build_space(2);
    const Operator h = build_kitaev(s, 1.0, 1.0, 0.0);
    auto f = [&](const Operator& r) { return liouvillian_unitary(r, h); };
    double defect = -1.0;
    const Operator out = rk4_step(random_state(4, 1), 0.01, {f, f, f}, &defect);
    EXPECT_GE(defect, 0.0);
    EXPECT_LT(defect, 1e-14);
    EXPECT_EQ(hermiticity_defect(out), 0.0);
}

class ClosedSystem : public ::testing::Test {
protected:
    static Trajectory run(Variant v) {
        ScenarioConfig cfg = unit_config();
        cfg.bath.f_ph = 0.0;
        const EvolutionModel m = model_for(cfg, 1.0);
        EvolutionConfig ev;
        ev.variant = v;
        ev.output_stride = 25;
        return run_trajectory(resolved(ev, m), m);
    }
};

TEST_F(ClosedSystem, ThetaStaysOneAndVariantsAgree) {
    const Trajectory full = run(Variant::full_memory);
    EXPECT_NEAR(full.times.back(), 50.0, 1e-9);
    for (double th : full.theta) {
        EXPECT_NEAR(th, 1.0, 1e-8);
    }
    for (Variant v : {Variant::markovian_limit, Variant::lindblad, Variant::unitary_quench}) {
        const Trajectory other = run(v);
        ASSERT_EQ(other.size(), full.size());
        for (std::size_t i = 0; i < full.size(); ++i) {
            EXPECT_NEAR(other.theta[i], full.theta[i], 1e-10);
        }
    }
}

TEST(Trajectory, FullMemoryConservesTraceParityAndHermiticity) {
    ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    EvolutionConfig ev;
    ev.t_max = 10.0;
    ev.health.abort = false;
    const Trajectory t = run_trajectory(resolved(ev, m), m);
    ASSERT_GT(t.size(), 2u);
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_GT(t.times[i], t.times[i - 1]);
        EXPECT_LT(t.trace_error[i], 1e-8);
        EXPECT_LT(std::abs(t.parity[i] - t.parity[0]), 1e-8);
        EXPECT_LT(t.hermiticity_defect[i], 1e-11);
        EXPECT_LT(std::abs(t.theta_imag[i]), 1e-9);
    }
    EXPECT_LT(t.purity[t.size() / 2], 1.0);
}

TEST(Trajectory, LindbladStaysPhysicalAndUnitaryStaysPure) {
    ScenarioConfig cfg = unit_config();
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    EvolutionConfig ev;
    ev.t_max = 20.0;
    ev.variant = Variant::lindblad;
    ev.lindblad_rate = 0.3;
    const Trajectory l = run_trajectory(resolved(ev, m), m);
    for (std::size_t i = 0; i < l.size(); ++i) {
        EXPECT_GE(l.min_eig[i], -1e-10);
        EXPECT_LE(std::abs(l.theta[i]), 1.0 + 1e-6);
    }
    EXPECT_LT(l.theta.back(), 0.5);
    // RK4 is not exactly norm preserving; a quarter of the default step keeps
    // the purity defect below 1e-10 over the full run
    ev.variant = Variant::unitary_quench;
    ev.t_max = 0.0;
    ev.dt = 0.25 * max_stable_dt(m);
    const Trajectory u = run_trajectory(resolved(ev, m), m);
    for (double p : u.purity) {
        EXPECT_NEAR(p, 1.0, 1e-10);
    }
}

TEST(Trajectory, SamplesEveryStrideAndAtTheEnd) {
    const EvolutionModel m = model_for(unit_config(), calibrated_scale());
    EvolutionConfig ev;
    ev.variant = Variant::unitary_quench;
    ev.t_max = 1.0;
    ev.dt = 0.001;
    ev.output_stride = 300;
    const Trajectory t = run_trajectory(resolved(ev, m), m);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_NEAR(t.times[3], 0.9, 1e-12);
    EXPECT_NEAR(t.times[4], 1.0, 1e-12);
    EXPECT_EQ(t.theta.size(), t.size());
    EXPECT_EQ(t.min_eig.size(), t.size());
}

TEST(Trajectory, HealthViolationAbortsWithPartialTrajectory) {
    ScenarioConfig cfg;
    cfg.bath.sigma = 0.2;
    const EvolutionModel m = model_for(cfg, calibrated_scale());
    EvolutionConfig ev;
    ev.t_max = 2.0;
    ev.health.min_eigenvalue = -1e-3;
    try {
        run_trajectory(resolve_config(ev, m, cfg.chain.J), m);
        FAIL() << "expected an abort";
    } catch (const TrajectoryAborted& e) {
        EXPECT_GT(e.partial().size(), 1u);
        EXPECT_LT(e.partial().min_eig.back(), -1e-3);
        EXPECT_EQ(e.rho().rows(), 16);
        EXPECT_GT(e.time(), 0.0);
    }
}

TEST(Resolve, DefaultsAndResolutionBound) {
    const EvolutionModel m = model_for(unit_config(), calibrated_scale());
    const EvolutionConfig ev = resolved({}, m);
    EXPECT_NEAR(ev.t_max, 50.0, 1e-12);
    EXPECT_LE(ev.dt, max_stable_dt(m) * (1.0 + 1e-12));
    EXPECT_NEAR(std::round(ev.t_max / ev.dt) * ev.dt, ev.t_max, 1e-9);
    EvolutionConfig coarse;
    coarse.dt = 2.0 * max_stable_dt(m);
    EXPECT_THROW(resolved(coarse, m), ConfigError);
    const double radius = m.es.values.cwiseAbs().maxCoeff();
    EXPECT_LE(max_stable_dt(m), 0.02 / radius);
    EXPECT_LE(max_stable_dt(m), 0.02 * memory_time(m.bath));
}

TEST(SteadyState, ConstantAndOscillatingSignals) {
    Trajectory t;
    for (int i = 0; i <= 1000; ++i) {
        t.times.push_back(0.01 * i);
        t.theta.push_back(0.5);
    }
    EvolutionConfig ev;
    EXPECT_DOUBLE_EQ(steady_state_value(t, ev), 0.5);

    // final window [8, 10] holds four whole periods of a 0.5-period sinusoid
    for (int i = 0; i <= 1000; ++i) {
        t.theta[i] = 0.3 + 0.05 * std::sin(2.0 * M_PI * t.times[i] / 0.5);
    }
    // a linear fit over whole periods still tilts
    ev.drift_tolerance = 0.1;
    EXPECT_NEAR(steady_state_value(t, ev), 0.3, 0.05 / 4.0);
}

TEST(SteadyState, DriftingWindowIsRejected) {
    Trajectory t;
    for (int i = 0; i <= 100; ++i) {
        t.times.push_back(0.1 * i);
        t.theta.push_back(0.01 * i);
    }
    EXPECT_NEAR(window_drift(t, 0.2), 0.2, 1e-12);
    try {
        steady_state_value(t, EvolutionConfig{});
        FAIL();
    } catch (const NotConvergedError& e) {
        EXPECT_NEAR(e.drift(), 0.2, 1e-12);
    }
}
