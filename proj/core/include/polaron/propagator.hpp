// propagator.hpp: integration of the polaron master equation and its
// comparator variants.
//
// The dissipator only involves rho at the outer time, so the memory is carried
// by two operator-valued integrals
//   K_a(t) = int_0^t dtau (cosh phi(tau) - 1) X_a(-tau)
//   K_b(t) = int_0^t dtau  sinh phi(tau)      X_b(-tau)
// advanced incrementally with Simpson's rule on the half-step grid of the
// correlation table.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polaron/chain_model.hpp"
#include "polaron/errors.hpp"
#include "polaron/fock_space.hpp"
#include "polaron/phonon_bath.hpp"

namespace polaron {

enum class Variant { full_memory, markovian_limit, lindblad, unitary_quench };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view name);

struct HealthLimits {
    double max_trace_error = 1e-6;
    double min_eigenvalue = -1e-2;
    bool abort = true;
};

struct EvolutionConfig {
    Variant variant = Variant::full_memory;
    double dt = 0.0;    // 0 selects the largest step satisfying the resolution bound
    double t_max = 0.0; // 0 means 50 / J
    double lindblad_rate = 0.0;
    double steady_window_fraction = 0.2;
    double drift_tolerance = 1e-3;
    int output_stride = 10;
    HealthLimits health;
};

// Precomputed X(-tau) = e^{-iH tau} X e^{iH tau} for a fixed X and H.
class HeisenbergEvolver {
public:
    HeisenbergEvolver(const Operator& x, const Eigensystem& es);
    Operator at(double tau) const;

private:
    Eigensystem es_;
    Operator x_eig_;
};

struct KernelAccumulators {
    Operator k_a;
    Operator k_b;
    double t_current = 0.0;
    std::size_t step = 0; // number of completed steps of the table's dt

    static KernelAccumulators zero(Eigen::Index dim);
};

struct KernelStep {
    KernelAccumulators mid; // at t + dt/2
    KernelAccumulators end; // at t + dt
};

// One dt of Simpson quadrature; `mid` uses the quadratic interpolant through
// the same three nodes over the first half-step.
KernelStep accumulators_advance_with_midpoint(const KernelAccumulators& acc, const CorrelationTable& table,
                                              const Eigensystem& es, const Operator& x_a,
                                              const Operator& x_b, double dt);

KernelAccumulators accumulators_advance(const KernelAccumulators& acc, const CorrelationTable& table,
                                        const Eigensystem& es, const Operator& x_a, const Operator& x_b,
                                        double dt);

// Scalar kernel of the Markovian limit: c_a = int_0^t (cosh phi - 1), c_b = int_0^t sinh phi,
// evaluated at tau = m dt / 2.
struct MarkovianCoefficients {
    std::complex<double> c_a;
    std::complex<double> c_b;
};
MarkovianCoefficients markovian_coefficients(const CorrelationTable& table, std::size_t half_steps);

// B^2 ([X_a, K_a rho] - [X_b, K_b rho]) + h.c.
Operator memory_dissipator(const Operator& rho, const CollectiveOps& x, const Operator& k_a,
                           const Operator& k_b, double B);

Operator liouvillian_full(const Operator& rho, const Operator& h_sys, const CollectiveOps& x,
                          const KernelAccumulators& acc, double B);

// t must lie on the table's half-step grid.
Operator liouvillian_markovian(const Operator& rho, const Operator& h_sys, const CollectiveOps& x,
                               const CorrelationTable& table, double t, double B);

Operator liouvillian_lindblad(const Operator& rho, const Operator& h_sys, double rate,
                              const std::vector<Operator>& number_ops);
Operator liouvillian_lindblad(const Operator& rho, const Operator& h_sys, double rate, const FockSpace& space);

Operator liouvillian_unitary(const Operator& rho, const Operator& h_quench);

// Liouvillians evaluated at t, t + dt/2 and t + dt.
struct StageLiouvillians {
    std::function<Operator(const Operator&)> start;
    std::function<Operator(const Operator&)> mid;
    std::function<Operator(const Operator&)> end;
};

// Classical RK4. The result is Hermitian-symmetrized; the trace is left alone.
// `hermiticity_defect_out`, when given, receives the pre-symmetrization defect.
Operator rk4_step(const Operator& rho, double dt, const StageLiouvillians& stages,
                  double* hermiticity_defect_out = nullptr);

// Everything a trajectory needs besides the run configuration.
struct EvolutionModel {
    FockSpace space{2};
    Operator h_sys;   // renormalized Hamiltonian, optionally with H_int
    CollectiveOps x;
    double B = 1.0;
    Eigensystem es;   // of h_sys
    BathParams bath;
    MajoranaPair pair;
    DensityMatrix rho0 = DensityMatrix::unchecked(Operator());
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> theta;
    std::vector<double> purity;
    std::vector<double> parity;
    std::vector<double> trace_error;
    std::vector<double> min_eig;
    std::vector<double> hermiticity_defect; // largest pre-symmetrization defect since the last sample
    std::vector<double> theta_imag;
    double dt = 0.0;

    std::size_t size() const noexcept { return times.size(); }
};

class TrajectoryAborted : public HealthError {
public:
    TrajectoryAborted(const std::string& what, double time, Trajectory partial, Operator rho)
        : HealthError(what, time), partial_(std::move(partial)), rho_(std::move(rho)) {}
    const Trajectory& partial() const noexcept { return partial_; }
    const Operator& rho() const noexcept { return rho_; }

private:
    Trajectory partial_;
    Operator rho_;
};

// Largest dt allowed by the resolution bound 0.02 / max(||H||, 1 / memory time).
double max_stable_dt(const EvolutionModel& model);

// Applies the t_max and dt defaults and validates the result.
EvolutionConfig resolve_config(EvolutionConfig config, const EvolutionModel& model, double J);

Trajectory run_trajectory(const EvolutionConfig& config, const EvolutionModel& model);

// Linear-fit change of theta across the final window.
double window_drift(const Trajectory& traj, double window_fraction);

// Mean theta over the final window; NotConvergedError when the window drifts.
double steady_state_value(const Trajectory& traj, const EvolutionConfig& config);

} // namespace polaron
