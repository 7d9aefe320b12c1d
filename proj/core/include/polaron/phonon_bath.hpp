// phonon_bath.hpp: superohmic phonon coupling, correlation function and
// Franck-Condon renormalization.
//
// Units: hbar = 1, time in ps, energy in 1/ps, momentum in 1/nm, c_s in nm/ps,
// temperature in K.

#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace polaron {

// hbar / k_B in ps K.
inline constexpr double kHbarOverKb = 7.638232577;

// Coupling amplitude g(k) without the 1/sqrt(V) factor.
using CouplingProfile = std::function<double(double k)>;

struct BathParams {
    double f_ph = 0.1;
    double sigma = 0.6;       // 1/nm
    double c_s = 7.3;         // nm/ps
    double temperature = 4.0; // K
    double k_min = 0.0;
    double k_max = 4.0;
    double norm_scale = 1.0;  // absorbs 1/V and angular factors
    int n_quad = 512;
    double hbar_over_kb = kHbarOverKb;
    // Empty means the Gaussian profile f_ph sqrt(k/sigma^2) exp(-k^2/sigma^2).
    CouplingProfile profile;

    void validate() const;
};

// f_ph sqrt(k / sigma^2) exp(-k^2 / sigma^2)
double coupling_gk(const BathParams& bath, double k);

// Precomputed quadrature for phi(tau). Immutable after construction.
class PhononBath {
public:
    explicit PhononBath(const BathParams& params);

    const BathParams& params() const noexcept { return params_; }

    // Radial integrand of Re phi(0) at momentum k, including the k -> 0 limit.
    double thermal_density(double k) const;

    // Unchecked evaluation on the configured grid.
    std::complex<double> phi(double tau) const;

    // Relative change of phi(tau) when the node count is doubled.
    double convergence_defect(double tau) const;

private:
    BathParams params_;
    std::vector<double> omega_;
    std::vector<double> w_cos_; // weight * density * coth
    std::vector<double> w_sin_; // weight * density
};

// Checked evaluation: throws AccuracyError when doubling n_quad moves the
// result by more than 1e-8 relative to the correlation amplitude.
std::complex<double> phi(const BathParams& bath, double tau);

// exp(-Re phi(0) / 2)
double franck_condon_B(const BathParams& bath);

struct CorrelationTable {
    double dt = 0.0;
    // phi(m dt / 2), m = 0 .. 2M
    std::vector<std::complex<double>> values;

    double tau(std::size_t m) const noexcept { return 0.5 * dt * static_cast<double>(m); }
    // Largest time reachable by the table.
    double t_max() const noexcept { return tau(values.empty() ? 0 : values.size() - 1); }
};

CorrelationTable correlation_table(const BathParams& bath, double dt, double t_max);

// norm_scale giving franck_condon_B == target_b for the reference bath.
double calibrate_scale(const BathParams& bath_ref, double target_b);

// First time at which |phi(tau)| / phi(0) drops below `fraction`.
double memory_time(const BathParams& bath, double fraction = 0.36787944117144233);

// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace polaron
