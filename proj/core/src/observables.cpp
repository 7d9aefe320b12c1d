#include "polaron/observables.hpp"

#include <bit>
#include <complex>

#include <Eigen/Eigenvalues>

#include "polaron/errors.hpp"

namespace polaron {

namespace {

// Tr(a b) without forming the product.
std::complex<double> trace_product(const Operator& a, const Operator& b) {
    return (a.transpose().array() * b.array()).sum();
}

} // namespace

Operator edge_correlation_op(const MajoranaPair& pair) {
    return std::complex<double>(0.0, -1.0) * pair.gamma_left * pair.gamma_right;
}

ThetaValue theta_value(const Operator& rho, const MajoranaPair& pair) {
    if (rho.rows() != pair.gamma_left.rows() || rho.cols() != pair.gamma_left.cols()) {
        throw ValidationError("theta: density matrix and Majorana pair dimensions differ");
    }
    const std::complex<double> v = trace_product(rho, edge_correlation_op(pair));
    return {v.real(), v.imag()};
}

double theta(const DensityMatrix& rho, const MajoranaPair& pair) {
    return theta_value(rho.matrix(), pair).value;
}

HealthReport health(const Operator& rho, const FockSpace& space) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
        throw ValidationError("health: density matrix does not match the Fock space");
    }
    HealthReport report;
    report.trace_error = std::abs(rho.trace() - 1.0);
    report.hermiticity_defect = hermiticity_defect(rho);
    const Operator sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues()(0);
    report.purity = trace_product(sym, sym).real();
    double parity = 0.0;
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        const double sign = (std::popcount(static_cast<unsigned long long>(s)) % 2 == 0) ? 1.0 : -1.0;
        parity += sign * rho(s, s).real();
    }
    report.parity = parity;
    return report;
}

std::vector<double> occupations(const Operator& rho, const FockSpace& space) {
    std::vector<double> n(static_cast<std::size_t>(space.n_sites()), 0.0);
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        const double p = rho(s, s).real();
        for (int l = 0; l < space.n_sites(); ++l) {
            if ((static_cast<unsigned long long>(s) >> l) & 1ULL) {
                n[static_cast<std::size_t>(l)] += p;
            }
        }
    }
    return n;
}

} // namespace polaron
