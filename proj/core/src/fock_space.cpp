#include "polaron/fock_space.hpp"

#include <bit>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "polaron/errors.hpp"

namespace polaron {

FockSpace::FockSpace(int n_sites) : n_sites_(n_sites), dim_(0) {
    if (n_sites < kMinSites || n_sites > kMaxSites) {
        throw ConfigError("n_sites must lie in [" + std::to_string(kMinSites) + ", " +
                          std::to_string(kMaxSites) + "], got " + std::to_string(n_sites));
    }
    dim_ = Eigen::Index{1} << n_sites;
}

FockSpace build_space(int n_sites) { return FockSpace(n_sites); }

namespace {

void check_site(const FockSpace& space, int site) {
    if (site < 1 || site > space.n_sites()) {
        throw IndexError("site " + std::to_string(site) + " outside [1, " +
                         std::to_string(space.n_sites()) + "]");
    }
}

} // namespace

Operator annihilation_op(const FockSpace& space, int site) {
    check_site(space, site);
    const unsigned bit = static_cast<unsigned>(site - 1);
    const unsigned long long mask = 1ULL << bit;
    const unsigned long long lower = mask - 1;
    Operator c = space.zero();
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        const auto state = static_cast<unsigned long long>(s);
        if ((state & mask) == 0) {
            continue;
        }
        const double sign = (std::popcount(state & lower) % 2 == 0) ? 1.0 : -1.0;
        c(static_cast<Eigen::Index>(state ^ mask), s) = sign;
    }
    return c;
}

Operator creation_op(const FockSpace& space, int site) {
    return annihilation_op(space, site).adjoint();
}

Operator number_op(const FockSpace& space, int site) {
    check_site(space, site);
    const unsigned long long mask = 1ULL << static_cast<unsigned>(site - 1);
    Operator n = space.zero();
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        if (static_cast<unsigned long long>(s) & mask) {
            n(s, s) = 1.0;
        }
    }
    return n;
}

Operator parity_op(const FockSpace& space) {
    Operator p = space.zero();
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        p(s, s) = (std::popcount(static_cast<unsigned long long>(s)) % 2 == 0) ? 1.0 : -1.0;
    }
    return p;
}

double max_abs_diff(const Operator& a, const Operator& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Operator& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Eigensystem eigensystem(const Operator& h, double hermiticity_tol) {
    if (h.rows() != h.cols()) {
        throw ValidationError("eigensystem: matrix is not square");
    }
    const double defect = hermiticity_defect(h);
    if (defect > hermiticity_tol) {
        throw ValidationError("eigensystem: matrix is not Hermitian, max asymmetry " +
                              std::to_string(defect));
    }
    const Operator sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("eigensystem: Hermitian eigensolver failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Operator heisenberg_reversed(const Operator& x, const Eigensystem& es, double tau) {
    const Eigen::VectorXcd phase =
        (std::complex<double>(0.0, -tau) * es.values.cast<std::complex<double>>()).array().exp();
    Operator xe = es.vectors.adjoint() * x * es.vectors;
    // (e^{-iL tau} Xe e^{iL tau})_{mn} = e^{-i(l_m - l_n) tau} Xe_{mn}
    xe = phase.asDiagonal() * xe * phase.conjugate().asDiagonal();
    return es.vectors * xe * es.vectors.adjoint();
}

} // namespace polaron
