#include "polaron/chain_model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "polaron/errors.hpp"

namespace polaron {

void ChainParams::validate() const {
    if (!std::isfinite(J) || !std::isfinite(delta) || !std::isfinite(mu) || !std::isfinite(U)) {
        throw ConfigError("chain parameters must be finite");
    }
    if (J <= 0.0) {
        throw ConfigError("chain.J must be positive, got " + std::to_string(J));
    }
    FockSpace{n_sites};
}

bool ChainParams::topological() const noexcept {
    return std::abs(mu) < 2.0 * J && delta != 0.0;
}

Operator build_kitaev(const FockSpace& space, double J, double delta_eff, double mu) {
    const int n = space.n_sites();
    std::vector<Operator> c;
    c.reserve(static_cast<std::size_t>(n));
    for (int l = 1; l <= n; ++l) {
        c.push_back(annihilation_op(space, l));
    }
    Operator h = space.zero();
    for (int l = 0; l + 1 < n; ++l) {
        const Operator bond = -J * c[l].adjoint() * c[l + 1] + delta_eff * c[l] * c[l + 1];
        h += bond + bond.adjoint();
    }
    for (int l = 0; l < n; ++l) {
        h -= mu * c[l].adjoint() * c[l];
    }
    return h;
}

Operator build_interaction(const FockSpace& space, double U) {
    Operator h = space.zero();
    const Operator half = 0.5 * space.identity();
    for (int l = 1; l < space.n_sites(); ++l) {
        h += U * (number_op(space, l) - half) * (number_op(space, l + 1) - half);
    }
    return h;
}

CollectiveOps build_collective_X(const FockSpace& space, double J) {
    Operator pair_create = space.zero();
    Operator pair_annihilate = space.zero();
    for (int l = 1; l < space.n_sites(); ++l) {
        pair_create += creation_op(space, l) * creation_op(space, l + 1);
        pair_annihilate += annihilation_op(space, l + 1) * annihilation_op(space, l);
    }
    return {-J * (pair_create + pair_annihilate), J * (pair_create - pair_annihilate)};
}

std::vector<Operator> majorana_operators(const FockSpace& space) {
    const std::complex<double> minus_i(0.0, -1.0);
    std::vector<Operator> a;
    a.reserve(2 * static_cast<std::size_t>(space.n_sites()));
    for (int j = 1; j <= space.n_sites(); ++j) {
        const Operator c = annihilation_op(space, j);
        a.push_back(c + c.adjoint());
        a.push_back(minus_i * (c - c.adjoint()));
    }
    return a;
}

Eigen::MatrixXd majorana_matrix(const Operator& h, const FockSpace& space) {
    // [H, a_k] = -i sum_j A_kj a_j and Tr(a_j a_m) = dim delta_jm
    const auto a = majorana_operators(space);
    const auto m = static_cast<Eigen::Index>(a.size());
    const double inv_dim = 1.0 / static_cast<double>(space.dim());
    Eigen::MatrixXd A(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Operator comm = commutator(h, a[static_cast<std::size_t>(k)]);
        for (Eigen::Index j = 0; j < m; ++j) {
            const std::complex<double> tr = (comm * a[static_cast<std::size_t>(j)]).trace();
            A(k, j) = (std::complex<double>(0.0, 1.0) * tr).real() * inv_dim;
        }
    }
    return 0.5 * (A - A.transpose());
}

MajoranaPair assemble_pair(const FockSpace& space, Eigen::VectorXd f_left, Eigen::VectorXd f_right) {
    const auto a = majorana_operators(space);
    if (f_left.size() != static_cast<Eigen::Index>(a.size()) ||
        f_right.size() != static_cast<Eigen::Index>(a.size())) {
        throw ValidationError("Majorana coefficient vectors must have 2N entries");
    }
    MajoranaPair pair;
    pair.gamma_left = space.zero();
    pair.gamma_right = space.zero();
    for (std::size_t j = 0; j < a.size(); ++j) {
        pair.gamma_left += f_left(static_cast<Eigen::Index>(j)) * a[j];
        pair.gamma_right += f_right(static_cast<Eigen::Index>(j)) * a[j];
    }
    pair.f_left = std::move(f_left);
    pair.f_right = std::move(f_right);
    return pair;
}

namespace {

// Ground state of h restricted to the even-parity sector.
Eigen::VectorXcd even_ground_state(const Operator& h, const FockSpace& space) {
    const Operator p = parity_op(space);
    std::vector<Eigen::Index> even;
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
        if (p(s, s).real() > 0.0) {
            even.push_back(s);
        }
    }
    const auto ne = static_cast<Eigen::Index>(even.size());
    Operator block(ne, ne);
    for (Eigen::Index i = 0; i < ne; ++i) {
        for (Eigen::Index j = 0; j < ne; ++j) {
            block(i, j) = h(even[static_cast<std::size_t>(i)], even[static_cast<std::size_t>(j)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Operator> solver(block);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.dim());
    for (Eigen::Index i = 0; i < ne; ++i) {
        psi(even[static_cast<std::size_t>(i)]) = solver.eigenvectors()(i, 0);
    }
    return psi;
}

double pure_theta(const Eigen::VectorXcd& psi, const MajoranaPair& pair) {
    const std::complex<double> v = psi.dot(pair.gamma_left * (pair.gamma_right * psi));
    return (std::complex<double>(0.0, -1.0) * v).real();
}

} // namespace

MajoranaPair majorana_edge_modes(const FockSpace& space, const ChainParams& params, double delta_eff,
                                 const EdgeModeOptions& options) {
    if (std::abs(params.mu) >= 2.0 * params.J || delta_eff == 0.0) {
        throw ModeError("parameters outside the topological regime (|mu| < 2J, delta != 0): mu = " +
                        std::to_string(params.mu) + ", delta_eff = " + std::to_string(delta_eff));
    }
    const Operator h = build_kitaev(space, params.J, delta_eff, params.mu);
    const Eigen::MatrixXd A = majorana_matrix(h, space);

    // -A^2 = A^T A has eigenvalues eps_k^2, each twice
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A.transpose() * A);
    const Eigen::VectorXd eps2 = solver.eigenvalues().cwiseMax(0.0);
    const double zero_mode = std::sqrt(eps2(1));
    const double bulk = std::sqrt(eps2(2));
    if (!(zero_mode < options.max_zero_mode_ratio * bulk)) {
        throw ModeError("no zero-mode pair separated from the bulk: lowest mode " +
                        std::to_string(zero_mode) + ", bulk gap " + std::to_string(bulk));
    }
    const Eigen::MatrixXd u = solver.eigenvectors().leftCols(2);

    // Rotate within the pair to maximize the left-half weight.
    const Eigen::Index half = space.n_sites();
    const Eigen::Matrix2d left_weight = u.topRows(half).transpose() * u.topRows(half);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> rot(left_weight);
    Eigen::VectorXd f_left = u * rot.eigenvectors().col(1);
    Eigen::VectorXd f_right = u * rot.eigenvectors().col(0);
    f_left.normalize();
    f_right.normalize();

    Eigen::Index peak = 0;
    f_left.cwiseAbs().maxCoeff(&peak);
    if (f_left(peak) < 0.0) {
        f_left = -f_left;
    }

    MajoranaPair pair = assemble_pair(space, f_left, f_right);
    if (pure_theta(even_ground_state(h, space), pair) < 0.0) {
        pair = assemble_pair(space, std::move(f_left), -f_right);
    }
    pair.zero_mode_energy = zero_mode;
    pair.bulk_gap = bulk;
    return pair;
}

MajoranaPair edge_truncated(const FockSpace& space, const MajoranaPair& pair) {
    const Eigen::Index m = pair.f_left.size();
    Eigen::VectorXd left = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd right = Eigen::VectorXd::Zero(m);
    left.head(2) = pair.f_left.head(2);
    right.tail(2) = pair.f_right.tail(2);
    if (left.norm() == 0.0 || right.norm() == 0.0) {
        throw ModeError("edge truncation removes all weight from a Majorana mode");
    }
    left.normalize();
    right.normalize();
    MajoranaPair out = assemble_pair(space, std::move(left), std::move(right));
    out.zero_mode_energy = pair.zero_mode_energy;
    out.bulk_gap = pair.bulk_gap;
    return out;
}

DensityMatrix::DensityMatrix(Operator m, double tol, double min_eig_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ValidationError("density matrix must be square");
    }
    const double herm = hermiticity_defect(m_);
    if (herm > tol) {
        throw ValidationError("density matrix not Hermitian, defect " + std::to_string(herm));
    }
    const double trace_err = std::abs(m_.trace() - 1.0);
    if (trace_err > tol) {
        throw ValidationError("density matrix trace deviates from 1 by " + std::to_string(trace_err));
    }
    Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues()(0) < -min_eig_tol) {
        throw ValidationError("density matrix has negative eigenvalue " +
                              std::to_string(solver.eigenvalues()(0)));
    }
}

DensityMatrix DensityMatrix::unchecked(Operator m) { return DensityMatrix(std::move(m), Unchecked{}); }

DensityMatrix initial_ground_state(const Operator& h_init, const MajoranaPair& pair,
                                   const GroundStateOptions& options) {
    if (pair.gamma_left.rows() != h_init.rows()) {
        throw ValidationError("Majorana pair and Hamiltonian live on different spaces");
    }
    const Eigensystem es = eigensystem(h_init);
    if (es.values.size() < 3) {
        throw DegeneracyError("spectrum too small to hold a ground doublet");
    }
    const double gap = es.values(2) - es.values(1);
    if (!(gap > options.doublet_gap * options.J)) {
        throw DegeneracyError("ground doublet not separated from the third level: gap " +
                              std::to_string(gap));
    }
    const Eigen::MatrixXcd ground = es.vectors.leftCols(2);
    const std::complex<double> minus_i(0.0, -1.0);
    const Operator corr = minus_i * pair.gamma_left * pair.gamma_right;
    const Eigen::Matrix2cd block = ground.adjoint() * corr * ground;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(0.5 * (block + block.adjoint()));
    Eigen::VectorXcd psi = ground * solver.eigenvectors().col(1);
    psi.normalize();
    return DensityMatrix(psi * psi.adjoint());
}

} // namespace polaron
