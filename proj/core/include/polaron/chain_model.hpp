// chain_model.hpp: Kitaev chain Hamiltonians, collective operators,
// Majorana edge modes and the initial state.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polaron/fock_space.hpp"

namespace polaron {

struct ChainParams {
    double J = 1.0;     // tunneling, sets the energy unit
    double delta = 1.0; // bare pairing
    double mu = 0.0;
    double U = 0.0;     // nearest-neighbour density interaction
    int n_sites = 4;

    void validate() const;
    // |mu| < 2J and delta != 0
    bool topological() const noexcept;
};

// H = sum_l [(-J c_l^+ c_{l+1} + delta c_l c_{l+1}) + h.c.] - mu sum_l n_l, open chain.
Operator build_kitaev(const FockSpace& space, double J, double delta_eff, double mu);

// U sum_l (n_l - 1/2)(n_{l+1} - 1/2)
Operator build_interaction(const FockSpace& space, double U);

struct CollectiveOps {
    Operator x_a; // -J sum (c_l^+ c_{l+1}^+ + c_{l+1} c_l), Hermitian
    Operator x_b; //  J sum (c_l^+ c_{l+1}^+ - c_{l+1} c_l), anti-Hermitian
};

CollectiveOps build_collective_X(const FockSpace& space, double J);

// a_{2j-1} = c_j + c_j^+, a_{2j} = -i (c_j - c_j^+); returned 0-based, 2N entries.
std::vector<Operator> majorana_operators(const FockSpace& space);

// Real antisymmetric A with H = (i/4) sum_{jk} A_jk a_j a_k + const.
// Only meaningful for Hamiltonians quadratic in the fermions.
Eigen::MatrixXd majorana_matrix(const Operator& h, const FockSpace& space);

struct MajoranaPair {
    Eigen::VectorXd f_left;  // 2N coefficients, unit norm
    Eigen::VectorXd f_right;
    Operator gamma_left;
    Operator gamma_right;
    double zero_mode_energy = 0.0; // smallest single-particle |energy|
    double bulk_gap = 0.0;         // next single-particle energy
};

// Assembles gamma = sum_j f_j a_j for both edges.
MajoranaPair assemble_pair(const FockSpace& space, Eigen::VectorXd f_left, Eigen::VectorXd f_right);

struct EdgeModeOptions {
    // zero-mode energy must stay below this fraction of the bulk gap
    double max_zero_mode_ratio = 0.9;
};

// Finds the two lowest single-particle Majorana modes of the quadratic chain
// Hamiltonian (interaction U excluded), rotates them into left/right localized
// real combinations and fixes signs so the even-parity ground state has
// theta = +1.
MajoranaPair majorana_edge_modes(const FockSpace& space, const ChainParams& params, double delta_eff,
                                 const EdgeModeOptions& options = {});

// Same pair restricted to the Majoranas of sites 1 and N and renormalized.
MajoranaPair edge_truncated(const FockSpace& space, const MajoranaPair& pair);

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and positivity within `tol`.
    explicit DensityMatrix(Operator m, double tol = 1e-10, double min_eig_tol = 1e-8);

    // Skips validation; for intermediate integrator states.
    static DensityMatrix unchecked(Operator m);

    const Operator& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

private:
    struct Unchecked {};
    DensityMatrix(Operator m, Unchecked) : m_(std::move(m)) {}

    Operator m_;
};

struct GroundStateOptions {
    // required gap between the ground doublet and the third level, in units of J
    double doublet_gap = 1e-6;
    double J = 1.0;
};

// Pure state of the theta = +1 eigenvector of -i gamma_L gamma_R inside the
// two-dimensional ground space of h_init.
DensityMatrix initial_ground_state(const Operator& h_init, const MajoranaPair& pair,
                                   const GroundStateOptions& options = {});

} // namespace polaron
