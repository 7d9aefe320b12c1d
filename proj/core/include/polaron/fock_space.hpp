// fock_space.hpp: many-body Fock space of spinless fermions on a chain

#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace polaron {

using Operator = Eigen::MatrixXcd;

// Basis states are occupation bitstrings in ascending integer order;
// bit (l-1) holds the occupation of site l.
class FockSpace {
public:
    static constexpr int kMinSites = 2;
    static constexpr int kMaxSites = 12;

    explicit FockSpace(int n_sites);

    int n_sites() const noexcept { return n_sites_; }
    Eigen::Index dim() const noexcept { return dim_; }

    Operator zero() const { return Operator::Zero(dim_, dim_); }
    Operator identity() const { return Operator::Identity(dim_, dim_); }

    friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
    int n_sites_;
    Eigen::Index dim_;
};

struct Eigensystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns are eigenvectors
};

FockSpace build_space(int n_sites);

// c_l with a Jordan-Wigner string over sites < l. Sites are 1-based.
Operator annihilation_op(const FockSpace& space, int site);
Operator creation_op(const FockSpace& space, int site);
Operator number_op(const FockSpace& space, int site);

// P = prod_l (1 - 2 n_l)
Operator parity_op(const FockSpace& space);

// Diagonalizes a Hermitian matrix. Throws ValidationError if the input
// deviates from Hermiticity by more than `hermiticity_tol`.
Eigensystem eigensystem(const Operator& h, double hermiticity_tol = 1e-12);

// e^{-iH tau} X e^{iH tau}, with H given through its eigensystem.
Operator heisenberg_reversed(const Operator& x, const Eigensystem& es, double tau);

// Largest |entry| of a - b.
double max_abs_diff(const Operator& a, const Operator& b);
double hermiticity_defect(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

} // namespace polaron
