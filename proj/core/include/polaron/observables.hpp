// observables.hpp: Majorana edge correlation and density-matrix health metrics

#pragma once

#include <vector>

#include "polaron/chain_model.hpp"
#include "polaron/fock_space.hpp"

namespace polaron {

struct ThetaValue {
    double value = 0.0; // Re(-i Tr rho gamma_L gamma_R)
    double imag = 0.0;  // residue; large values flag integrator breakdown
};

// -i gamma_L gamma_R
Operator edge_correlation_op(const MajoranaPair& pair);

ThetaValue theta_value(const Operator& rho, const MajoranaPair& pair);
double theta(const DensityMatrix& rho, const MajoranaPair& pair);

struct HealthReport {
    double trace_error = 0.0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    double purity = 0.0;
    double parity = 0.0;
};

HealthReport health(const Operator& rho, const FockSpace& space);
inline HealthReport health(const DensityMatrix& rho, const FockSpace& space) {
    return health(rho.matrix(), space);
}

std::vector<double> occupations(const Operator& rho, const FockSpace& space);

} // namespace polaron
