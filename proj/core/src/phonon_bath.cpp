#include "polaron/phonon_bath.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polaron/errors.hpp"

namespace polaron {

namespace {

constexpr int kPanelOrder = 16;
constexpr double kQuadratureTol = 1e-8;

double legendre_with_derivative(int n, double x, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
}

// x coth(x), smooth through x = 0
double x_coth_x(double x) {
    if (std::abs(x) < 1e-6) {
        return 1.0 + x * x / 3.0;
    }
    return x / std::tanh(x);
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            const double p = legendre_with_derivative(n, x, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        legendre_with_derivative(n, x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

void BathParams::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(std::isfinite(f_ph), "bath.f_ph must be finite");
    require(sigma > 0.0, "bath.sigma must be positive, got " + std::to_string(sigma));
    require(c_s > 0.0, "bath.c_s must be positive, got " + std::to_string(c_s));
    require(temperature >= 0.0, "bath.temperature must be non-negative");
    require(k_min >= 0.0, "bath.k_min must be non-negative");
    require(k_max > k_min, "bath.k_max must exceed bath.k_min");
    require(norm_scale > 0.0, "bath.norm_scale must be positive");
    require(n_quad >= 64, "bath.n_quad must be at least 64");
    require(hbar_over_kb > 0.0, "bath.hbar_over_kb must be positive");
}

double coupling_gk(const BathParams& bath, double k) {
    if (bath.profile) {
        return bath.profile(k);
    }
    const double s2 = bath.sigma * bath.sigma;
    return bath.f_ph * std::sqrt(k / s2) * std::exp(-k * k / s2);
}

PhononBath::PhononBath(const BathParams& params) : params_(params) {
    params_.validate();
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(kPanelOrder, x, w);
    const int panels = (params_.n_quad + kPanelOrder - 1) / kPanelOrder;
    const double width = (params_.k_max - params_.k_min) / panels;
    const std::size_t n = static_cast<std::size_t>(panels) * kPanelOrder;
    omega_.reserve(n);
    w_cos_.reserve(n);
    w_sin_.reserve(n);
    const double prefactor = 4.0 * params_.norm_scale / (params_.c_s * params_.c_s);
    for (int p = 0; p < panels; ++p) {
        const double lo = params_.k_min + p * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double k = lo + 0.5 * width * (x[i] + 1.0);
            const double weight = 0.5 * width * w[i];
            const double g = coupling_gk(params_, k);
            omega_.push_back(params_.c_s * k);
            w_cos_.push_back(weight * thermal_density(k));
            w_sin_.push_back(weight * prefactor * g * g);
        }
    }
}

// norm * k^2 |2 g_k / omega_k|^2 coth(hbar omega / 2 k_B T) = norm * 4 g^2 coth / c_s^2
double PhononBath::thermal_density(double k) const {
    const double prefactor = 4.0 * params_.norm_scale / (params_.c_s * params_.c_s);
    if (params_.temperature == 0.0) {
        const double g = coupling_gk(params_, k);
        return prefactor * g * g;
    }
    const double a = params_.hbar_over_kb * params_.c_s / (2.0 * params_.temperature);
    if (!params_.profile) {
        // g^2 coth(a k) = (f^2/sigma^2) e^{-2k^2/sigma^2} (k coth(a k)), finite at k = 0
        const double s2 = params_.sigma * params_.sigma;
        const double reduced = params_.f_ph * params_.f_ph / s2 * std::exp(-2.0 * k * k / s2);
        return prefactor * reduced * x_coth_x(a * k) / a;
    }
    const double g = coupling_gk(params_, k);
    return prefactor * g * g / std::tanh(a * k);
}

std::complex<double> PhononBath::phi(double tau) const {
    double re = 0.0;
    double im = 0.0;
    if (tau == 0.0) {
        for (double w : w_cos_) {
            re += w;
        }
        return {re, 0.0};
    }
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        const double arg = omega_[i] * tau;
        re += w_cos_[i] * std::cos(arg);
        im -= w_sin_[i] * std::sin(arg);
    }
    return {re, im};
}

double PhononBath::convergence_defect(double tau) const {
    BathParams fine = params_;
    fine.n_quad = 2 * params_.n_quad;
    const PhononBath refined(fine);
    const std::complex<double> coarse_value = phi(tau);
    const std::complex<double> fine_value = refined.phi(tau);
    const double scale = std::max(std::abs(fine_value), refined.phi(0.0).real());
    if (scale == 0.0) {
        return 0.0;
    }
    return std::abs(fine_value - coarse_value) / scale;
}

namespace {

void require_converged(const PhononBath& bath, double tau) {
    const double defect = bath.convergence_defect(tau);
    if (defect > kQuadratureTol) {
        throw AccuracyError("phi quadrature not converged at tau = " + std::to_string(tau) +
                            ": relative change " + std::to_string(defect) +
                            " on doubling n_quad = " + std::to_string(bath.params().n_quad));
    }
}

} // namespace

std::complex<double> phi(const BathParams& bath, double tau) {
    if (tau < 0.0) {
        throw RangeError("phi: tau must be non-negative");
    }
    const PhononBath pb(bath);
    require_converged(pb, tau);
    return pb.phi(tau);
}

double franck_condon_B(const BathParams& bath) {
    return std::exp(-0.5 * phi(bath, 0.0).real());
}

CorrelationTable correlation_table(const BathParams& bath, double dt, double t_max) {
    if (!(dt > 0.0) || !(t_max >= dt)) {
        throw RangeError("correlation_table: need dt > 0 and t_max >= dt");
    }
    const PhononBath pb(bath);
    const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    CorrelationTable table;
    table.dt = dt;
    table.values.resize(2 * steps + 1);
    for (std::size_t m = 0; m < table.values.size(); ++m) {
        table.values[m] = pb.phi(table.tau(m));
    }
    require_converged(pb, 0.0);
    require_converged(pb, table.t_max());

    const double phi0 = table.values.front().real();
    for (std::size_t m = 0; m < table.values.size(); ++m) {
        if (std::abs(table.values[m]) > phi0 * (1.0 + 1e-12) + 1e-300) {
            throw AccuracyError("correlation table violates |phi(tau)| <= phi(0) at tau = " +
                                std::to_string(table.tau(m)));
        }
    }
    return table;
}

double calibrate_scale(const BathParams& bath_ref, double target_b) {
    constexpr double kScaleMin = 1e-6;
    constexpr double kScaleMax = 1e6;
    if (!(target_b > 0.0 && target_b < 1.0)) {
        throw CalibrationError("target <B> must lie strictly inside (0, 1), got " +
                               std::to_string(target_b));
    }
    // Re phi(0) is linear in norm_scale, so <B>(s) = exp(-s phi1 / 2) is strictly
    // decreasing and its root has the closed form below.
    BathParams unit = bath_ref;
    unit.norm_scale = 1.0;
    const double phi1 = phi(unit, 0.0).real();
    if (!(phi1 > 0.0)) {
        throw CalibrationError("reference bath has zero coupling; <B> is pinned at 1");
    }
    const double scale = -2.0 * std::log(target_b) / phi1;
    if (scale < kScaleMin || scale > kScaleMax) {
        throw CalibrationError("target <B> = " + std::to_string(target_b) +
                               " needs norm_scale " + std::to_string(scale) +
                               " outside [1e-6, 1e6]");
    }
    BathParams check = bath_ref;
    check.norm_scale = scale;
    const double achieved = franck_condon_B(check);
    if (std::abs(achieved - target_b) > 1e-6) {
        throw CalibrationError("calibration re-evaluation gave <B> = " + std::to_string(achieved));
    }
    return scale;
}

double memory_time(const BathParams& bath, double fraction) {
    const PhononBath pb(bath);
    const double phi0 = pb.phi(0.0).real();
    if (phi0 == 0.0) {
        return 0.0;
    }
    const double rate = bath.c_s * bath.sigma;
    const double h = 0.01 / rate;
    const double limit = 1000.0 / rate;
    double lo = 0.0;
    for (double t = h; t <= limit; t += h) {
        if (std::abs(pb.phi(t)) < fraction * phi0) {
            double a = lo;
            double b = t;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (a + b);
                (std::abs(pb.phi(mid)) < fraction * phi0 ? b : a) = mid;
            }
            return 0.5 * (a + b);
        }
        lo = t;
    }
    throw AccuracyError("phi(tau) does not decay below the requested fraction");
}

} // namespace polaron
