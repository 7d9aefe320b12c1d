#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "polaron/errors.hpp"
#include "polaron/phonon_bath.hpp"

using namespace polaron;

namespace {

// Independent evaluation: composite Simpson on the radial integrand,
// 4 g^2 / c_s^2 [coth(hbar c_s k / 2 k_B T) cos(c_s k tau) - i sin(c_s k tau)].
std::complex<double> phi_oracle(const BathParams& b, double tau, int panels = 40000) {
    auto integrand = [&](double k) -> std::complex<double> {
        const double s2 = b.sigma * b.sigma;
        const double pref = 4.0 * b.norm_scale / (b.c_s * b.c_s);
        const double w = b.c_s * k;
        const double x = b.hbar_over_kb * w / (2.0 * b.temperature);
        // g^2 coth(x) with g^2 = f^2 (k / sigma^2) e^{-2k^2/sigma^2}
        const double g2_over_k = b.f_ph * b.f_ph / s2 * std::exp(-2.0 * k * k / s2);
        const double cos_part = k == 0.0 ? g2_over_k / (b.hbar_over_kb * b.c_s / (2.0 * b.temperature))
                                         : g2_over_k * k / std::tanh(x);
        return pref * std::complex<double>(cos_part * std::cos(w * tau), -g2_over_k * k * std::sin(w * tau));
    };
    const double h = (b.k_max - b.k_min) / panels;
    std::complex<double> sum = integrand(b.k_min) + integrand(b.k_max);
    for (int i = 1; i < panels; ++i) {
        sum += (i % 2 ? 4.0 : 2.0) * integrand(b.k_min + i * h);
    }
    return sum * h / 3.0;
}

BathParams calibrated() {
    BathParams b;
    b.norm_scale = calibrate_scale(b, 0.07);
    return b;
}

} // namespace

TEST(GaussLegendre, ExactForPolynomialsUpToDegreeTwoNMinusOne) {
    std::vector<double> x, w;
    gauss_legendre(16, x, w);
    ASSERT_EQ(x.size(), 16u);
    for (int p = 0; p <= 31; ++p) {
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            q += w[i] * std::pow(x[i], p);
        }
        const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(q, exact, 1e-14) << p;
    }
}

TEST(Coupling, GaussianProfile) {
    BathParams b;
    b.sigma = 0.5;
    EXPECT_NEAR(coupling_gk(b, 0.3), 0.1 * std::sqrt(0.3 / 0.25) * std::exp(-0.09 / 0.25), 1e-16);
    b.profile = [](double k) { return 2.0 * k; };
    EXPECT_DOUBLE_EQ(coupling_gk(b, 0.3), 0.6);
}

TEST(Phi, MatchesIndependentQuadrature) {
    BathParams b;
    b.norm_scale = 37.0;
    for (double sigma : {0.2, 0.6}) {
        b.sigma = sigma;
        const double scale = phi(b, 0.0).real();
        for (double tau : {0.0, 0.05, 0.3, 1.3, 4.0}) {
            const std::complex<double> got = phi(b, tau), want = phi_oracle(b, tau);
            EXPECT_LT(std::abs(got - want), 1e-8 * scale) << sigma << " " << tau;
        }
    }
}

TEST(Phi, ZeroLagIsRealAndPositive) {
    const std::complex<double> p0 = phi(BathParams{}, 0.0);
    EXPECT_GT(p0.real(), 0.0);
    EXPECT_EQ(p0.imag(), 0.0);
}

TEST(Phi, NegativeLagIsRejected) { EXPECT_THROW(phi(BathParams{}, -0.1), RangeError); }

TEST(Phi, IncreasesWithTemperature) {
    BathParams b;
    double prev = -1.0;
    for (double T : {0.0, 2.0, 4.0, 8.0}) {
        b.temperature = T;
        const double p0 = phi(b, 0.0).real();
        EXPECT_GT(p0, prev) << T;
        prev = p0;
    }
}

TEST(Phi, ThermalDensityFiniteAtZeroMomentum) {
    BathParams b;
    const PhononBath pb(b);
    const double d0 = pb.thermal_density(0.0);
    EXPECT_TRUE(std::isfinite(d0));
    EXPECT_GT(d0, 0.0);
    EXPECT_NEAR(pb.thermal_density(1e-7), d0, 1e-6 * d0);
}

TEST(Phi, BoundedByZeroLagAndDecays) {
    const BathParams b = calibrated();
    const double p0 = phi(b, 0.0).real();
    for (double tau = 0.0; tau < 5.0; tau += 0.037) {
        EXPECT_LE(std::abs(phi(b, tau)), p0 * (1.0 + 1e-12)) << tau;
    }
    EXPECT_LT(std::abs(phi(b, 10.0 / (b.c_s * b.sigma))), 0.02 * p0);
}

TEST(Phi, LargerSigmaDecaysFaster) {
    BathParams b;
    auto decay_time = [&](double sigma) {
        b.sigma = sigma;
        return memory_time(b, 0.05);
    };
    EXPECT_LT(decay_time(0.6), decay_time(0.2));
}

TEST(Phi, LinearInNormScale) {
    BathParams b;
    const std::complex<double> one = phi(b, 0.4);
    b.norm_scale = 3.5;
    EXPECT_LT(std::abs(phi(b, 0.4) - 3.5 * one), 1e-13 * std::abs(one) * 3.5);
}

TEST(Phi, QuadratureConvergedOnDoubling) {
    const PhononBath pb(calibrated());
    EXPECT_LT(pb.convergence_defect(0.0), 1e-8);
    EXPECT_LT(pb.convergence_defect(1.0), 1e-8);
}

TEST(FranckCondon, LimitsAndOrdering) {
    BathParams b;
    b.f_ph = 0.0;
    EXPECT_DOUBLE_EQ(franck_condon_B(b), 1.0);
    b = calibrated();
    double prev = 0.0;
    for (double sigma : {0.2, 0.3, 0.4, 0.5, 0.6}) {
        b.sigma = sigma;
        const double B = franck_condon_B(b);
        EXPECT_GT(B, prev);
        EXPECT_LE(B, 1.0);
        prev = B;
    }
}

TEST(Calibration, HitsTargetAndCrossCheck) {
    BathParams b = calibrated();
    EXPECT_GT(b.norm_scale, 0.0);
    EXPECT_NEAR(franck_condon_B(b), 0.07, 1e-6);
    b.sigma = 0.205;
    const double B = franck_condon_B(b);
    EXPECT_GE(B, 0.005);
    EXPECT_LE(B, 0.02);
}

TEST(Calibration, UnreachableTargetsFail) {
    EXPECT_THROW(calibrate_scale(BathParams{}, 1.0), CalibrationError);
    EXPECT_THROW(calibrate_scale(BathParams{}, 0.0), CalibrationError);
    BathParams none;
    none.f_ph = 0.0;
    EXPECT_THROW(calibrate_scale(none, 0.5), CalibrationError);
}

TEST(CorrelationTableTest, GridAndNodeValues) {
    const BathParams b = calibrated();
    const CorrelationTable one = correlation_table(b, 0.1, 0.1);
    EXPECT_EQ(one.values.size(), 3u);
    const CorrelationTable t = correlation_table(b, 0.1, 2.0);
    EXPECT_EQ(t.values.size(), 41u);
    EXPECT_EQ(t.values[0], phi(b, 0.0));
    EXPECT_LT(std::abs(t.values[26] - phi(b, 1.3)), 1e-12);
    EXPECT_NEAR(t.t_max(), 2.0, 1e-12);
    EXPECT_THROW(correlation_table(b, 0.0, 1.0), RangeError);
    EXPECT_THROW(correlation_table(b, 0.2, 0.1), RangeError);
}

TEST(CorrelationTableTest, TailBelowEnvelope) {
    const BathParams b = calibrated();
    const double t_max = 10.0 / (b.c_s * b.sigma);
    const CorrelationTable t = correlation_table(b, 0.01, t_max);
    EXPECT_LT(std::abs(t.values.back()), 0.02 * t.values[0].real());
}

TEST(MemoryTime, MarksOneOverEDecay) {
    const BathParams b = calibrated();
    const double tm = memory_time(b);
    EXPECT_NEAR(std::abs(phi(b, tm)) / phi(b, 0.0).real(), std::exp(-1.0), 1e-9);
}

TEST(BathParamsTest, Validation) {
    BathParams b;
    b.c_s = -1.0;
    EXPECT_THROW(b.validate(), ConfigError);
    b = BathParams{};
    b.k_max = 0.0;
    EXPECT_THROW(b.validate(), ConfigError);
    b = BathParams{};
    b.temperature = -1.0;
    EXPECT_THROW(PhononBath{b}, ConfigError);
}
