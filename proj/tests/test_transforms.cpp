#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cpsfm/oracle.hpp"
#include "cpsfm/transforms.hpp"
#include "support.hpp"

using namespace cpsfm;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kJ(0.0, 1.0);

cplx gamma_quadrature(double m, double th1, double th2) {
    // Composite Simpson on a smooth integrand; plenty for 1e-11.
    const int n = 4000;
    const double h = (th1 - th2) / n;
    cplx acc(0.0, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double th = th2 + k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * std::exp(kJ * (m * th)) * std::sin(th);
    }
    return acc * h / 3.0;
}

} // namespace

TEST(SupportLimits, Examples) {
    SupportLimits s = support_limits(0.0, 1.0);
    EXPECT_EQ(s.x1, -1.0);
    EXPECT_EQ(s.x2, 1.0);
    EXPECT_NEAR(s.theta1, kPi, 1e-15);
    EXPECT_EQ(s.theta2, 0.0);
    s = support_limits(0.5, 1.0);
    EXPECT_EQ(s.x1, -1.0);
    EXPECT_EQ(s.x2, 0.5);
    s = support_limits(0.0, 2.0);
    EXPECT_EQ(s.x1, -0.5);
    EXPECT_EQ(s.x2, 0.5);
    EXPECT_TRUE(support_limits(2.0, 1.0).empty);
    EXPECT_TRUE(support_limits(-2.5, 1.0).empty);
    EXPECT_THROW(support_limits(0.0, 0.0), InvalidArgument);
}

TEST(SupportLimits, AnglesOrdered) {
    for (double xi = -1.9; xi < 1.9; xi += 0.1) {
        for (double nu : {0.8, 1.0, 1.2}) {
            const SupportLimits s = support_limits(xi, nu);
            if (s.empty) continue;
            EXPECT_LE(0.0, s.theta2);
            EXPECT_LT(s.theta2, s.theta1);
            EXPECT_LE(s.theta1, kPi);
        }
    }
}

TEST(Gamma, FullIntervalValues) {
    EXPECT_NEAR(std::abs(gamma_coeff(0, kPi, 0.0) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_coeff(1, kPi, 0.0) - kJ * kPi / 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_coeff(-1, kPi, 0.0) + kJ * kPi / 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_coeff(2, kPi, 0.0) + 2.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(gamma_coeff(3, kPi, 0.0)), 0.0, 1e-15);
}

TEST(Gamma, MatchesQuadratureAndConjugateSymmetry) {
    const std::pair<double, double> limits[] = {{kPi, 0.0}, {2.5, 0.3}, {1.2, 0.9}, {kPi, 1.7}};
    for (const auto& [t1, t2] : limits) {
        for (int m = -6; m <= 6; ++m) {
            EXPECT_NEAR(std::abs(gamma_coeff(m, t1, t2) - gamma_quadrature(m, t1, t2)), 0.0, 1e-11);
            EXPECT_NEAR(std::abs(gamma_coeff(-m, t1, t2) - std::conj(gamma_coeff(m, t1, t2))), 0.0, 1e-14);
        }
    }
}

TEST(Gamma, ContinuousAtRemovableSingularity) {
    // Real-order quadrature approaching m = 1 from either side.
    for (const auto& [t1, t2] : {std::pair{2.5, 0.3}, std::pair{kPi, 0.0}}) {
        for (double eps : {1e-4, -1e-4}) {
            EXPECT_NEAR(std::abs(gamma_quadrature(1.0 + eps, t1, t2) - gamma_coeff(1, t1, t2)), 0.0, 1e-3 * 1.0);
        }
        const cplx left = gamma_quadrature(1.0 - 1e-6, t1, t2), right = gamma_quadrature(1.0 + 1e-6, t1, t2);
        EXPECT_NEAR(std::abs(0.5 * (left + right) - gamma_coeff(1, t1, t2)), 0.0, 1e-9);
    }
}

TEST(Spectrum, RectangularPulseIsSinc) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{0.0}, 1.0);
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(81, -10.0, 10.0);
    const ResultGrid s = spectrum(w, g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double ref = g[i] == 0.0 ? 2.0 : std::sin(2.0 * kPi * g[i]) / (kPi * g[i]);
        EXPECT_NEAR(std::abs(s(i) - ref), 0.0, 1e-10);
    }
    EXPECT_EQ(s.meta().kind, "spectrum");
    EXPECT_EQ(s.axes()[0].name, "g");
}

TEST(Spectrum, MatchesQuadratureOracle) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{10.0, 5.0}, 1.0);
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(201, 0.0, 20.0);
    const ResultGrid s = spectrum(w, g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(std::abs(s(i) - quad_spectrum(w, g[i])), 0.0, 1e-8) << "g=" << g[i];
    }
}

TEST(Spectrum, PhiZeroIsAGlobalPhase) {
    const CpsfmWaveform a = build_waveform(ChebSeriesd{4.0, -2.0, 1.0}, 1.0, 0.0);
    const CpsfmWaveform b = build_waveform(ChebSeriesd{4.0, -2.0, 1.0}, 1.0, 0.7);
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(21, -5.0, 15.0);
    const ResultGrid sa = spectrum(a, g), sb = spectrum(b, g);
    for (Eigen::Index i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(sb(i) - std::exp(kJ * 0.7) * sa(i)), 0.0, 1e-12);
}

TEST(Spectrum, ParsevalOverWideGrid) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{8.0, 3.0, -0.5}, 1.0);
    const double step = 0.02;
    const Eigen::VectorXd g = uniform_grid(-400.0, 400.0, step);
    const ResultGrid s = spectrum(w, g);
    const double energy = s.values().squaredNorm() * step;
    EXPECT_NEAR(energy, 2.0, 2e-3);
}

TEST(Spectrum, LiteralComplexKernelDisagreesWithOracle) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{3.0, 1.0}, 1.0);
    const Eigen::VectorXd g = Eigen::VectorXd::Constant(1, 2.0);
    TransformOptions o;
    o.spectrum_kernel = SpectrumKernel::literal_complex;
    const cplx lit = spectrum(w, g, o)(0);
    EXPECT_GT(std::abs(lit - quad_spectrum(w, 2.0)), 1e-3);
    EXPECT_EQ(spectrum(w, g, o).meta().route, "literal_complex");
}

TEST(Spectrum, CallSpectraNeedModestTruncation) {
    const CpsfmWaveform a = build_waveform(ChebSeriesd{131.110875, -49.236375, -3.7725, 2.380125, -2.474625}, 7.5e-3);
    const Eigen::VectorXd g = cpsfm::testing::spectrum_grid(a, 301);
    TransformOptions o;
    o.tol = 1e-12;
    const ResultGrid s = spectrum(a, g, o);
    EXPECT_LE(s.meta().truncation, 1000);
    o.fixed_truncation = 2 * s.meta().truncation;
    EXPECT_LT((spectrum(a, g, o).values() - s.values()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectrum, CapIsEnforced) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{500.0, 200.0}, 1.0);
    TransformOptions o;
    o.mmax_cap = 64;
    EXPECT_THROW(spectrum(w, Eigen::VectorXd::Constant(1, 0.0), o), TruncationError);
}

TEST(Correlation, BasicValues) {
    const auto pop = cpsfm::testing::random_population(8, 4);
    Eigen::VectorXd xi(7);
    xi << -5.0, -2.0, -1e-300, 0.0, 1.999999, 2.0, 3.0;
    for (const auto& w : pop) {
        const ResultGrid r = correlation(w, xi);
        EXPECT_EQ(r(0), cplx(0.0, 0.0));
        EXPECT_EQ(r(1), cplx(0.0, 0.0));
        EXPECT_NEAR(std::abs(r(3) - 1.0), 0.0, 1e-12);
        EXPECT_EQ(r(5), cplx(0.0, 0.0));
        EXPECT_EQ(r(6), cplx(0.0, 0.0));
    }
}

TEST(Correlation, HermitianAndBounded) {
    const auto pop = cpsfm::testing::random_population(6, 8);
    const Eigen::VectorXd xi = uniform_grid(-2.0, 2.0, 0.01);
    for (const auto& w : pop) {
        const ResultGrid r = correlation(w, xi);
        const Eigen::Index n = xi.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            EXPECT_LE(std::abs(r(i)), 1.0 + 1e-9);
            EXPECT_NEAR(std::abs(r(n - 1 - i) - std::conj(r(i))), 0.0, 1e-10);
        }
    }
}

TEST(Correlation, CrossIsReversedConjugate) {
    const auto pop = cpsfm::testing::random_population(2, 12);
    const Eigen::VectorXd xi = uniform_grid(-2.0, 2.0, 0.05);
    const ResultGrid ab = correlation(pop[0], pop[1], xi), ba = correlation(pop[1], pop[0], xi);
    const Eigen::Index n = xi.size();
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(std::abs(ab(i) - std::conj(ba(n - 1 - i))), 0.0, 1e-10);
}

TEST(Correlation, DurationMismatch) {
    const CpsfmWaveform a = build_waveform(ChebSeriesd{1.0}, 1.0), b = build_waveform(ChebSeriesd{1.0}, 2.0);
    EXPECT_THROW(correlation(a, b, Eigen::VectorXd::Zero(1)), InvalidArgument);
    EXPECT_THROW(ambiguity(a, b, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)), InvalidArgument);
}

TEST(Correlation, LiteralRouteAgreesNearZeroLag) {
    // The full-domain expansion is usable while nu (x + xi) stays near [-1, 1].
    const CpsfmWaveform w = build_waveform(ChebSeriesd{2.0, 1.0, -0.5}, 1.0);
    Eigen::VectorXd xi(5);
    xi << -0.1, -0.05, 0.0, 0.05, 0.1;
    TransformOptions o;
    o.route = CorrelationRoute::literal;
    const ResultGrid lit = correlation(w, xi, o), mapped = correlation(w, xi);
    EXPECT_EQ(lit.meta().route, "literal");
    for (Eigen::Index i = 0; i < xi.size(); ++i) EXPECT_NEAR(std::abs(lit(i) - mapped(i)), 0.0, 1e-8);
}

TEST(Ambiguity, UnitSliceEqualsCorrelation) {
    const auto pop = cpsfm::testing::random_population(4, 21);
    const Eigen::VectorXd xi = uniform_grid(-2.0, 2.0, 0.02);
    Eigen::VectorXd nu(3);
    nu << 0.9, 1.0, 1.1;
    for (const auto& w : pop) {
        const ResultGrid af = ambiguity(w, xi, nu);
        const ResultGrid r = correlation(w, xi);
        ASSERT_EQ(af.size(), 3 * xi.size());
        EXPECT_EQ(af.axes()[0].name, "nu");
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            EXPECT_NEAR(std::abs(af(1, i) - r(i)), 0.0, 1e-12);
            EXPECT_LE(std::abs(af(0, i)), 1.0 + 1e-9);
            EXPECT_LE(std::abs(af(2, i)), 1.0 + 1e-9);
        }
    }
}

TEST(Ambiguity, MatchesOracleOffUnity) {
    const auto pop = cpsfm::testing::random_population(3, 99);
    const Eigen::VectorXd xi = Eigen::VectorXd::LinSpaced(41, -2.2, 2.2);
    Eigen::VectorXd nu(2);
    nu << 0.6, 1.7;
    for (const auto& w : pop) {
        const ResultGrid af = ambiguity(w, pop[0], xi, nu);
        for (Eigen::Index r = 0; r < nu.size(); ++r) {
            for (Eigen::Index i = 0; i < xi.size(); ++i) {
                EXPECT_NEAR(std::abs(af(r, i) - quad_ambiguity(w, pop[0], xi[i], nu[r])), 0.0, 1e-8);
            }
        }
    }
}

TEST(Ambiguity, RejectsNonPositiveNu) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{1.0}, 1.0);
    EXPECT_THROW(ambiguity(w, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)), InvalidArgument);
}

TEST(Ambiguity, FixedTruncationIsRecorded) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{3.0, 1.0}, 1.0);
    TransformOptions o;
    o.fixed_truncation = 77;
    EXPECT_EQ(ambiguity(w, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(1), o).meta().truncation, 77);
}

TEST(Doppler, Factors) {
    EXPECT_EQ(doppler_factor(0.0, 343.0), 1.0);
    EXPECT_NEAR(doppler_factor(20.0, 343.0), 363.0 / 323.0, 1e-15);
    EXPECT_NEAR(doppler_factor(-20.0, 343.0), 323.0 / 363.0, 1e-15);
    EXPECT_NEAR(doppler_factor(-20.0, 343.0) * doppler_factor(20.0, 343.0), 1.0, 1e-15);
    EXPECT_THROW(doppler_factor(343.0, 343.0), InvalidArgument);
    EXPECT_THROW(doppler_factor(1.0, 0.0), InvalidArgument);
}

TEST(Jamming, SelfIsZeroAndSymmetric) {
    const auto pop = cpsfm::testing::random_population(2, 31);
    JammingOptions o;
    o.xi_step = 2e-3;
    EXPECT_NEAR(jamming_rejection_db(pop[0], pop[0], o), 0.0, 1e-9);
    EXPECT_NEAR(jamming_rejection_db(pop[0], pop[1], o), jamming_rejection_db(pop[1], pop[0], o), 1e-6);
    const JammingReport r = jamming_report(pop[0], pop[1], o);
    EXPECT_NEAR(r.acf_peak, 1.0, 1e-12);
    EXPECT_GT(r.rejection_db, 0.0);
}

TEST(UniformGrid, SnapsZeroAndIncludesEnds) {
    const Eigen::VectorXd g = uniform_grid(-2.0, 2.0, 1e-3);
    ASSERT_EQ(g.size(), 4001);
    EXPECT_EQ(g[2000], 0.0);
    EXPECT_DOUBLE_EQ(g[4000], 2.0);
    EXPECT_THROW(uniform_grid(0.0, 1.0, 0.0), InvalidArgument);
}

TEST(ResultGrid, ShapeIsValidated) {
    EXPECT_THROW(ResultGrid({GridAxis{"xi", Eigen::VectorXd::Zero(3)}}, Eigen::VectorXcd::Zero(4)),
                 InvalidArgument);
    const ResultGrid g({GridAxis{"nu", Eigen::VectorXd::Zero(2)}, GridAxis{"xi", Eigen::VectorXd::Zero(3)}},
                       Eigen::VectorXcd::LinSpaced(6, 0.0, 5.0));
    EXPECT_EQ(g(1, 2), cplx(5.0, 0.0));
}
