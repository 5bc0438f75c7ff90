#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cpsfm/oracle.hpp"
#include "cpsfm/transforms.hpp"
#include "support.hpp"

using namespace cpsfm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(QuadTransform, TrivialValues) {
    const CpsfmWaveform flat = build_waveform(ChebSeriesd{0.0}, 1.0);
    EXPECT_NEAR(std::abs(quad_spectrum(flat, 0.0) - 2.0), 0.0, 1e-12);
    for (const auto& w : cpsfm::testing::random_population(5, 2)) {
        EXPECT_NEAR(std::abs(quad_correlation(w, w, 0.0) - 1.0), 0.0, 1e-11);
    }
    EXPECT_EQ(quad_correlation(flat, flat, 2.0), cplx(0.0, 0.0));
}

TEST(QuadTransform, LinearChirpSpectrumPoint) {
    // Frozen from the closed form; the comparison itself is the test.
    const CpsfmWaveform w = build_waveform(ChebSeriesd{10.0, 5.0}, 1.0);
    const cplx ref = spectrum(w, Eigen::VectorXd::Constant(1, 10.0))(0);
    QuadSpec q;
    q.abs_tol = 1e-10;
    EXPECT_NEAR(std::abs(quad_spectrum(w, 10.0, q) - ref), 0.0, std::max(q.abs_tol, 1e-8));
}

TEST(QuadTransform, RulesAgree) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{3.0, 1.5, -0.5}, 1.0);
    QuadSpec gl;
    const cplx ref = quad_spectrum(w, 2.5, gl);
    QuadSpec simpson{1e-9, 1 << 22, QuadRule::adaptive_simpson};
    EXPECT_NEAR(std::abs(quad_spectrum(w, 2.5, simpson) - ref), 0.0, 1e-8);
    QuadSpec trap{1e-6, 1 << 22, QuadRule::trapezoid_dense};
    EXPECT_NEAR(std::abs(quad_spectrum(w, 2.5, trap) - ref), 0.0, 1e-5);
}

TEST(QuadTransform, RefinementChangesLessThanTolerance) {
    const auto pop = cpsfm::testing::random_population(4, 66);
    QuadSpec coarse;
    coarse.abs_tol = 1e-9;
    QuadSpec fine;
    fine.abs_tol = 1e-12;
    for (const auto& w : pop) {
        for (double xi : {-1.3, -0.2, 0.4, 1.7}) {
            EXPECT_NEAR(std::abs(quad_correlation(w, w, xi, coarse) - quad_correlation(w, w, xi, fine)), 0.0, 1e-9);
        }
    }
}

TEST(QuadTransform, NonConvergenceRaises) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{200.0, 50.0}, 1.0);
    QuadSpec q{1e-12, 4, QuadRule::gauss_legendre};
    EXPECT_THROW(quad_spectrum(w, 0.0, q), QuadratureError);
    QuadSpec bad{0.0, 10, QuadRule::gauss_legendre};
    EXPECT_THROW(quad_spectrum(w, 0.0, bad), InvalidArgument);
}

TEST(QuadTransform, DispatchMatchesHelpers) {
    const auto pop = cpsfm::testing::random_population(2, 5);
    const TransformPoint p{0.0, 0.3, 1.05};
    EXPECT_EQ(quad_transform(TransformKind::ambiguity, pop[0], &pop[1], p), quad_ambiguity(pop[0], pop[1], 0.3, 1.05));
    EXPECT_EQ(quad_transform(TransformKind::correlation, pop[0], nullptr, p), quad_correlation(pop[0], pop[0], 0.3));
}

TEST(DiscreteReference, FlatSpectrumIsSinc) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{0.0}, 1.0);
    const ResultGrid d = discrete_spectrum(sample(w, 2000.0), 1.0, 4);
    const Eigen::VectorXd& g = d.axes()[0].values;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (std::abs(g[i]) > 20.0) continue;
        const double ref = g[i] == 0.0 ? 2.0 : std::sin(2.0 * kPi * g[i]) / (kPi * g[i]);
        if (std::abs(ref) < 0.05) continue;
        EXPECT_NEAR(std::abs(d(i) - ref) / std::abs(ref), 0.0, 0.01) << "g=" << g[i];
    }
}

TEST(DiscreteReference, AutocorrelationPeak) {
    const auto pop = cpsfm::testing::random_population(3, 17, 5, 20.0);
    for (const auto& w : pop) {
        const double fs = 20.0 * w.peak_frequency_hz() + 200.0;
        const ResultGrid r = discrete_correlation(sample(w, fs), sample(w, fs), w.duration_s());
        const Eigen::Index mid = (r.size() - 1) / 2;
        EXPECT_EQ(r.axes()[0].values[mid], 0.0);
        EXPECT_NEAR(std::abs(r(mid) - 1.0), 0.0, 1.0 / (fs * w.duration_s()) + 1e-12);
    }
}

TEST(DiscreteReference, AgreesWithQuadratureWithinOnePercent) {
    const auto pop = cpsfm::testing::random_population(2, 404, 4, 15.0);
    const CpsfmWaveform& a = pop[0];
    const CpsfmWaveform& b = pop[1];
    const double fs = 400.0 * std::max(a.peak_frequency_hz(), b.peak_frequency_hz());
    const DiscreteSource sa = DiscreteSource::from_waveform(a), sb = DiscreteSource::from_waveform(b);
    Eigen::VectorXd xi(4), nu(2);
    xi << -0.6, -0.1, 0.25, 0.9;
    nu << 0.93, 1.08;
    const ResultGrid d = discrete_ambiguity(sa, sb, xi, nu, fs);
    for (Eigen::Index r = 0; r < nu.size(); ++r) {
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            const cplx q = quad_ambiguity(a, b, xi[i], nu[r]);
            EXPECT_NEAR(std::abs(d(r, i) - q), 0.0, 0.01 * std::max(std::abs(q), 0.1));
        }
    }
}

TEST(DiscreteReference, InadequateRateIsAnError) {
    const DiscreteSource hfm = DiscreteSource::from_hfm(HfmSpec{100e3, 200e3, 2e-3});
    EXPECT_THROW(sample_source(hfm, 1e6), InvalidArgument);
    EXPECT_NO_THROW(sample_source(hfm, 2e6));
    EXPECT_THROW(discrete_ambiguity(hfm, hfm, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.2), 2.1e6),
                 InvalidArgument);
}

TEST(MatchedNoise, SameMagnitudeAndEnergyDeterministic) {
    const CpsfmWaveform w = build_waveform(ChebSeriesd{30.0, -8.0, 1.0}, 0.01);
    const SampledSignal s = sample_source(DiscreteSource::from_waveform(w), 20.0 * w.peak_frequency_hz());
    const SampledSignal n1 = matched_noise(s, 5), n2 = matched_noise(s, 5), n3 = matched_noise(s, 6);
    EXPECT_EQ(n1.samples, n2.samples);
    EXPECT_NE(n1.samples, n3.samples);
    EXPECT_NEAR(n1.samples.squaredNorm(), s.samples.squaredNorm(), 1e-9 * s.samples.squaredNorm());
    const double att = matched_noise_attenuation_db(s, 0.01, 5);
    EXPECT_GT(att, 0.0);
    EXPECT_EQ(att, matched_noise_attenuation_db(s, 0.01, 5));
}
