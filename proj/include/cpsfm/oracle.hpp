#ifndef CPSFM_ORACLE_HPP
#define CPSFM_ORACLE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>

#include "cpsfm/transforms.hpp"
#include "cpsfm/waveform.hpp"

// Brute-force references for the closed-form transforms. Nothing in here
// touches the Bessel machinery: integrands are evaluated pointwise from the
// phase series and integrated directly.

namespace cpsfm {

enum class QuadRule {
    /// Adaptive panels, 20-point Gauss-Legendre checked against two halves.
    gauss_legendre,
    adaptive_simpson,
    /// Composite trapezoid, step halved until two passes agree.
    trapezoid_dense,
};

struct QuadSpec {
    double abs_tol = 1e-11;
    int max_subdivisions = 1 << 20;
    QuadRule rule = QuadRule::gauss_legendre;
};

enum class TransformKind { spectrum, correlation, ambiguity };

/// One evaluation point: g for spectra, xi for correlations, (xi, nu) for the AF.
struct TransformPoint {
    double g = 0.0;
    double xi = 0.0;
    double nu = 1.0;
};

/// Integrates the defining integral in x at one point. `b` defaults to `a`.
/// Throws QuadratureError when abs_tol is not met within max_subdivisions.
cplx quad_transform(TransformKind kind, const CpsfmWaveform& a, const CpsfmWaveform* b,
                    const TransformPoint& p, const QuadSpec& spec = {});

cplx quad_spectrum(const CpsfmWaveform& w, double g, const QuadSpec& spec = {});
cplx quad_correlation(const CpsfmWaveform& a, const CpsfmWaveform& b, double xi,
                      const QuadSpec& spec = {});
cplx quad_ambiguity(const CpsfmWaveform& a, const CpsfmWaveform& b, double xi, double nu,
                    const QuadSpec& spec = {});

/// A signal known only pointwise, e.g. the true HFM. `phase(t)` is defined for
/// t in [-T/2, T/2]; the signal is (1/sqrt(T)) exp(j phase(t)) there, 0 elsewhere.
struct DiscreteSource {
    std::function<double(double)> phase;
    double duration_s = 0.0;
    double peak_frequency_hz = 0.0;

    static DiscreteSource from_waveform(const CpsfmWaveform& w);
    static DiscreteSource from_hfm(const HfmSpec& spec);
};

/// Minimum oversampling accepted by the discrete references.
inline constexpr double kMinOversampling = 10.0;

/// Midpoint samples of a source; throws InvalidArgument when
/// fs < kMinOversampling * peak frequency.
SampledSignal sample_source(const DiscreteSource& src, double fs);

/// Zero-padded FFT spectrum on the normalized axis g = f T / 2, scaled to
/// match spectrum(). `pad` multiplies the transform length.
ResultGrid discrete_spectrum(const SampledSignal& s, double duration_s, int pad = 8);

/// Linear cross-correlation sum conj(a_k) b_{k+l} / fs over every lag, on the
/// axis xi = 2 l / (fs T). Both signals must share fs.
ResultGrid discrete_correlation(const SampledSignal& a, const SampledSignal& b, double duration_s);

/// Wideband AF by evaluating b on the scaled time axis nu (t + tau) and
/// summing against the samples of a. Axes (nu, xi).
ResultGrid discrete_ambiguity(const DiscreteSource& a, const DiscreteSource& b,
                              const Eigen::VectorXd& xi, const Eigen::VectorXd& nu, double fs);

/// Noise with the magnitude spectrum of `ref` and uniformly random phases,
/// scaled to the energy of `ref`.
SampledSignal matched_noise(const SampledSignal& ref, std::uint64_t seed);

/// Cross-correlation of `ref` against matched_noise(ref, seed).
ResultGrid matched_noise_ccf(const SampledSignal& ref, double duration_s, std::uint64_t seed);

/// 20 log10(peak |ACF| / peak |CCF with matched noise|).
double matched_noise_attenuation_db(const SampledSignal& ref, double duration_s, std::uint64_t seed);

} // namespace cpsfm

#endif
