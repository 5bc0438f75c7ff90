#ifndef CPSFM_WAVEFORM_HPP
#define CPSFM_WAVEFORM_HPP

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>

#include "cpsfm/cheb_series.hpp"

namespace cpsfm {

/**
 * Constant-modulus finite-duration FM burst whose normalized frequency
 * modulation g(x), x = 2t/T in [-1, 1], is a Chebyshev series.
 *
 * An order-N waveform has an order-(N-1) frequency series and an order-N
 * phase series. The phase series is always derived from the frequency series.
 */
class CpsfmWaveform {
public:
    CpsfmWaveform(ChebSeriesd fmf, double duration_s, double phi0 = 0.0);

    double duration_s() const { return duration_; }
    double phi0() const { return phi0_; }
    const ChebSeriesd& fmf() const { return fmf_; }
    const ChebSeriesd& pmf() const { return pmf_; }
    /// CPSFM order (= order of the phase series).
    int order() const { return static_cast<int>(pmf_.order()); }

    /// g(x), dimensionless.
    double normalized_frequency(double x) const { return eval_series(fmf_, x); }
    /// f(t) = (2/T) g(2t/T) for t in [-T/2, T/2].
    double instantaneous_frequency_hz(double t) const;
    /// phi(x) including phi0.
    double phase(double x) const { return eval_series(pmf_, x); }
    /// Largest |f(t)| over the burst, from a dense scan.
    double peak_frequency_hz() const;

private:
    ChebSeriesd fmf_;
    ChebSeriesd pmf_;
    double duration_;
    double phi0_;
};

/// Validated construction; throws InvalidArgument for non-positive duration.
CpsfmWaveform build_waveform(const ChebSeriesd& fmf, double duration_s, double phi0 = 0.0);

/// Uniformly sampled complex baseband signal, first sample at t0.
struct SampledSignal {
    Eigen::VectorXcd samples;
    double fs = 0.0;
    double t0 = 0.0;
    /// Sample rate below twice the peak instantaneous frequency.
    bool aliased = false;

    double time(Eigen::Index k) const { return t0 + static_cast<double>(k) / fs; }
};

/**
 * round(fs T) samples of (1/sqrt(T)) exp(j phi(2t/T)) at the midpoints
 * t_k = -T/2 + (k + 1/2)/fs, so that sum |s_k|^2 / fs = round(fs T)/(fs T).
 */
SampledSignal sample(const CpsfmWaveform& w, double fs);

/// Hyperbolic FM from f1 (t = 0) to f2 (t = T).
struct HfmSpec {
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    double duration_s = 0.0;
};

/// f(t) = f1 f2 T / ((f1 - f2) t + f2 T), t in [0, T].
double hfm_fmf(const HfmSpec& spec, double t);

/// 2 pi times the integral of hfm_fmf from 0 to t.
double hfm_phase(const HfmSpec& spec, double t);

/// Order-N CPSFM whose frequency series interpolates the HFM at the
/// order-(N-1) Chebyshev nodes, with t in [0, T] mapped onto x in [-1, 1].
CpsfmWaveform approximate_hfm(const HfmSpec& spec, int order);

} // namespace cpsfm

#endif
