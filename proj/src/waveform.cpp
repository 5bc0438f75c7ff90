#include "cpsfm/waveform.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cpsfm {

namespace {

void validate_hfm(const HfmSpec& s) {
    if (!(s.f1_hz > 0.0) || !(s.f2_hz > 0.0)) {
        throw InvalidArgument("HFM: frequencies must be positive");
    }
    if (!(s.duration_s > 0.0)) throw InvalidArgument("HFM: duration must be positive");
}

} // namespace

CpsfmWaveform::CpsfmWaveform(ChebSeriesd fmf, double duration_s, double phi0)
    : fmf_(std::move(fmf)), pmf_(integrate_fmf(fmf_, phi0)), duration_(duration_s), phi0_(phi0) {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw InvalidArgument("waveform duration must be positive, got " + std::to_string(duration_s));
    }
    if (!fmf_.coeffs().allFinite() || !std::isfinite(phi0)) {
        throw InvalidArgument("waveform coefficients must be finite");
    }
}

double CpsfmWaveform::instantaneous_frequency_hz(double t) const {
    return 2.0 / duration_ * normalized_frequency(2.0 * t / duration_);
}

double CpsfmWaveform::peak_frequency_hz() const {
    constexpr int n = 4097;
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        peak = std::max(peak, std::abs(normalized_frequency(x)));
    }
    return 2.0 / duration_ * peak;
}

CpsfmWaveform build_waveform(const ChebSeriesd& fmf, double duration_s, double phi0) {
    return CpsfmWaveform(fmf, duration_s, phi0);
}

SampledSignal sample(const CpsfmWaveform& w, double fs) {
    const double T = w.duration_s();
    if (!(fs > 0.0) || fs * T < 2.0) {
        throw InvalidArgument("sample: need fs * T >= 2 (fs = " + std::to_string(fs) + ")");
    }
    const auto n = static_cast<Eigen::Index>(std::llround(fs * T));
    SampledSignal out;
    out.fs = fs;
    out.t0 = -0.5 * T + 0.5 / fs;
    out.samples.resize(n);
    const double amp = 1.0 / std::sqrt(T);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = 2.0 * out.time(k) / T;
        out.samples[k] = std::polar(amp, w.phase(x));
    }
    out.aliased = fs < 2.0 * w.peak_frequency_hz();
    return out;
}

double hfm_fmf(const HfmSpec& spec, double t) {
    validate_hfm(spec);
    const double T = spec.duration_s;
    if (t < 0.0 || t > T) throw InvalidArgument("hfm_fmf: t outside [0, T]");
    const double denom = (spec.f1_hz - spec.f2_hz) * t + spec.f2_hz * T;
    if (!(denom > 0.0)) throw InvalidArgument("hfm_fmf: non-positive denominator");
    return spec.f1_hz * spec.f2_hz * T / denom;
}

double hfm_phase(const HfmSpec& spec, double t) {
    validate_hfm(spec);
    const double f1 = spec.f1_hz, f2 = spec.f2_hz, T = spec.duration_s;
    if (f1 == f2) return 2.0 * std::numbers::pi * f1 * t;
    const double k = f1 * f2 * T / (f1 - f2);
    return 2.0 * std::numbers::pi * k * std::log1p((f1 - f2) * t / (f2 * T));
}

CpsfmWaveform approximate_hfm(const HfmSpec& spec, int order) {
    validate_hfm(spec);
    if (order < 2) throw InvalidArgument("approximate_hfm: order must be at least 2");
    const double T = spec.duration_s;
    auto g = [&](double x) {
        const double t = 0.5 * (x + 1.0) * T;
        return 0.5 * T * hfm_fmf(spec, t);
    };
    return build_waveform(interpolate(g, order - 1), T, 0.0);
}

} // namespace cpsfm
