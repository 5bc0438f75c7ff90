#include "cpsfm/oracle.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gauss_legendre.hpp"

namespace cpsfm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPanelPhase = 6.0;  // radians of phase per initial panel
constexpr int kGaussPoints = 20;

struct Integrand {
    virtual ~Integrand() = default;
    virtual cplx operator()(double x) const = 0;
};

class Quadrature {
public:
    Quadrature(const Integrand& f, const QuadSpec& spec) : f_(f), spec_(spec) {
        if (!(spec.abs_tol > 0.0)) throw InvalidArgument("QuadSpec: abs_tol must be positive");
        if (spec.max_subdivisions < 1) throw InvalidArgument("QuadSpec: max_subdivisions must be >= 1");
        const auto [x, w] = detail::gauss_legendre(kGaussPoints);
        nodes_ = x;
        weights_ = w;
    }

    // `rate` bounds |d phase / dx| and sizes the initial panels.
    cplx integrate(double lo, double hi, double rate) {
        if (!(hi > lo)) return cplx(0.0, 0.0);
        const double width = hi - lo;
        const int panels =
            std::max(1, static_cast<int>(std::ceil(rate * width / kPanelPhase)));
        if (panels > spec_.max_subdivisions) fail(panels);
        switch (spec_.rule) {
        case QuadRule::gauss_legendre: return adaptive(lo, hi, panels, &Quadrature::gl_step);
        case QuadRule::adaptive_simpson: return adaptive(lo, hi, panels, &Quadrature::simpson_step);
        case QuadRule::trapezoid_dense: return trapezoid(lo, hi, panels);
        }
        return {};
    }

private:
    struct Step {
        cplx value;
        double error;
    };
    using StepFn = Step (Quadrature::*)(double, double) const;

    [[noreturn]] void fail(long used) const {
        throw QuadratureError("quadrature did not reach abs_tol " + std::to_string(spec_.abs_tol) +
                              " within " + std::to_string(spec_.max_subdivisions) +
                              " subdivisions (needed " + std::to_string(used) + ")");
    }

    cplx gauss(double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        cplx acc(0.0, 0.0);
        for (int i = 0; i < kGaussPoints; ++i) acc += weights_[i] * f_(c + h * nodes_[i]);
        return h * acc;
    }

    Step gl_step(double a, double b) const {
        const double m = 0.5 * (a + b);
        const cplx coarse = gauss(a, b);
        const cplx fine = gauss(a, m) + gauss(m, b);
        return {fine, std::abs(fine - coarse)};
    }

    Step simpson_step(double a, double b) const {
        const double m = 0.5 * (a + b);
        const cplx fa = f_(a), fm = f_(m), fb = f_(b);
        const cplx f1 = f_(0.5 * (a + m)), f2 = f_(0.5 * (m + b));
        const double h = b - a;
        const cplx coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        const cplx fine = h / 12.0 * (fa + 4.0 * f1 + 2.0 * fm + 4.0 * f2 + fb);
        const cplx diff = fine - coarse;
        return {fine + diff / 15.0, std::abs(diff) / 15.0};
    }

    // Depth-first bisection; each accepted panel meets its share of abs_tol.
    cplx adaptive(double lo, double hi, int panels, StepFn step) const {
        const double density = spec_.abs_tol / (hi - lo);
        std::vector<std::pair<double, double>> stack;
        const double w = (hi - lo) / panels;
        for (int i = panels - 1; i >= 0; --i) {
            const double a = lo + i * w;
            stack.emplace_back(a, i + 1 == panels ? hi : a + w);
        }
        long used = panels;
        cplx total(0.0, 0.0);
        while (!stack.empty()) {
            const auto [a, b] = stack.back();
            stack.pop_back();
            const Step s = (this->*step)(a, b);
            if (s.error <= density * (b - a)) {
                total += s.value;
                continue;
            }
            const double m = 0.5 * (a + b);
            if (++used > spec_.max_subdivisions || !(m > a && m < b)) fail(used);
            stack.emplace_back(m, b);
            stack.emplace_back(a, m);
        }
        return total;
    }

    cplx trapezoid(double lo, double hi, int panels) const {
        auto rule = [&](long n) {
            const double h = (hi - lo) / static_cast<double>(n);
            cplx acc = 0.5 * (f_(lo) + f_(hi));
            for (long i = 1; i < n; ++i) acc += f_(lo + static_cast<double>(i) * h);
            return h * acc;
        };
        long n = panels;
        cplx prev = rule(n);
        while (true) {
            n *= 2;
            if (n > spec_.max_subdivisions) fail(n);
            const cplx next = rule(n);
            if (std::abs(next - prev) / 3.0 <= spec_.abs_tol) return next + (next - prev) / 3.0;
            prev = next;
        }
    }

    const Integrand& f_;
    QuadSpec spec_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

double coeff_l1(const ChebSeriesd& s) { return s.coeffs().cwiseAbs().sum(); }

struct SpectrumIntegrand final : Integrand {
    const CpsfmWaveform& w;
    double g;
    SpectrumIntegrand(const CpsfmWaveform& w_, double g_) : w(w_), g(g_) {}
    cplx operator()(double x) const override {
        return std::polar(1.0, w.phase(x) - 2.0 * kPi * g * x);
    }
};

struct LagIntegrand final : Integrand {
    const CpsfmWaveform& a;
    const CpsfmWaveform& b;
    double xi, nu;
    LagIntegrand(const CpsfmWaveform& a_, const CpsfmWaveform& b_, double xi_, double nu_)
        : a(a_), b(b_), xi(xi_), nu(nu_) {}
    cplx operator()(double x) const override {
        const double u = std::clamp(nu * (x + xi), -1.0, 1.0);
        return std::polar(1.0, b.phase(u) - a.phase(x));
    }
};

Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

} // namespace

cplx quad_transform(TransformKind kind, const CpsfmWaveform& a, const CpsfmWaveform* b,
                    const TransformPoint& p, const QuadSpec& spec) {
    const CpsfmWaveform& bb = b ? *b : a;
    // |d phase/dx| = 2 pi |g(x)| <= 2 pi sum |a_n| since |T_n| <= 1 on [-1, 1].
    if (kind == TransformKind::spectrum) {
        if (!std::isfinite(p.g)) throw InvalidArgument("quad_transform: non-finite g");
        SpectrumIntegrand f(a, p.g);
        Quadrature q(f, spec);
        return q.integrate(-1.0, 1.0, 2.0 * kPi * (coeff_l1(a.fmf()) + std::abs(p.g)));
    }
    if (a.duration_s() != bb.duration_s()) {
        throw InvalidArgument("quad_transform: waveform durations differ");
    }
    const double nu = kind == TransformKind::correlation ? 1.0 : p.nu;
    if (!(nu > 0.0) || !std::isfinite(nu) || !std::isfinite(p.xi)) {
        throw InvalidArgument("quad_transform: need finite xi and positive finite nu");
    }
    // Overlap of [-1, 1] with {x : |nu (x + xi)| <= 1}.
    const double lo = std::max(-1.0, -1.0 / nu - p.xi);
    const double hi = std::min(1.0, 1.0 / nu - p.xi);
    if (!(hi > lo)) return cplx(0.0, 0.0);
    LagIntegrand f(a, bb, p.xi, nu);
    Quadrature q(f, spec);
    const double rate = 2.0 * kPi * (coeff_l1(a.fmf()) + nu * coeff_l1(bb.fmf()));
    return 0.5 * std::sqrt(nu) * q.integrate(lo, hi, rate);
}

cplx quad_spectrum(const CpsfmWaveform& w, double g, const QuadSpec& spec) {
    return quad_transform(TransformKind::spectrum, w, nullptr, TransformPoint{g, 0.0, 1.0}, spec);
}

cplx quad_correlation(const CpsfmWaveform& a, const CpsfmWaveform& b, double xi, const QuadSpec& spec) {
    return quad_transform(TransformKind::correlation, a, &b, TransformPoint{0.0, xi, 1.0}, spec);
}

cplx quad_ambiguity(const CpsfmWaveform& a, const CpsfmWaveform& b, double xi, double nu,
                    const QuadSpec& spec) {
    return quad_transform(TransformKind::ambiguity, a, &b, TransformPoint{0.0, xi, nu}, spec);
}

DiscreteSource DiscreteSource::from_waveform(const CpsfmWaveform& w) {
    const double T = w.duration_s();
    return DiscreteSource{[w, T](double t) { return w.phase(2.0 * t / T); }, T, w.peak_frequency_hz()};
}

DiscreteSource DiscreteSource::from_hfm(const HfmSpec& spec) {
    const double T = spec.duration_s;
    // hfm_phase validates the spec.
    hfm_phase(spec, 0.0);
    return DiscreteSource{
        [spec, T](double t) { return hfm_phase(spec, std::clamp(t + 0.5 * T, 0.0, T)); }, T,
        std::max(spec.f1_hz, spec.f2_hz)};
}

SampledSignal sample_source(const DiscreteSource& src, double fs) {
    const double T = src.duration_s;
    if (!(T > 0.0)) throw InvalidArgument("sample_source: duration must be positive");
    if (!(fs >= kMinOversampling * src.peak_frequency_hz) || fs * T < 2.0) {
        throw InvalidArgument("sample_source: fs = " + std::to_string(fs) +
                              " Hz is below 10x the peak frequency " +
                              std::to_string(src.peak_frequency_hz) + " Hz");
    }
    const auto n = static_cast<Eigen::Index>(std::llround(fs * T));
    SampledSignal out;
    out.fs = fs;
    out.t0 = -0.5 * T + 0.5 / fs;
    out.samples.resize(n);
    const double amp = 1.0 / std::sqrt(T);
    for (Eigen::Index k = 0; k < n; ++k) out.samples[k] = std::polar(amp, src.phase(out.time(k)));
    return out;
}

ResultGrid discrete_spectrum(const SampledSignal& s, double duration_s, int pad) {
    if (s.samples.size() == 0 || pad < 1) throw InvalidArgument("discrete_spectrum: empty input");
    const auto n = static_cast<std::size_t>(s.samples.size());
    const std::size_t K = std::bit_ceil(n * static_cast<std::size_t>(pad));
    std::vector<cplx> in(K, cplx(0.0, 0.0)), out;
    std::copy(s.samples.data(), s.samples.data() + n, in.begin());
    fft_engine().fwd(out, in);

    const double T = duration_s;
    Eigen::VectorXd g(static_cast<Eigen::Index>(K));
    Eigen::VectorXcd values(static_cast<Eigen::Index>(K));
    const long half = static_cast<long>(K / 2);
    for (long i = 0; i < static_cast<long>(K); ++i) {
        const long k = i - half;
        const double f = static_cast<double>(k) * s.fs / static_cast<double>(K);
        const cplx bin = out[static_cast<std::size_t>((k + static_cast<long>(K)) % static_cast<long>(K))];
        const cplx nat = std::polar(1.0 / s.fs, -2.0 * kPi * f * s.t0) * bin;
        g[i] = 0.5 * f * T;
        values[i] = 2.0 / std::sqrt(T) * nat;
    }
    GridMeta meta;
    meta.kind = "discrete_spectrum";
    return ResultGrid({GridAxis{"g", g}}, std::move(values), std::move(meta));
}

ResultGrid discrete_correlation(const SampledSignal& a, const SampledSignal& b, double duration_s) {
    if (a.fs != b.fs) throw InvalidArgument("discrete_correlation: sample rates differ");
    const auto na = static_cast<std::size_t>(a.samples.size());
    const auto nb = static_cast<std::size_t>(b.samples.size());
    if (na == 0 || nb == 0) throw InvalidArgument("discrete_correlation: empty input");
    const std::size_t L = std::bit_ceil(na + nb - 1);
    std::vector<cplx> pa(L, cplx(0.0, 0.0)), pb(L, cplx(0.0, 0.0)), fa, fb, r;
    std::copy(a.samples.data(), a.samples.data() + na, pa.begin());
    std::copy(b.samples.data(), b.samples.data() + nb, pb.begin());
    auto& fft = fft_engine();
    fft.fwd(fa, pa);
    fft.fwd(fb, pb);
    for (std::size_t k = 0; k < L; ++k) fa[k] = std::conj(fa[k]) * fb[k];
    fft.inv(r, fa);

    const long lmin = -static_cast<long>(na) + 1, lmax = static_cast<long>(nb) - 1;
    const auto count = static_cast<Eigen::Index>(lmax - lmin + 1);
    Eigen::VectorXd xi(count);
    Eigen::VectorXcd values(count);
    for (long l = lmin; l <= lmax; ++l) {
        const Eigen::Index i = l - lmin;
        const double tau = b.t0 - a.t0 + static_cast<double>(l) / a.fs;
        xi[i] = 2.0 * tau / duration_s;
        values[i] = r[static_cast<std::size_t>((l + static_cast<long>(L)) % static_cast<long>(L))] / a.fs;
    }
    GridMeta meta;
    meta.kind = "discrete_correlation";
    return ResultGrid({GridAxis{"xi", xi}}, std::move(values), std::move(meta));
}

ResultGrid discrete_ambiguity(const DiscreteSource& a, const DiscreteSource& b, const Eigen::VectorXd& xi,
                              const Eigen::VectorXd& nu, double fs) {
    if (a.duration_s != b.duration_s) throw InvalidArgument("discrete_ambiguity: durations differ");
    const SampledSignal sa = sample_source(a, fs);
    const double T = a.duration_s;
    const double amp = 1.0 / std::sqrt(T);
    Eigen::VectorXcd values(xi.size() * nu.size());
    for (Eigen::Index r = 0; r < nu.size(); ++r) {
        const double v = nu[r];
        if (!(v > 0.0)) throw InvalidArgument("discrete_ambiguity: nu must be positive");
        if (!(fs >= kMinOversampling * v * b.peak_frequency_hz)) {
            throw InvalidArgument("discrete_ambiguity: fs too low for the scaled signal");
        }
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            const double tau = 0.5 * xi[i] * T;
            cplx acc(0.0, 0.0);
            for (Eigen::Index k = 0; k < sa.samples.size(); ++k) {
                const double u = v * (sa.time(k) + tau);
                if (std::abs(u) > 0.5 * T) continue;
                acc += std::conj(sa.samples[k]) * std::polar(amp, b.phase(u));
            }
            values[r * xi.size() + i] = std::sqrt(v) * acc / fs;
        }
    }
    GridMeta meta;
    meta.kind = "discrete_ambiguity";
    return ResultGrid({GridAxis{"nu", nu}, GridAxis{"xi", xi}}, std::move(values), std::move(meta));
}

SampledSignal matched_noise(const SampledSignal& ref, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(ref.samples.size());
    if (n == 0) throw InvalidArgument("matched_noise: empty reference");
    std::vector<cplx> in(ref.samples.data(), ref.samples.data() + n), spec, noise;
    auto& fft = fft_engine();
    fft.fwd(spec, in);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (auto& c : spec) c = std::polar(std::abs(c), phase(rng));
    fft.inv(noise, spec);

    SampledSignal out = ref;
    out.aliased = false;
    for (std::size_t k = 0; k < n; ++k) out.samples[static_cast<Eigen::Index>(k)] = noise[k];
    const double scale = std::sqrt(ref.samples.squaredNorm() / out.samples.squaredNorm());
    out.samples *= scale;
    return out;
}

ResultGrid matched_noise_ccf(const SampledSignal& ref, double duration_s, std::uint64_t seed) {
    ResultGrid g = discrete_correlation(ref, matched_noise(ref, seed), duration_s);
    g.meta().kind = "matched_noise_ccf";
    return g;
}

double matched_noise_attenuation_db(const SampledSignal& ref, double duration_s, std::uint64_t seed) {
    const double acf = discrete_correlation(ref, ref, duration_s).values().cwiseAbs().maxCoeff();
    const double ccf = matched_noise_ccf(ref, duration_s, seed).values().cwiseAbs().maxCoeff();
    return 20.0 * std::log10(acf / ccf);
}

} // namespace cpsfm
