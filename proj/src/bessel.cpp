#include "cpsfm/bessel.hpp"

#include "cpsfm/errors.hpp"
#include "gauss_legendre.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cpsfm {

namespace {

constexpr double kMaxExponent = 700.0;
constexpr int kInternalCap = 1 << 21;

void require_finite(const Eigen::VectorXcd& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) {
            throw InvalidArgument("GbfArgs: alpha_" + std::to_string(i + 1) + " is not finite");
        }
    }
}

// exp(j sum alpha_n cos(n theta)) has modulus up to exp(sum |Im alpha_n|).
void require_representable(const GbfArgs& args) {
    double growth = 0.0;
    Eigen::Index worst = 0;
    for (Eigen::Index i = 0; i < args.count(); ++i) {
        growth += std::abs(args.alphas[i].imag());
        if (std::abs(args.alphas[i].imag()) > std::abs(args.alphas[worst].imag())) worst = i;
    }
    if (growth > kMaxExponent) {
        throw RangeError("mgbf: generator modulus exp(" + std::to_string(growth) +
                         ") overflows; offending alpha_" + std::to_string(worst + 1) +
                         " has imaginary part " + std::to_string(args.alphas[worst].imag()));
    }
}

double bandwidth(const GbfArgs& args) {
    double b = 0.0;
    for (Eigen::Index i = 0; i < args.count(); ++i) b += (i + 1) * std::abs(args.alphas[i]);
    return b;
}

double max_abs_alpha(const GbfArgs& args) {
    return args.count() ? args.alphas.cwiseAbs().maxCoeff() : 0.0;
}

GbfArgs leading(const GbfArgs& args, Eigen::Index n) {
    return GbfArgs(Eigen::VectorXcd(args.alphas.head(n)));
}

// Tail estimate from the last 5% of the table: peak modulus times a geometric
// continuation whose ratio comes from a log-linear fit. Falls back to the
// contour bound when the window does not yet decay.
double geometric_tail(const Eigen::VectorXcd& c, const GbfArgs& args) {
    const int M = static_cast<int>(c.size()) - 1;
    const double rigorous = tail_bound(args, M);
    if (M < 3 || M < bandwidth(args)) return rigorous;
    const int w = std::max(3, static_cast<int>(std::ceil(0.05 * (M + 1))));
    const int first = M - w + 1;
    double peak = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (int m = first; m <= M; ++m) {
        const double a = std::abs(c[m]);
        peak = std::max(peak, a);
        if (a > 0.0) {
            const double y = std::log(a);
            sx += m;
            sy += y;
            sxx += double(m) * m;
            sxy += m * y;
            ++used;
        }
    }
    if (peak == 0.0) return 0.0;
    if (used < 2) return rigorous;
    const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    const double r = std::exp(slope);
    if (!(r < 0.999)) return rigorous;
    return std::min(rigorous, 2.0 * peak * r / (1.0 - r));
}

} // namespace

GbfArgs::GbfArgs(Eigen::VectorXcd a) : alphas(std::move(a)) {
    if (alphas.size() < 1) throw InvalidArgument("GbfArgs: at least one coefficient required");
    require_finite(alphas);
}

GbfArgs GbfArgs::from_real(const Eigen::VectorXd& a) {
    return GbfArgs(Eigen::VectorXcd(a.cast<cplx>()));
}

bool GbfArgs::is_real() const {
    return (alphas.imag().array() == 0.0).all();
}

// ---------------------------------------------------------------------------
// Single-variable modified Bessel functions

Eigen::VectorXcd mbf_table(cplx z, int max_order) {
    if (max_order < 0) throw InvalidArgument("mbf_table: max_order must be non-negative");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(max_order + 1);
    if (z == cplx(0.0, 0.0)) {
        out[0] = 1.0;
        return out;
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidArgument("mbf_table: non-finite argument");
    }
    if (std::abs(z.real()) > kMaxExponent) {
        throw RangeError("mbf_table: |Re z| = " + std::to_string(std::abs(z.real())) +
                         " overflows double precision");
    }

    if (std::abs(z) <= 1.0) {
        // Power series; terms decrease monotonically, no cancellation.
        const cplx half = 0.5 * z;
        const cplx quarter_sq = half * half;
        cplx lead(1.0, 0.0);  // (z/2)^m / m!
        for (int m = 0; m <= max_order; ++m) {
            if (m > 0) lead *= half / static_cast<double>(m);
            if (lead == cplx(0.0, 0.0)) break;
            cplx term = lead, sum = lead;
            for (int k = 1; k < 60; ++k) {
                term *= quarter_sq / (static_cast<double>(k) * (m + k));
                sum += term;
                if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
            }
            out[m] = sum;
        }
        return out;
    }

    // Miller's algorithm: I_n is the minimal solution of
    // I_{k-1} = I_{k+1} + (2k / z) I_k, so backward recurrence is stable.
    // Normalize with e^{s z} = I_0 + 2 sum_k s^k I_k, s = sign(Re z), whose
    // terms never exceed the result in modulus.
    const double n0 = std::max<double>(max_order, std::abs(z));
    const int start = static_cast<int>(n0 + 30.0 + std::ceil(std::sqrt(160.0 * n0)));
    const double s = z.real() >= 0.0 ? 1.0 : -1.0;
    const cplx two_over_z = 2.0 / z;

    cplx above(0.0, 0.0);
    cplx cur(1e-30, 0.0);
    cplx norm(0.0, 0.0);
    double sign_k = (start % 2 == 0 || s > 0) ? 1.0 : -1.0;
    for (int k = start; k >= 1; --k) {
        if (k <= max_order) out[k] = cur;
        norm += 2.0 * sign_k * cur;
        const cplx below = above + static_cast<double>(k) * two_over_z * cur;
        above = cur;
        cur = below;
        sign_k *= s;
        if (std::abs(cur) > 1e250) {
            constexpr double rescale = 1e-250;
            cur *= rescale;
            above *= rescale;
            norm *= rescale;
            if (k <= max_order) out.segment(k, max_order - k + 1) *= rescale;
        }
    }
    out[0] = cur;
    norm += cur;
    const cplx scale = std::exp(s * z) / norm;
    out *= scale;
    return out;
}

cplx mbf_complex(int m, cplx z) {
    const int k = m < 0 ? -m : m;
    return mbf_table(z, k)[k];
}

// ---------------------------------------------------------------------------
// Truncation

double tail_bound(const GbfArgs& args, int M) {
    if (M < 0) throw InvalidArgument("tail_bound: M must be non-negative");
    auto log_bound = [&](double r) {
        double growth = 0.0;
        for (Eigen::Index i = 0; i < args.count(); ++i) {
            const double n = static_cast<double>(i + 1);
            const double re = std::abs(args.alphas[i].real());
            const double im = std::abs(args.alphas[i].imag());
            if (re > 0.0) growth += re * std::sinh(n * r);
            if (im > 0.0) growth += im * std::cosh(n * r);
        }
        return std::log(2.0) + growth - (M + 1.0) * r - std::log1p(-std::exp(-r));
    };
    // Convex in r: golden-section search on [lo, hi].
    double lo = 1e-8, hi = 60.0;
    constexpr double phi = 0.6180339887498949;
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = log_bound(a), fb = log_bound(b);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = log_bound(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = log_bound(b);
        }
    }
    const double best = std::min({fa, fb, log_bound(lo), log_bound(hi)});
    return std::exp(best);
}

int choose_truncation(const GbfArgs& args, double tol, int cap) {
    if (!(tol > 0.0)) throw InvalidArgument("choose_truncation: tol must be positive");
    if (cap < 0) throw InvalidArgument("choose_truncation: cap must be non-negative");
    if (tail_bound(args, 0) <= tol) return 0;
    if (tail_bound(args, cap) > tol) {
        // Locate the requirement for the message, within a generous limit.
        int need = -1;
        for (int m = std::max(1, cap) * 2; m <= kInternalCap; m *= 2) {
            if (tail_bound(args, m) <= tol) {
                need = m;
                break;
            }
        }
        throw TruncationError("choose_truncation: expansion order " +
                                  (need > 0 ? "up to " + std::to_string(need) : std::string(">") +
                                                                                   std::to_string(kInternalCap)) +
                                  " required for tol " + std::to_string(tol) + " exceeds cap " +
                                  std::to_string(cap) + "; raise the cap",
                              need, cap);
    }
    int lo = 0, hi = cap;  // bound(lo) > tol, bound(hi) <= tol
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (tail_bound(args, mid) <= tol) hi = mid;
        else lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// FFT engine

FourierGbf::FourierGbf(int n_args, int grid_size)
    : n_args_(n_args), grid_size_(grid_size), cos_table_(n_args, grid_size),
      samples_(grid_size), spectrum_(grid_size) {
    if (n_args < 1 || grid_size < 2) throw InvalidArgument("FourierGbf: bad dimensions");
    for (int k = 0; k < grid_size; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid_size;
        for (int n = 0; n < n_args; ++n) cos_table_(n, k) = std::cos((n + 1) * theta);
    }
}

int FourierGbf::grid_size_for(int m_max, int m_tail) {
    // Aliases of order m land at |m - K| >= K - m_max, so K must clear both
    // 2 m_max and m_max + m_tail.
    const double want = static_cast<double>(m_max) + std::max(m_max, m_tail) + 32.0;
    if (want > kInternalCap) {
        throw TruncationError("FourierGbf: transform grid of " + std::to_string(want) +
                                  " points exceeds internal limit",
                              static_cast<int>(want), kInternalCap);
    }
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(want)));
}

double FourierGbf::compute(std::span<const cplx> alphas, int m_max, Eigen::VectorXcd& out) {
    if (static_cast<int>(alphas.size()) != n_args_) {
        throw InvalidArgument("FourierGbf::compute: argument count mismatch");
    }
    if (m_max < 0 || 2 * m_max >= grid_size_) {
        throw InvalidArgument("FourierGbf::compute: m_max too large for grid");
    }
    bool real = true;
    for (const auto& a : alphas) real = real && a.imag() == 0.0;
    for (int k = 0; k < grid_size_; ++k) {
        if (real) {
            double phase = 0.0;
            for (int n = 0; n < n_args_; ++n) phase += alphas[n].real() * cos_table_(n, k);
            samples_[k] = cplx(std::cos(phase), std::sin(phase));
        } else {
            cplx phase(0.0, 0.0);
            for (int n = 0; n < n_args_; ++n) phase += alphas[n] * cos_table_(n, k);
            samples_[k] = std::exp(cplx(0.0, 1.0) * phase);
        }
    }
    fft_.fwd(spectrum_, samples_);
    const double inv = 1.0 / grid_size_;
    out.resize(m_max + 1);
    for (int m = 0; m <= m_max; ++m) out[m] = spectrum_[m] * inv;
    double tail = 0.0;
    for (int m = m_max + 1; m <= grid_size_ / 2; ++m) tail += std::abs(spectrum_[m]) * inv;
    return 2.0 * tail;
}

// ---------------------------------------------------------------------------
// M-GBF tables

namespace {

GbfTable mgbf_fourier(const GbfArgs& args, int m_max, double tol) {
    require_representable(args);
    const int m_tail = choose_truncation(args, tol * 1e-3, kInternalCap);
    // At least 2 (m_max + N max|alpha| + guard) points, and alias-free.
    const double spec_size = 2.0 * (m_max + args.count() * max_abs_alpha(args) + 16.0);
    const int K = std::max(FourierGbf::grid_size_for(std::max(m_max, m_tail), m_tail),
                           FourierGbf::grid_size_for(static_cast<int>(std::min<double>(spec_size, kInternalCap)), 0));
    FourierGbf engine(static_cast<int>(args.count()), K);
    GbfTable t;
    const double tail = engine.compute(std::span<const cplx>(args.alphas.data(), args.alphas.size()),
                                       m_max, t.coeffs);
    t.truncation_order = m_max;
    t.est_tail = tail;
    return t;
}

GbfTable mgbf_integral(const GbfArgs& args, int m_max) {
    require_representable(args);
    // Composite 20-point Gauss-Legendre on [0, pi]; each panel spans at most
    // about two radians of integrand phase.
    constexpr int kRule = 20;
    static const auto rule = detail::gauss_legendre(kRule);
    const double rate = bandwidth(args) + m_max;
    const int panels = static_cast<int>(std::ceil(rate * std::numbers::pi / 2.0)) + 8;
    const double h = std::numbers::pi / panels;
    const int n_nodes = panels * kRule;

    std::vector<double> theta(n_nodes), weight(n_nodes);
    std::vector<cplx> f(n_nodes);
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (int i = 0; i < kRule; ++i) {
            const int idx = p * kRule + i;
            theta[idx] = mid + 0.5 * h * rule.first[i];
            weight[idx] = 0.5 * h * rule.second[i];
            cplx phase(0.0, 0.0);
            for (Eigen::Index n = 0; n < args.count(); ++n) {
                phase += args.alphas[n] * std::cos((n + 1.0) * theta[idx]);
            }
            f[idx] = std::exp(cplx(0.0, 1.0) * phase);
        }
    }
    GbfTable t;
    t.coeffs.resize(m_max + 1);
    for (int m = 0; m <= m_max; ++m) {
        cplx acc(0.0, 0.0);
        for (int idx = 0; idx < n_nodes; ++idx) acc += weight[idx] * std::cos(m * theta[idx]) * f[idx];
        t.coeffs[m] = acc / std::numbers::pi;
    }
    t.truncation_order = m_max;
    t.est_tail = geometric_tail(t.coeffs, args);
    return t;
}

GbfTable mgbf_recursion(const GbfArgs& args, int m_max, double tol) {
    const auto N = args.count();
    const cplx j(0.0, 1.0);
    auto range_for = [&](Eigen::Index n) {
        return std::max(m_max, choose_truncation(leading(args, n), tol * 1e-3, kInternalCap));
    };

    int range = range_for(1);
    Eigen::VectorXcd level = mbf_table(j * args.alphas[0], range);

    for (Eigen::Index n = 2; n <= N; ++n) {
        const cplx a = args.alphas[n - 1];
        const int next_range = range_for(n);
        if (a == cplx(0.0, 0.0)) {
            Eigen::VectorXcd grown = Eigen::VectorXcd::Zero(next_range + 1);
            const auto keep = std::min<Eigen::Index>(level.size(), grown.size());
            grown.head(keep) = level.head(keep);
            level = std::move(grown);
            range = next_range;
            continue;
        }
        // Inner sum over k stops once the neglected I_k(j alpha_n) carry less
        // than tol * 1e-2 in total.
        const GbfArgs single(Eigen::VectorXcd::Constant(1, a));
        const int k_max = choose_truncation(single, tol * 1e-2, kInternalCap);
        const Eigen::VectorXcd bessel = mbf_table(j * a, k_max);

        Eigen::VectorXcd next = Eigen::VectorXcd::Zero(next_range + 1);
        const auto prev_at = [&](long i) {
            const long k = i < 0 ? -i : i;
            return k <= range ? level[k] : cplx(0.0, 0.0);
        };
        for (int m = 0; m <= next_range; ++m) {
            cplx acc = prev_at(m) * bessel[0];
            for (int k = 1; k <= k_max; ++k) {
                acc += (prev_at(m - n * k) + prev_at(m + n * k)) * bessel[k];
            }
            next[m] = acc;
        }
        level = std::move(next);
        range = next_range;
    }

    GbfTable t;
    t.coeffs = level.head(m_max + 1);
    t.truncation_order = m_max;
    t.est_tail = geometric_tail(t.coeffs, args);
    return t;
}

} // namespace

GbfTable mgbf(const GbfArgs& args, int m_max, GbfMethod method, double tol) {
    if (m_max < 0) throw InvalidArgument("mgbf: m_max must be non-negative");
    if (args.count() < 1) throw InvalidArgument("mgbf: empty argument vector");
    if (!(tol > 0.0)) throw InvalidArgument("mgbf: tol must be positive");
    GbfTable t;
    switch (method) {
        case GbfMethod::fourier: t = mgbf_fourier(args, m_max, tol); break;
        case GbfMethod::integral: t = mgbf_integral(args, m_max); break;
        case GbfMethod::recursion: t = mgbf_recursion(args, m_max, tol); break;
    }
    t.tail_warning = t.est_tail > tol;
    return t;
}

} // namespace cpsfm
