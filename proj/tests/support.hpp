#ifndef CPSFM_TESTS_SUPPORT_HPP
#define CPSFM_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cpsfm/cpsfm.hpp"

namespace cpsfm::testing {

/// Random waveform of order 1..max_order whose phase coefficients are drawn
/// uniformly from [-bound, bound] (phi0 included).
inline CpsfmWaveform random_waveform(std::mt19937_64& rng, int max_order = 6, double bound = 40.0,
                                     double duration_s = 1.0) {
    std::uniform_int_distribution<int> order(1, max_order);
    std::uniform_real_distribution<double> coeff(-bound, bound);
    const int n = order(rng);
    Eigen::VectorXd pmf(n + 1);
    for (int i = 0; i <= n; ++i) pmf[i] = coeff(rng);
    const ChebSeriesd fmf = differentiate_pmf(ChebSeriesd(pmf));
    return build_waveform(fmf, duration_s, pmf[0]);
}

inline std::vector<CpsfmWaveform> random_population(int count, std::uint64_t seed, int max_order = 6,
                                                    double bound = 40.0) {
    std::mt19937_64 rng(seed);
    std::vector<CpsfmWaveform> out;
    for (int i = 0; i < count; ++i) out.push_back(random_waveform(rng, max_order, bound));
    return out;
}

/// Range [lo, hi] of g(x) on a dense scan.
inline std::pair<double, double> fmf_range(const CpsfmWaveform& w) {
    double lo = w.normalized_frequency(-1.0), hi = lo;
    for (int i = 0; i <= 4000; ++i) {
        const double g = w.normalized_frequency(-1.0 + i / 2000.0);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    return {lo, hi};
}

/// `count` points spanning 1.5x the FMF range (at least [-2, 2] around it).
inline Eigen::VectorXd spectrum_grid(const CpsfmWaveform& w, int count) {
    const auto [lo, hi] = fmf_range(w);
    const double mid = 0.5 * (lo + hi);
    const double half = std::max(0.75 * (hi - lo), 2.0);
    return Eigen::VectorXd::LinSpaced(count, mid - half, mid + half);
}

/// J_m(x) by its power series; independent of the library's recurrences.
inline double bessel_j_series(int m, double x) {
    double term = 1.0;
    for (int k = 1; k <= m; ++k) term *= 0.5 * x / k;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -0.25 * x * x / (k * (k + m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// Direct monomial evaluation of a Chebyshev series via T_n(cos t) = cos(n t)
/// for |x| <= 1 and the cosh form outside.
inline double cheb_direct(const Eigen::VectorXd& c, double x) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < c.size(); ++n) {
        double t;
        if (std::abs(x) <= 1.0) t = std::cos(n * std::acos(x));
        else if (x > 1.0) t = std::cosh(n * std::acosh(x));
        else t = ((n % 2) ? -1.0 : 1.0) * std::cosh(n * std::acosh(-x));
        s += c[n] * t;
    }
    return s;
}

inline std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cpsfm_test_" + name)).string();
}

} // namespace cpsfm::testing

#endif
