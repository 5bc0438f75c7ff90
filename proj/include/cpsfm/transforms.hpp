#ifndef CPSFM_TRANSFORMS_HPP
#define CPSFM_TRANSFORMS_HPP

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cpsfm/bessel.hpp"
#include "cpsfm/waveform.hpp"

namespace cpsfm {

/// Overlap [x1, x2] of a burst and its copy delayed by xi and scaled by nu,
/// with theta_i = acos(x_i).
struct SupportLimits {
    double x1 = -1.0;
    double x2 = 1.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    bool empty = false;
};

SupportLimits support_limits(double xi, double nu);

/// Integral of e^{j m theta} sin(theta) over [theta2, theta1].
cplx gamma_coeff(int m, double theta1, double theta2);

struct GridAxis {
    std::string name;  // "g", "xi" or "nu"
    Eigen::VectorXd values;
};

struct GridMeta {
    std::string kind;
    std::vector<std::string> waveforms;
    int truncation = 0;
    double tolerance = 0.0;
    std::string route;
};

/**
 * Sampled transform output. Values are stored row-major over the axes, the
 * last axis varying fastest; the value count equals the product of the axis
 * lengths.
 */
class ResultGrid {
public:
    ResultGrid() = default;
    ResultGrid(std::vector<GridAxis> axes, Eigen::VectorXcd values, GridMeta meta = {});

    const std::vector<GridAxis>& axes() const { return axes_; }
    const Eigen::VectorXcd& values() const { return values_; }
    const GridMeta& meta() const { return meta_; }
    GridMeta& meta() { return meta_; }

    Eigen::Index size() const { return values_.size(); }
    cplx operator()(Eigen::Index i) const { return values_[i]; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const {
        return values_[i * axes_.back().values.size() + j];
    }

private:
    std::vector<GridAxis> axes_;
    Eigen::VectorXcd values_;
    GridMeta meta_;
};

enum class SpectrumKernel {
    /// exp(-j 2 pi g x) folded into the real first phase coefficient.
    absorbed_real,
    /// First coefficient alpha_1 - j 2 pi g as printed in the original
    /// derivation; kept for comparison only, it does not give the spectrum.
    literal_complex,
};

enum class CorrelationRoute {
    /// Overlap interval mapped onto [-1, 1] before the Bessel expansion.
    support_mapped,
    /// Full-domain expansion with partial-interval gamma coefficients.
    literal,
};

struct TransformOptions {
    double tol = 1e-10;
    int mmax_cap = kDefaultTruncationCap;
    /// Overrides the automatic truncation order when set.
    std::optional<int> fixed_truncation;
    SpectrumKernel spectrum_kernel = SpectrumKernel::absorbed_real;
    CorrelationRoute route = CorrelationRoute::support_mapped;
};

/// S(g) = integral over [-1, 1] of exp(j phi(x) - j 2 pi g x) dx.
ResultGrid spectrum(const CpsfmWaveform& w, const Eigen::VectorXd& g,
                    const TransformOptions& opts = {});

/// R_ab(xi) = (1/2) integral of conj(s_a(x)) s_b(x + xi) dx. Durations must match.
ResultGrid correlation(const CpsfmWaveform& a, const CpsfmWaveform& b, const Eigen::VectorXd& xi,
                       const TransformOptions& opts = {});
ResultGrid correlation(const CpsfmWaveform& a, const Eigen::VectorXd& xi,
                       const TransformOptions& opts = {});

/// chi_ab(xi, nu) = (sqrt(nu)/2) integral of conj(s_a(x)) s_b(nu (x + xi)) dx
/// on axes (nu, xi).
ResultGrid ambiguity(const CpsfmWaveform& a, const CpsfmWaveform& b, const Eigen::VectorXd& xi,
                     const Eigen::VectorXd& nu, const TransformOptions& opts = {});
ResultGrid ambiguity(const CpsfmWaveform& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& nu,
                     const TransformOptions& opts = {});

/// nu = (1 + v/c) / (1 - v/c).
double doppler_factor(double v, double c);

struct JammingOptions {
    double xi_step = 1e-3;
    TransformOptions transform;
};

struct JammingReport {
    double rejection_db = 0.0;
    double acf_peak = 0.0;
    double ccf_peak = 0.0;
    double ccf_peak_xi = 0.0;
    int truncation = 0;
};

/// Peak |R_aa| over peak |R_ab| on a uniform xi grid over [-2, 2], with
/// three-point parabolic refinement of each peak.
JammingReport jamming_report(const CpsfmWaveform& a, const CpsfmWaveform& b,
                             const JammingOptions& opts = {});
double jamming_rejection_db(const CpsfmWaveform& a, const CpsfmWaveform& b,
                            const JammingOptions& opts = {});

/// Uniform grid lo, lo + step, ... up to hi (inclusive within step/2). Entries
/// within 1e-9 step of zero are set to exactly zero.
Eigen::VectorXd uniform_grid(double lo, double hi, double step);

} // namespace cpsfm

#endif
