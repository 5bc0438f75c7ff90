#ifndef CPSFM_BESSEL_HPP
#define CPSFM_BESSEL_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <complex>
#include <span>
#include <vector>

namespace cpsfm {

using cplx = std::complex<double>;

inline constexpr int kDefaultTruncationCap = 4096;

/**
 * Argument vector {alpha_1, ..., alpha_N} of the modified generalized Bessel
 * function I_m(j{alpha_n}), i.e. the Fourier coefficients of
 * theta -> exp(j sum_n alpha_n cos(n theta)).
 *
 * alphas[0] holds alpha_1.
 */
struct GbfArgs {
    Eigen::VectorXcd alphas;

    GbfArgs() = default;
    explicit GbfArgs(Eigen::VectorXcd a);
    static GbfArgs from_real(const Eigen::VectorXd& a);

    Eigen::Index count() const { return alphas.size(); }
    bool is_real() const;
};

enum class GbfMethod { fourier, integral, recursion };

/// Coefficients I_0 ... I_M. Negative orders follow from I_{-m} = I_m.
struct GbfTable {
    Eigen::VectorXcd coeffs;
    int truncation_order = 0;
    /// Estimate of sum_{|m| > M} |I_m|.
    double est_tail = 0.0;
    /// Set when est_tail exceeds the requested tolerance.
    bool tail_warning = false;

    cplx at(int m) const {
        const int k = m < 0 ? -m : m;
        return k < coeffs.size() ? coeffs[k] : cplx(0.0, 0.0);
    }
};

/// Modified Bessel function of the first kind I_m(z), integer m, complex z.
cplx mbf_complex(int m, cplx z);

/// I_0(z) ... I_{max_order}(z) from one backward (Miller) recurrence.
Eigen::VectorXcd mbf_table(cplx z, int max_order);

/**
 * Upper bound on sum_{|m| > M} |I_m(j{alpha_n})|.
 *
 * Shifting the Fourier contour to theta + j r gives
 * |I_m| <= exp(sum_n |Re a_n| sinh(n r) + |Im a_n| cosh(n r)) e^{-|m| r};
 * the geometric tail is minimized over r > 0.
 */
double tail_bound(const GbfArgs& args, int M);

/// Smallest M with tail_bound(args, M) <= tol. Throws TruncationError above cap.
int choose_truncation(const GbfArgs& args, double tol, int cap = kDefaultTruncationCap);

/// I_0 ... I_{m_max} by the requested method. `tol` sets the internal grid,
/// inner-sum truncation and the tail warning threshold.
GbfTable mgbf(const GbfArgs& args, int m_max, GbfMethod method = GbfMethod::fourier,
              double tol = 1e-12);

/**
 * Reusable FFT evaluator for many argument vectors of the same length.
 *
 * Samples exp(j sum_n alpha_n cos(n theta_k)) on `grid_size` uniform points
 * and returns the leading Fourier coefficients. Coefficients beyond
 * grid_size - m_max alias onto the result, so grid_size should exceed the
 * truncation order of the arguments plus m_max.
 */
class FourierGbf {
public:
    FourierGbf(int n_args, int grid_size);

    /// Smallest power of two free of aliasing for coefficients up to `m_max`
    /// when the coefficients beyond `m_tail` are negligible.
    static int grid_size_for(int m_max, int m_tail);

    int grid_size() const { return grid_size_; }

    /// Writes I_0 ... I_{m_max} to `out`. Returns the raw spectrum modulus sum
    /// of orders m_max+1 ... grid_size/2, a direct tail measurement.
    double compute(std::span<const cplx> alphas, int m_max, Eigen::VectorXcd& out);

private:
    int n_args_;
    int grid_size_;
    Eigen::MatrixXd cos_table_;  // (n_args, grid_size): cos(n theta_k)
    std::vector<cplx> samples_;
    std::vector<cplx> spectrum_;
    Eigen::FFT<double> fft_;
};

} // namespace cpsfm

#endif
