#ifndef CPSFM_CHEB_SERIES_HPP
#define CPSFM_CHEB_SERIES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>
#include <type_traits>
#include <utility>

#include "cpsfm/errors.hpp"

namespace cpsfm {

/**
 * A finite Chebyshev series sum_{n=0}^{N} c_n T_n(x) of first-kind
 * polynomials over the normalized domain [-1, 1].
 *
 * The coefficient vector is never empty; the order is its length minus one.
 * Values are immutable after construction.
 */
template <typename Scalar_>
class ChebSeries {
public:
    using Scalar = Scalar_;
    using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
    using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    ChebSeries() : c_(Coeffs::Zero(1)) {}

    explicit ChebSeries(Coeffs c) : c_(std::move(c)) {
        if (c_.size() == 0) {
            throw InvalidArgument("ChebSeries: coefficient vector must be non-empty");
        }
    }

    ChebSeries(std::initializer_list<Scalar> c) : c_(static_cast<Eigen::Index>(c.size())) {
        if (c.size() == 0) {
            throw InvalidArgument("ChebSeries: coefficient vector must be non-empty");
        }
        std::copy(c.begin(), c.end(), c_.data());
    }

    const Coeffs& coeffs() const { return c_; }
    Eigen::Index order() const { return c_.size() - 1; }
    Eigen::Index size() const { return c_.size(); }

    /// Coefficient n, zero beyond the stored order.
    Scalar operator[](Eigen::Index n) const {
        return (n >= 0 && n < c_.size()) ? c_[n] : Scalar(0);
    }

    Scalar operator()(RealScalar x) const;

    /// Copy zero-padded (or truncated) to `new_order`.
    ChebSeries resized(Eigen::Index new_order) const {
        Coeffs c = Coeffs::Zero(new_order + 1);
        const auto keep = std::min(c.size(), c_.size());
        c.head(keep) = c_.head(keep);
        return ChebSeries(std::move(c));
    }

private:
    Coeffs c_;
};

using ChebSeriesd = ChebSeries<double>;
using ChebSeriescd = ChebSeries<std::complex<double>>;

/// Sum of a_n T_n(x) by Clenshaw's backward recurrence. Valid for any real x,
/// including |x| > 1 where T_n grows like cosh(n acosh|x|).
template <typename Scalar>
Scalar eval_series(const ChebSeries<Scalar>& s, typename ChebSeries<Scalar>::RealScalar x) {
    const auto& a = s.coeffs();
    const Eigen::Index n = a.size();
    if (n == 1) return a[0];
    Scalar b1(0), b2(0);
    const auto two_x = 2 * x;
    for (Eigen::Index k = n - 1; k >= 1; --k) {
        const Scalar b0 = a[k] + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return a[0] + x * b1 - b2;
}

template <typename Scalar>
Scalar ChebSeries<Scalar>::operator()(RealScalar x) const {
    return eval_series(*this, x);
}

/// Evaluate at every entry of `x`.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_series(const ChebSeries<Scalar>& s,
                                                      const Eigen::DenseBase<Derived>& x) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = eval_series(s, x.derived().coeff(i));
    return out;
}

/// Coefficient-wise sum; the shorter operand is zero-padded.
template <typename Scalar>
ChebSeries<Scalar> series_add(const ChebSeries<Scalar>& a, const ChebSeries<Scalar>& b) {
    const Eigen::Index n = std::max(a.size(), b.size());
    typename ChebSeries<Scalar>::Coeffs c = ChebSeries<Scalar>::Coeffs::Zero(n);
    c.head(a.size()) += a.coeffs();
    c.head(b.size()) += b.coeffs();
    return ChebSeries<Scalar>(std::move(c));
}

template <typename Scalar>
ChebSeries<Scalar> operator+(const ChebSeries<Scalar>& a, const ChebSeries<Scalar>& b) {
    return series_add(a, b);
}

template <typename Scalar>
ChebSeries<Scalar> operator-(const ChebSeries<Scalar>& a, const ChebSeries<Scalar>& b) {
    return series_add(a, ChebSeries<Scalar>(typename ChebSeries<Scalar>::Coeffs(-b.coeffs())));
}

/// The N+1 zeros of T_{N+1}, x_k = cos((k + 1/2) pi / (N + 1)), strictly decreasing.
struct NodeSet {
    int order = 0;
    Eigen::VectorXd points;
};

NodeSet chebyshev_nodes(int order);

/**
 * Degree-N interpolant of `f` through the first-kind nodes of T_{N+1}.
 *
 * Uses the discrete orthogonality of T_n on those nodes: the constant term
 * carries weight 1/(N+1) and the others 2/(N+1). Polynomials of degree <= N
 * are reproduced exactly.
 */
template <typename F>
auto interpolate(F&& f, int order) {
    using Scalar = std::decay_t<decltype(f(0.0))>;
    if (order < 0) throw InvalidArgument("interpolate: order must be non-negative");
    const int n_nodes = order + 1;
    const NodeSet nodes = chebyshev_nodes(order);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values(n_nodes);
    for (int k = 0; k < n_nodes; ++k) values[k] = f(nodes.points[k]);

    typename ChebSeries<Scalar>::Coeffs c(n_nodes);
    for (int n = 0; n < n_nodes; ++n) {
        Scalar acc(0);
        for (int k = 0; k < n_nodes; ++k) {
            acc += values[k] * std::cos(n * (k + 0.5) * std::numbers::pi / n_nodes);
        }
        c[n] = acc * ((n == 0 ? 1.0 : 2.0) / n_nodes);
    }
    return ChebSeries<Scalar>(std::move(c));
}

/// Re-expansion of u -> s(scale * u + offset) as a series of the same order.
/// Exact for any real scale/offset since the result is the same polynomial.
template <typename Scalar>
ChebSeries<Scalar> affine_compose(const ChebSeries<Scalar>& s, double scale, double offset) {
    return interpolate([&](double u) { return eval_series(s, scale * u + offset); },
                       static_cast<int>(s.order()));
}

/// Series in x equal to s(nu * (x + xi)). The constant term is the phase
/// offset used by the correlation and ambiguity transforms.
template <typename Scalar>
ChebSeries<Scalar> scale_shift(const ChebSeries<Scalar>& s, double nu, double xi) {
    return affine_compose(s, nu, nu * xi);
}

/**
 * Phase modulation series of a normalized frequency modulation series.
 *
 * Returns {phi0, alpha_1, ..., alpha_{N+1}} with d(phi)/dx = 2 pi g(x):
 * alpha_1 = 2 pi a_0 - pi a_2 and alpha_n = (pi / n)(a_{n-1} - a_{n+1}).
 */
ChebSeriesd integrate_fmf(const ChebSeriesd& fmf, double phi0 = 0.0);

/// Inverse of integrate_fmf: g(x) = phi'(x) / (2 pi). Drops the constant term.
ChebSeriesd differentiate_pmf(const ChebSeriesd& pmf);

/// Sample of an instantaneous-frequency ridge in normalized units.
struct RidgeSample {
    double x = 0.0;
    double g = 0.0;
    double weight = 1.0;
};

/**
 * Weighted least-squares Chebyshev fit of order N.
 *
 * Solved by column-pivoted Householder QR of the row-scaled basis matrix.
 * Samples with zero weight are dropped before assembly. Throws DegenerateFit
 * when fewer than N+1 distinct abscissae carry positive weight.
 */
ChebSeriesd fit_wlls(std::span<const RidgeSample> samples, int order);

} // namespace cpsfm

#endif
