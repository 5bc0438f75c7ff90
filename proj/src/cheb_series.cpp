#include "cpsfm/cheb_series.hpp"

#include <set>
#include <string>
#include <vector>

namespace cpsfm {

NodeSet chebyshev_nodes(int order) {
    if (order < 0) throw InvalidArgument("chebyshev_nodes: order must be non-negative");
    NodeSet nodes;
    nodes.order = order;
    nodes.points.resize(order + 1);
    for (int k = 0; k <= order; ++k) {
        nodes.points[k] = std::cos((k + 0.5) * std::numbers::pi / (order + 1));
    }
    return nodes;
}

ChebSeriesd integrate_fmf(const ChebSeriesd& fmf, double phi0) {
    constexpr double pi = std::numbers::pi;
    const Eigen::Index n_out = fmf.order() + 1;
    ChebSeriesd::Coeffs alpha(n_out + 1);
    alpha[0] = phi0;
    // The constant FMF term integrates to 2 pi a_0 T_1; the textbook formula
    // assumes a halved a_0 and would give pi a_0.
    alpha[1] = 2.0 * pi * fmf[0] - pi * fmf[2];
    for (Eigen::Index n = 2; n <= n_out; ++n) {
        alpha[n] = (pi / static_cast<double>(n)) * (fmf[n - 1] - fmf[n + 1]);
    }
    return ChebSeriesd(std::move(alpha));
}

ChebSeriesd differentiate_pmf(const ChebSeriesd& pmf) {
    const Eigen::Index n = pmf.order();
    if (n == 0) return ChebSeriesd{0.0};
    // d_{k} = d_{k+2} + 2 (k+1) c_{k+1}, with the k = 0 term halved.
    ChebSeriesd::Coeffs d = ChebSeriesd::Coeffs::Zero(n + 2);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        d[k] = d[k + 2] + 2.0 * static_cast<double>(k + 1) * pmf[k + 1];
    }
    d[0] *= 0.5;
    ChebSeriesd::Coeffs g = d.head(n) / (2.0 * std::numbers::pi);
    return ChebSeriesd(std::move(g));
}

ChebSeriesd fit_wlls(std::span<const RidgeSample> samples, int order) {
    if (order < 0) throw InvalidArgument("fit_wlls: order must be non-negative");

    std::vector<RidgeSample> used;
    used.reserve(samples.size());
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (!(s.weight >= 0.0) || !std::isfinite(s.weight)) {
            throw InvalidArgument("fit_wlls: weights must be finite and non-negative");
        }
        if (!std::isfinite(s.x) || !std::isfinite(s.g) || s.x < -1.0 || s.x > 1.0) {
            throw InvalidArgument("fit_wlls: sample abscissa outside [-1, 1] or non-finite value");
        }
        if (s.weight > 0.0) {
            used.push_back(s);
            distinct.insert(s.x);
        }
    }
    const int n_coeffs = order + 1;
    if (static_cast<int>(distinct.size()) < n_coeffs) {
        throw DegenerateFit("fit_wlls: " + std::to_string(distinct.size()) +
                            " distinct positively weighted abscissae for " +
                            std::to_string(n_coeffs) + " coefficients");
    }

    const auto rows = static_cast<Eigen::Index>(used.size());
    Eigen::MatrixXd basis(rows, n_coeffs);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double sw = std::sqrt(used[i].weight);
        const double x = used[i].x;
        double t_prev = 1.0, t_cur = x;
        basis(i, 0) = sw;
        if (n_coeffs > 1) basis(i, 1) = sw * x;
        for (int n = 2; n < n_coeffs; ++n) {
            const double t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            basis(i, n) = sw * t_cur;
        }
        rhs[i] = sw * used[i].g;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
    if (qr.rank() < n_coeffs) {
        throw DegenerateFit("fit_wlls: weighted basis matrix is rank deficient (rank " +
                            std::to_string(qr.rank()) + " of " + std::to_string(n_coeffs) + ")");
    }
    ChebSeriesd::Coeffs c = qr.solve(rhs);
    return ChebSeriesd(std::move(c));
}

} // namespace cpsfm
