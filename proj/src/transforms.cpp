#include "cpsfm/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cpsfm {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kJ(0.0, 1.0);

// One grid point reduced to "prefactor * sum_m weight_m I_m(j args)".
struct PointPlan {
    bool empty = false;
    cplx prefactor;
    Eigen::VectorXcd args;
    double theta1 = kPi;  // partial limits, literal route only
    double theta2 = 0.0;
    bool full_interval = true;
};

// sum_{m=-M}^{M} gamma_m(pi, 0) I_m = 2 I_0 + sum_{even m >= 2} 4/(1 - m^2) I_m;
// the m = +-1 terms cancel because I_{-1} = I_1.
cplx full_interval_sum(const Eigen::VectorXcd& table) {
    cplx acc = 2.0 * table[0];
    for (Eigen::Index m = 2; m < table.size(); m += 2) {
        acc += (4.0 / (1.0 - static_cast<double>(m) * m)) * table[m];
    }
    return acc;
}

cplx partial_interval_sum(const Eigen::VectorXcd& table, double theta1, double theta2) {
    cplx acc = gamma_coeff(0, theta1, theta2) * table[0];
    for (Eigen::Index m = 1; m < table.size(); ++m) {
        const int mi = static_cast<int>(m);
        acc += (gamma_coeff(mi, theta1, theta2) + gamma_coeff(-mi, theta1, theta2)) * table[m];
    }
    return acc;
}

Eigen::VectorXcd tail_coeffs(const ChebSeriesd& s) {
    return s.coeffs().tail(s.size() - 1).cast<cplx>();
}

// Evaluates every plan with one truncation order chosen from the element-wise
// worst-case argument vector, which bounds the tail of every point.
Eigen::VectorXcd evaluate_plans(const std::vector<PointPlan>& plans, const TransformOptions& opts,
                                int& truncation_out) {
    Eigen::VectorXcd values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(plans.size()));
    Eigen::Index n_args = 0;
    for (const auto& p : plans) {
        if (!p.empty) n_args = std::max(n_args, p.args.size());
    }
    if (n_args == 0) {
        truncation_out = 0;
        return values;
    }
    Eigen::VectorXd worst_re = Eigen::VectorXd::Zero(n_args);
    Eigen::VectorXd worst_im = Eigen::VectorXd::Zero(n_args);
    for (const auto& p : plans) {
        if (p.empty) continue;
        for (Eigen::Index i = 0; i < p.args.size(); ++i) {
            worst_re[i] = std::max(worst_re[i], std::abs(p.args[i].real()));
            worst_im[i] = std::max(worst_im[i], std::abs(p.args[i].imag()));
        }
    }
    Eigen::VectorXcd worst(n_args);
    for (Eigen::Index i = 0; i < n_args; ++i) worst[i] = cplx(worst_re[i], worst_im[i]);
    const GbfArgs worst_args(worst);

    // |gamma_m| <= 2 for every limit pair, so half the tolerance on the tail.
    const double tail_tol = 0.5 * opts.tol;
    const int m_tol = choose_truncation(worst_args, tail_tol, opts.mmax_cap);
    const int M = opts.fixed_truncation ? *opts.fixed_truncation : m_tol;
    if (M < 0) throw InvalidArgument("fixed truncation must be non-negative");
    truncation_out = M;

    const int K = FourierGbf::grid_size_for(std::max(M, m_tol), m_tol);
    FourierGbf engine(static_cast<int>(n_args), K);
    Eigen::VectorXcd table;
    Eigen::VectorXcd padded(n_args);
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& p = plans[i];
        if (p.empty) continue;
        padded.setZero();
        padded.head(p.args.size()) = p.args;
        engine.compute(std::span<const cplx>(padded.data(), padded.size()), M, table);
        const cplx sum = p.full_interval ? full_interval_sum(table)
                                         : partial_interval_sum(table, p.theta1, p.theta2);
        values[static_cast<Eigen::Index>(i)] = p.prefactor * sum;
    }
    return values;
}

void require_same_duration(const CpsfmWaveform& a, const CpsfmWaveform& b) {
    if (a.duration_s() != b.duration_s()) {
        throw InvalidArgument("correlation requires identical durations (" +
                              std::to_string(a.duration_s()) + " s vs " +
                              std::to_string(b.duration_s()) + " s)");
    }
}

PointPlan plan_lag(const CpsfmWaveform& a, const CpsfmWaveform& b, double xi, double nu,
                   CorrelationRoute route) {
    PointPlan p;
    const SupportLimits lim = support_limits(xi, nu);
    if (lim.empty) {
        p.empty = true;
        return p;
    }
    if (route == CorrelationRoute::support_mapped) {
        // x = c + h u maps u in [-1, 1] onto the overlap; both phase series
        // are then evaluated only where they are defined.
        const double c = 0.5 * (lim.x1 + lim.x2);
        const double h = 0.5 * (lim.x2 - lim.x1);
        const ChebSeriesd diff = affine_compose(b.pmf(), nu * h, nu * (c + xi)) -
                                 affine_compose(a.pmf(), h, c);
        p.prefactor = 0.5 * std::sqrt(nu) * h * std::exp(kJ * diff[0]);
        p.args = tail_coeffs(diff);
    } else {
        const ChebSeriesd diff = scale_shift(b.pmf(), nu, xi) - a.pmf();
        p.prefactor = 0.5 * std::sqrt(nu) * std::exp(kJ * diff[0]);
        p.args = tail_coeffs(diff);
        p.full_interval = false;
        p.theta1 = lim.theta1;
        p.theta2 = lim.theta2;
    }
    return p;
}

std::string route_name(CorrelationRoute r) {
    return r == CorrelationRoute::support_mapped ? "support_mapped" : "literal";
}

} // namespace

ResultGrid::ResultGrid(std::vector<GridAxis> axes, Eigen::VectorXcd values, GridMeta meta)
    : axes_(std::move(axes)), values_(std::move(values)), meta_(std::move(meta)) {
    Eigen::Index expected = axes_.empty() ? 0 : 1;
    for (const auto& a : axes_) expected *= a.values.size();
    if (expected != values_.size()) {
        throw InvalidArgument("ResultGrid: value count " + std::to_string(values_.size()) +
                              " does not match axis shape " + std::to_string(expected));
    }
}

SupportLimits support_limits(double xi, double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("support_limits: nu must be positive");
    SupportLimits s;
    s.x1 = std::max(-1.0, -1.0 / nu - xi);
    s.x2 = std::min(1.0, 1.0 / nu - xi);
    s.empty = !(s.x1 < s.x2);
    if (s.empty) {
        s.theta1 = s.theta2 = 0.0;
    } else {
        s.theta1 = std::acos(s.x1);
        s.theta2 = std::acos(s.x2);
    }
    return s;
}

cplx gamma_coeff(int m, double theta1, double theta2) {
    if (m == 1 || m == -1) {
        const double mm = m;
        return 0.25 * (std::exp(kJ * (2.0 * mm * theta2)) - std::exp(kJ * (2.0 * mm * theta1)) +
                       kJ * (2.0 * mm * (theta1 - theta2)));
    }
    const double mm = m;
    auto upsilon = [&](double th) {
        return std::exp(kJ * (mm * th)) * cplx(std::cos(th), -mm * std::sin(th));
    };
    return (upsilon(theta1) - upsilon(theta2)) / (mm * mm - 1.0);
}

double doppler_factor(double v, double c) {
    if (!(c > 0.0)) throw InvalidArgument("doppler_factor: propagation speed must be positive");
    if (!(std::abs(v) < c)) throw InvalidArgument("doppler_factor: |v| must be below c");
    const double mach = v / c;
    return (1.0 + mach) / (1.0 - mach);
}

Eigen::VectorXd uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("uniform_grid: need step > 0 and hi >= lo");
    const auto n = static_cast<Eigen::Index>(std::floor((hi - lo) / step + 0.5)) + 1;
    Eigen::VectorXd g(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double v = lo + static_cast<double>(k) * step;
        if (std::abs(v) < 1e-9 * step) v = 0.0;
        g[k] = v;
    }
    return g;
}

ResultGrid spectrum(const CpsfmWaveform& w, const Eigen::VectorXd& g, const TransformOptions& opts) {
    const Eigen::VectorXcd alpha = tail_coeffs(w.pmf());
    const cplx offset = std::exp(kJ * w.pmf()[0]);
    std::vector<PointPlan> plans(static_cast<std::size_t>(g.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) throw InvalidArgument("spectrum: non-finite frequency");
        auto& p = plans[static_cast<std::size_t>(i)];
        p.prefactor = offset;
        p.args = alpha;
        const double shift = 2.0 * kPi * g[i];
        p.args[0] -= opts.spectrum_kernel == SpectrumKernel::absorbed_real ? cplx(shift, 0.0)
                                                                            : cplx(0.0, shift);
    }
    GridMeta meta;
    meta.kind = "spectrum";
    meta.tolerance = opts.tol;
    meta.route = opts.spectrum_kernel == SpectrumKernel::absorbed_real ? "absorbed_real"
                                                                       : "literal_complex";
    Eigen::VectorXcd values = evaluate_plans(plans, opts, meta.truncation);
    return ResultGrid({GridAxis{"g", g}}, std::move(values), std::move(meta));
}

ResultGrid correlation(const CpsfmWaveform& a, const CpsfmWaveform& b, const Eigen::VectorXd& xi,
                       const TransformOptions& opts) {
    require_same_duration(a, b);
    std::vector<PointPlan> plans;
    plans.reserve(static_cast<std::size_t>(xi.size()));
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
        if (!std::isfinite(xi[i])) throw InvalidArgument("correlation: non-finite delay");
        plans.push_back(plan_lag(a, b, xi[i], 1.0, opts.route));
    }
    GridMeta meta;
    meta.kind = "correlation";
    meta.tolerance = opts.tol;
    meta.route = route_name(opts.route);
    Eigen::VectorXcd values = evaluate_plans(plans, opts, meta.truncation);
    return ResultGrid({GridAxis{"xi", xi}}, std::move(values), std::move(meta));
}

ResultGrid correlation(const CpsfmWaveform& a, const Eigen::VectorXd& xi, const TransformOptions& opts) {
    return correlation(a, a, xi, opts);
}

ResultGrid ambiguity(const CpsfmWaveform& a, const CpsfmWaveform& b, const Eigen::VectorXd& xi,
                     const Eigen::VectorXd& nu, const TransformOptions& opts) {
    require_same_duration(a, b);
    std::vector<PointPlan> plans;
    plans.reserve(static_cast<std::size_t>(xi.size() * nu.size()));
    for (Eigen::Index r = 0; r < nu.size(); ++r) {
        if (!(nu[r] > 0.0) || !std::isfinite(nu[r])) {
            throw InvalidArgument("ambiguity: Doppler factors must be positive and finite");
        }
        for (Eigen::Index i = 0; i < xi.size(); ++i) {
            if (!std::isfinite(xi[i])) throw InvalidArgument("ambiguity: non-finite delay");
            plans.push_back(plan_lag(a, b, xi[i], nu[r], opts.route));
        }
    }
    GridMeta meta;
    meta.kind = "ambiguity";
    meta.tolerance = opts.tol;
    meta.route = route_name(opts.route);
    Eigen::VectorXcd values = evaluate_plans(plans, opts, meta.truncation);
    return ResultGrid({GridAxis{"nu", nu}, GridAxis{"xi", xi}}, std::move(values), std::move(meta));
}

ResultGrid ambiguity(const CpsfmWaveform& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& nu,
                     const TransformOptions& opts) {
    return ambiguity(a, a, xi, nu, opts);
}

namespace {

struct Peak {
    double value = 0.0;
    double at = 0.0;
};

Peak refined_peak(const Eigen::VectorXd& mag, const Eigen::VectorXd& grid) {
    Eigen::Index k = 0;
    mag.maxCoeff(&k);
    Peak p{mag[k], grid[k]};
    if (k > 0 && k + 1 < mag.size()) {
        const double ym = mag[k - 1], y0 = mag[k], yp = mag[k + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double delta = 0.5 * (ym - yp) / denom;
            p.value = y0 - 0.25 * (ym - yp) * delta;
            p.at = grid[k] + delta * (grid[k + 1] - grid[k]);
        }
    }
    return p;
}

} // namespace

JammingReport jamming_report(const CpsfmWaveform& a, const CpsfmWaveform& b, const JammingOptions& opts) {
    require_same_duration(a, b);
    const Eigen::VectorXd xi = uniform_grid(-2.0, 2.0, opts.xi_step);
    const ResultGrid acf = correlation(a, a, xi, opts.transform);
    const ResultGrid ccf = correlation(a, b, xi, opts.transform);
    const Peak pa = refined_peak(acf.values().cwiseAbs(), xi);
    const Peak pb = refined_peak(ccf.values().cwiseAbs(), xi);
    JammingReport r;
    r.acf_peak = pa.value;
    r.ccf_peak = pb.value;
    r.ccf_peak_xi = pb.at;
    r.rejection_db = 20.0 * std::log10(pa.value / pb.value);
    r.truncation = std::max(acf.meta().truncation, ccf.meta().truncation);
    return r;
}

double jamming_rejection_db(const CpsfmWaveform& a, const CpsfmWaveform& b, const JammingOptions& opts) {
    return jamming_report(a, b, opts).rejection_db;
}

} // namespace cpsfm
