#include "cpsfm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "cpsfm/io.hpp"
#include "cpsfm/oracle.hpp"
#include "cpsfm/transforms.hpp"

namespace cpsfm {

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitFailure = 2;

struct Common {
    double tol = 1e-10;
    int mmax_cap = kDefaultTruncationCap;
    std::uint64_t seed = 1;
    std::string out;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--tol", c.tol, "Transform tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--mmax-cap", c.mmax_cap, "Largest admissible Bessel truncation order")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed of the noise baseline")->capture_default_str();
    sub->add_option("--out", c.out, "Output file (stdout when omitted)");
}

struct XiGrid {
    double lo = -2.0, hi = 2.0, step = 1e-3;
};

void add_xi(CLI::App* sub, XiGrid& g) {
    sub->add_option("--xi-min", g.lo, "Smallest normalized delay")->capture_default_str();
    sub->add_option("--xi-max", g.hi, "Largest normalized delay")->capture_default_str();
    sub->add_option("--xi-step", g.step, "Delay step")->check(CLI::PositiveNumber)->capture_default_str();
}

TransformOptions transform_options(const Common& c, const std::string& route) {
    TransformOptions o;
    o.tol = c.tol;
    o.mmax_cap = c.mmax_cap;
    if (route == "literal") o.route = CorrelationRoute::literal;
    return o;
}

void emit_grid(const Common& c, ResultGrid grid, std::ostream& out) {
    if (c.out.empty()) {
        write_grid_csv(out, grid);
        return;
    }
    save_grid_csv(c.out, grid);
    out << "wrote=" << c.out << "\n";
    out << "kind=" << grid.meta().kind << "\n";
    out << "points=" << grid.size() << "\n";
    out << "truncation=" << grid.meta().truncation << "\n";
    out << "peak_abs=" << format_double(grid.values().cwiseAbs().maxCoeff()) << "\n";
}

struct Loaded {
    CpsfmWaveform wave;
    std::string path;
};

Loaded load(const std::string& path) { return Loaded{load_spec(path).to_waveform(), path}; }

// Velocities evenly spaced over [-v_max, v_max] mapped to Doppler factors;
// an odd count keeps nu = 1 on the grid.
Eigen::VectorXd nu_grid(double v_max, double c, int count) {
    if (count < 1) throw InvalidArgument("--nu-count must be positive");
    Eigen::VectorXd nu(count);
    for (int i = 0; i < count; ++i) {
        const double v = count == 1 ? 0.0 : -v_max + 2.0 * v_max * i / (count - 1);
        nu[i] = doppler_factor(v, c);
    }
    return nu;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chebyshev-series FM waveform toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common common;
    XiGrid xi_grid;
    std::string route = "support_mapped";

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a waveform spec to ridge samples (t_s,f_hz,weight)");
    std::string ridge_path;
    int fit_order = 0;
    std::string label;
    fit->add_option("ridge", ridge_path, "Ridge CSV")->required();
    fit->add_option("--order", fit_order, "Waveform order N (N frequency coefficients)")->required();
    fit->add_option("--label", label, "Label stored in the spec");
    add_common(fit, common);

    // synth
    auto* synth = app.add_subcommand("synth", "Sample a waveform to WAV (real part) or CSV");
    std::string synth_spec;
    double synth_fs = 0.0;
    synth->add_option("spec", synth_spec, "Waveform spec")->required();
    synth->add_option("--fs", synth_fs, "Sample rate in Hz (default: 10x peak frequency)");
    add_common(synth, common);

    // spectrum
    auto* spec_cmd = app.add_subcommand("spectrum", "Closed-form spectrum on a normalized frequency grid");
    std::string spectrum_spec;
    std::optional<double> g_min, g_max;
    int g_count = 1001;
    std::string kernel = "absorbed_real";
    spec_cmd->add_option("spec", spectrum_spec, "Waveform spec")->required();
    spec_cmd->add_option("--g-min", g_min, "Lower normalized frequency (default: 1.5x FMF range)");
    spec_cmd->add_option("--g-max", g_max, "Upper normalized frequency");
    spec_cmd->add_option("--g-count", g_count, "Grid points")->check(CLI::PositiveNumber)->capture_default_str();
    spec_cmd->add_option("--kernel", kernel, "absorbed_real | literal_complex")
        ->check(CLI::IsMember({"absorbed_real", "literal_complex"}))
        ->capture_default_str();
    add_common(spec_cmd, common);

    // acf / ccf
    auto* acf = app.add_subcommand("acf", "Autocorrelation on a normalized delay grid");
    std::string acf_spec;
    acf->add_option("spec", acf_spec, "Waveform spec")->required();
    auto* ccf = app.add_subcommand("ccf", "Cross-correlation of two equal-duration waveforms");
    std::string ccf_a, ccf_b;
    ccf->add_option("spec_a", ccf_a, "Reference spec")->required();
    ccf->add_option("spec_b", ccf_b, "Second spec")->required();

    // af
    auto* af = app.add_subcommand("af", "Wideband (cross-)ambiguity function on a (nu, xi) grid");
    std::string af_a, af_b;
    double v_max = 30.0, sound_speed = 343.0;
    int nu_count = 61;
    std::vector<double> nu_list;
    af->add_option("spec_a", af_a, "Reference spec")->required();
    af->add_option("spec_b", af_b, "Second spec (auto-ambiguity when omitted)");
    af->add_option("--v-max", v_max, "Largest relative speed in m/s")->capture_default_str();
    af->add_option("--c", sound_speed, "Propagation speed in m/s")->capture_default_str();
    af->add_option("--nu-count", nu_count, "Doppler grid points")->capture_default_str();
    af->add_option("--nu", nu_list, "Explicit Doppler factors (overrides the velocity grid)");

    for (auto* sub : {acf, ccf, af}) {
        add_xi(sub, xi_grid);
        sub->add_option("--route", route, "support_mapped | literal")
            ->check(CLI::IsMember({"support_mapped", "literal"}))
            ->capture_default_str();
        add_common(sub, common);
    }

    // approx-hfm
    auto* hfm = app.add_subcommand("approx-hfm", "Chebyshev-node approximation of a hyperbolic FM");
    HfmSpec hfm_spec;
    int hfm_order = 8;
    hfm->add_option("--f1", hfm_spec.f1_hz, "Start frequency in Hz")->required();
    hfm->add_option("--f2", hfm_spec.f2_hz, "End frequency in Hz")->required();
    hfm->add_option("--T", hfm_spec.duration_s, "Duration in s")->required();
    hfm->add_option("--order", hfm_order, "Waveform order N")->capture_default_str();
    add_common(hfm, common);

    // compare
    auto* cmp = app.add_subcommand("compare", "Jamming-rejection report for two waveforms");
    std::string cmp_a, cmp_b;
    bool noise = false;
    int noise_seeds = 20;
    double noise_fs = 0.0;
    double cmp_step = 1e-3;
    cmp->add_option("spec_a", cmp_a, "Own waveform")->required();
    cmp->add_option("spec_b", cmp_b, "Interfering waveform")->required();
    cmp->add_option("--xi-step", cmp_step, "Delay step")->check(CLI::PositiveNumber)->capture_default_str();
    cmp->add_flag("--noise", noise, "Add the matched-noise baseline");
    cmp->add_option("--noise-seeds", noise_seeds, "Noise realizations (seeds seed, seed+1, ...)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmp->add_option("--fs", noise_fs, "Noise baseline sample rate in Hz (default: 20x peak frequency)");
    add_common(cmp, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: usage: " << msg << "\n";
        return kExitUsage;
    }

    try {
        if (*fit) {
            const RidgeFile ridge = load_ridge(ridge_path);
            const CpsfmWaveform w = fit_ridge(ridge, fit_order);
            const std::string text = serialize_spec(WaveformSpecFile::from_waveform(w, label));
            if (common.out.empty()) {
                out << text;
            } else {
                write_text_file(common.out, text);
                out << "wrote=" << common.out << "\norder=" << fit_order << "\nsamples=" << ridge.size() << "\n";
            }
        } else if (*synth) {
            const Loaded a = load(synth_spec);
            double fs = synth_fs > 0.0 ? synth_fs : std::ceil(10.0 * a.wave.peak_frequency_hz());
            const SampledSignal s = sample(a.wave, fs);
            const double amp = std::sqrt(a.wave.duration_s());
            const bool wav = common.out.size() > 4 && common.out.ends_with(".wav");
            if (wav) {
                if (fs != std::round(fs)) throw InvalidArgument("WAV output needs an integer --fs");
                write_wav(common.out, (amp * s.samples.real()).eval(), static_cast<int>(fs));
            } else {
                std::ostringstream csv;
                csv << "t_s,re,im\n";
                for (Eigen::Index k = 0; k < s.samples.size(); ++k) {
                    const cplx v = amp * s.samples[k];
                    csv << format_double(s.time(k)) << "," << format_double(v.real()) << ","
                        << format_double(v.imag()) << "\n";
                }
                if (common.out.empty()) {
                    out << csv.str();
                    return 0;
                }
                write_text_file(common.out, csv.str());
            }
            out << "wrote=" << common.out << "\nfs_hz=" << format_double(fs) << "\nsamples=" << s.samples.size()
                << "\naliased=" << (s.aliased ? "true" : "false") << "\n";
        } else if (*spec_cmd) {
            const Loaded a = load(spectrum_spec);
            double lo = 0.0, hi = 0.0;
            if (g_min && g_max) {
                lo = *g_min;
                hi = *g_max;
            } else {
                // 1.5x the range swept by g(x), centred on it.
                double fmin = a.wave.normalized_frequency(-1.0), fmax = fmin;
                for (int i = 0; i <= 4096; ++i) {
                    const double g = a.wave.normalized_frequency(-1.0 + i / 2048.0);
                    fmin = std::min(fmin, g);
                    fmax = std::max(fmax, g);
                }
                const double mid = 0.5 * (fmin + fmax);
                const double half = std::max(0.75 * (fmax - fmin), 2.0);
                lo = g_min.value_or(mid - half);
                hi = g_max.value_or(mid + half);
            }
            if (!(hi >= lo)) throw InvalidArgument("--g-max must not be below --g-min");
            Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(g_count, lo, hi);
            TransformOptions o = transform_options(common, "");
            if (kernel == "literal_complex") o.spectrum_kernel = SpectrumKernel::literal_complex;
            ResultGrid grid = spectrum(a.wave, g, o);
            grid.meta().waveforms = {a.path};
            emit_grid(common, std::move(grid), out);
        } else if (*acf || *ccf) {
            const Loaded a = load(*acf ? acf_spec : ccf_a);
            const Loaded b = *acf ? a : load(ccf_b);
            const Eigen::VectorXd xi = uniform_grid(xi_grid.lo, xi_grid.hi, xi_grid.step);
            ResultGrid grid = correlation(a.wave, b.wave, xi, transform_options(common, route));
            grid.meta().kind = *acf ? "acf" : "ccf";
            grid.meta().waveforms = *acf ? std::vector<std::string>{a.path} : std::vector<std::string>{a.path, b.path};
            emit_grid(common, std::move(grid), out);
        } else if (*af) {
            const Loaded a = load(af_a);
            const Loaded b = af_b.empty() ? a : load(af_b);
            const Eigen::VectorXd xi = uniform_grid(xi_grid.lo, xi_grid.hi, xi_grid.step);
            const Eigen::VectorXd nu =
                nu_list.empty() ? nu_grid(v_max, sound_speed, nu_count)
                                : Eigen::Map<Eigen::VectorXd>(nu_list.data(), static_cast<Eigen::Index>(nu_list.size()));
            ResultGrid grid = ambiguity(a.wave, b.wave, xi, nu, transform_options(common, route));
            grid.meta().kind = af_b.empty() ? "af" : "caf";
            grid.meta().waveforms = af_b.empty() ? std::vector<std::string>{a.path}
                                                 : std::vector<std::string>{a.path, b.path};
            emit_grid(common, std::move(grid), out);
        } else if (*hfm) {
            const CpsfmWaveform w = approximate_hfm(hfm_spec, hfm_order);
            std::ostringstream lbl;
            lbl << "hfm " << format_double(hfm_spec.f1_hz) << "-" << format_double(hfm_spec.f2_hz) << " Hz, N="
                << hfm_order;
            const std::string text = serialize_spec(WaveformSpecFile::from_waveform(w, lbl.str()));
            if (common.out.empty()) {
                out << text;
            } else {
                write_text_file(common.out, text);
                out << "wrote=" << common.out << "\norder=" << hfm_order << "\n";
            }
        } else if (*cmp) {
            const Loaded a = load(cmp_a);
            const Loaded b = load(cmp_b);
            JammingOptions jo;
            jo.xi_step = cmp_step;
            jo.transform = transform_options(common, "");
            const JammingReport r = jamming_report(a.wave, b.wave, jo);
            std::ostringstream rep;
            rep << "acf_peak=" << format_double(r.acf_peak) << "\n";
            rep << "ccf_peak=" << format_double(r.ccf_peak) << "\n";
            rep << "ccf_peak_xi=" << format_double(r.ccf_peak_xi) << "\n";
            rep << "rejection_db=" << format_double(r.rejection_db) << "\n";
            rep << "truncation=" << r.truncation << "\n";
            if (noise) {
                const double fs = noise_fs > 0.0 ? noise_fs : 20.0 * a.wave.peak_frequency_hz();
                const SampledSignal ref = sample_source(DiscreteSource::from_waveform(a.wave), fs);
                std::vector<double> att;
                for (int i = 0; i < noise_seeds; ++i) {
                    att.push_back(matched_noise_attenuation_db(ref, a.wave.duration_s(), common.seed + i));
                }
                const double m = mean_of(att);
                double var = 0.0;
                for (double v : att) var += (v - m) * (v - m);
                const double sd = att.size() > 1 ? std::sqrt(var / (att.size() - 1)) : 0.0;
                rep << "noise_fs_hz=" << format_double(fs) << "\n";
                rep << "noise_seeds=" << noise_seeds << "\n";
                rep << "noise_first_seed=" << common.seed << "\n";
                rep << "noise_attenuation_db_mean=" << format_double(m) << "\n";
                rep << "noise_attenuation_db_std=" << format_double(sd) << "\n";
            }
            if (!common.out.empty()) write_text_file(common.out, rep.str());
            out << rep.str();
        }
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << e.code() << ": " << msg << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}

} // namespace cpsfm
