#ifndef CPSFM_IO_HPP
#define CPSFM_IO_HPP

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpsfm/errors.hpp"
#include "cpsfm/transforms.hpp"
#include "cpsfm/waveform.hpp"

namespace cpsfm {

/// Spec-file validation failure; code() is one of missing_field, unknown_field,
/// order_mismatch, non_positive_duration, malformed.
class SpecFileError : public Error {
public:
    SpecFileError(std::string code, const std::string& what) : Error(what), code_(std::move(code)) {}
    const char* code() const noexcept override { return code_.c_str(); }

private:
    std::string code_;
};

/// JSON object with keys order, duration_s, fmf_coeffs, phi0_rad (optional)
/// and label (optional). Coefficients are normalized (dimensionless).
struct WaveformSpecFile {
    int order = 0;
    double duration_s = 0.0;
    std::vector<double> fmf_coeffs;
    double phi0_rad = 0.0;
    std::string label;

    CpsfmWaveform to_waveform() const;
    static WaveformSpecFile from_waveform(const CpsfmWaveform& w, std::string label = {});
};

WaveformSpecFile parse_spec_file(std::string_view text);
std::string serialize_spec(const WaveformSpecFile& spec);
CpsfmWaveform parse_waveform_spec(std::string_view text);

WaveformSpecFile load_spec(const std::string& path);
void save_spec(const std::string& path, const WaveformSpecFile& spec);

/// Rows of t_s,f_hz,weight. A leading "# duration_s=<T>" line declares the
/// burst as t in [0, T]; otherwise the span of t is used.
struct RidgeFile {
    std::vector<double> t_s;
    std::vector<double> f_hz;
    std::vector<double> weight;
    std::optional<double> duration_s;

    std::size_t size() const { return t_s.size(); }
};

RidgeFile parse_ridge_csv(std::string_view text);
std::string format_ridge_csv(const RidgeFile& ridge);
RidgeFile load_ridge(const std::string& path);

/// Normalizes x = 2 (t - t0) / T - 1, g = (T / 2) f and fits an order-N
/// waveform (N frequency coefficients).
CpsfmWaveform fit_ridge(const RidgeFile& ridge, int order);

/// Comment lines carry the metadata, then a header of axis names and re,im,abs.
/// Numbers use shortest round-trip formatting.
void write_grid_csv(std::ostream& os, const ResultGrid& grid);
ResultGrid read_grid_csv(std::istream& is);
void save_grid_csv(const std::string& path, const ResultGrid& grid);
ResultGrid load_grid_csv(const std::string& path);

/// Mono IEEE-float WAV.
void write_wav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate);
Eigen::VectorXd read_wav(const std::string& path, int* sample_rate = nullptr);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace cpsfm

#endif
