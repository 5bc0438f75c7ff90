#include "cpsfm/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cpsfm {

namespace {

using json = nlohmann::ordered_json;

const char* const kSpecKeys[] = {"order", "duration_s", "fmf_coeffs", "phi0_rad", "label"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto line : split(text, '\n')) out.push_back(line);
    return out;
}

double parse_double(std::string_view s, const std::string& context) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw IoError(context + ": cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ostream& os, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

std::uint32_t get_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

// --- waveform spec ----------------------------------------------------------

CpsfmWaveform WaveformSpecFile::to_waveform() const {
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(fmf_coeffs.data(),
                                                          static_cast<Eigen::Index>(fmf_coeffs.size()));
    return build_waveform(ChebSeriesd(c), duration_s, phi0_rad);
}

WaveformSpecFile WaveformSpecFile::from_waveform(const CpsfmWaveform& w, std::string label) {
    WaveformSpecFile s;
    const auto& c = w.fmf().coeffs();
    s.order = static_cast<int>(c.size());
    s.duration_s = w.duration_s();
    s.fmf_coeffs.assign(c.data(), c.data() + c.size());
    s.phi0_rad = w.phi0();
    s.label = std::move(label);
    return s;
}

WaveformSpecFile parse_spec_file(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SpecFileError("malformed", std::string("spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SpecFileError("malformed", "spec must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(std::begin(kSpecKeys), std::end(kSpecKeys), item.key()) == std::end(kSpecKeys)) {
            throw SpecFileError("unknown_field", "unknown field '" + item.key() + "'");
        }
    }
    for (const char* key : {"order", "fmf_coeffs"}) {
        if (!j.contains(key)) throw SpecFileError("missing_field", std::string("missing field '") + key + "'");
    }

    WaveformSpecFile s;
    if (!j["order"].is_number_integer()) throw SpecFileError("malformed", "'order' must be an integer");
    s.order = j["order"].get<int>();
    const json& coeffs = j["fmf_coeffs"];
    if (!coeffs.is_array()) throw SpecFileError("malformed", "'fmf_coeffs' must be an array");
    for (const auto& c : coeffs) {
        if (!c.is_number()) throw SpecFileError("malformed", "'fmf_coeffs' entries must be numbers");
        s.fmf_coeffs.push_back(c.get<double>());
    }
    if (s.order < 1) throw SpecFileError("malformed", "'order' must be at least 1");
    if (static_cast<std::size_t>(s.order) != s.fmf_coeffs.size()) {
        throw SpecFileError("order_mismatch", "order " + std::to_string(s.order) + " needs " +
                                                  std::to_string(s.order) + " fmf_coeffs, got " +
                                                  std::to_string(s.fmf_coeffs.size()));
    }
    if (!j.contains("duration_s")) throw SpecFileError("missing_field", "missing field 'duration_s'");
    if (!j["duration_s"].is_number()) throw SpecFileError("malformed", "'duration_s' must be a number");
    s.duration_s = j["duration_s"].get<double>();
    if (!(s.duration_s > 0.0)) {
        throw SpecFileError("non_positive_duration",
                            "duration_s must be positive, got " + format_double(s.duration_s));
    }
    if (j.contains("phi0_rad")) {
        if (!j["phi0_rad"].is_number()) throw SpecFileError("malformed", "'phi0_rad' must be a number");
        s.phi0_rad = j["phi0_rad"].get<double>();
    }
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw SpecFileError("malformed", "'label' must be a string");
        s.label = j["label"].get<std::string>();
    }
    return s;
}

std::string serialize_spec(const WaveformSpecFile& s) {
    json j;
    j["order"] = s.order;
    j["duration_s"] = s.duration_s;
    j["fmf_coeffs"] = s.fmf_coeffs;
    j["phi0_rad"] = s.phi0_rad;
    if (!s.label.empty()) j["label"] = s.label;
    return j.dump(2) + "\n";
}

CpsfmWaveform parse_waveform_spec(std::string_view text) { return parse_spec_file(text).to_waveform(); }

WaveformSpecFile load_spec(const std::string& path) {
    try {
        return parse_spec_file(read_text_file(path));
    } catch (const SpecFileError& e) {
        throw SpecFileError(e.code(), path + ": " + e.what());
    }
}

void save_spec(const std::string& path, const WaveformSpecFile& spec) {
    write_text_file(path, serialize_spec(spec));
}

// --- ridge samples ------------------------------------------------------------

RidgeFile parse_ridge_csv(std::string_view text) {
    RidgeFile r;
    bool header_seen = false;
    int line_no = 0;
    for (auto line : lines_of(text)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            if (body.starts_with("duration_s=")) {
                r.duration_s = parse_double(body.substr(11), "ridge header");
                if (!(*r.duration_s > 0.0)) throw IoError("ridge header: duration_s must be positive");
            }
            continue;
        }
        const auto fields = split(line, ',');
        if (!header_seen) {
            if (fields.size() != 3 || fields[0] != "t_s" || fields[1] != "f_hz" || fields[2] != "weight") {
                throw IoError("ridge CSV: expected header 't_s,f_hz,weight'");
            }
            header_seen = true;
            continue;
        }
        const std::string ctx = "ridge CSV line " + std::to_string(line_no);
        if (fields.size() != 3) throw IoError(ctx + ": expected 3 fields");
        r.t_s.push_back(parse_double(fields[0], ctx));
        r.f_hz.push_back(parse_double(fields[1], ctx));
        r.weight.push_back(parse_double(fields[2], ctx));
    }
    if (!header_seen) throw IoError("ridge CSV: missing header");
    return r;
}

std::string format_ridge_csv(const RidgeFile& r) {
    std::string out;
    if (r.duration_s) out += "# duration_s=" + format_double(*r.duration_s) + "\n";
    out += "t_s,f_hz,weight\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += format_double(r.t_s[i]) + "," + format_double(r.f_hz[i]) + "," +
               format_double(r.weight[i]) + "\n";
    }
    return out;
}

RidgeFile load_ridge(const std::string& path) {
    try {
        return parse_ridge_csv(read_text_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

CpsfmWaveform fit_ridge(const RidgeFile& ridge, int order) {
    if (order < 1) throw InvalidArgument("fit: order must be at least 1");
    if (ridge.size() == 0) throw DegenerateFit("fit: no ridge samples");
    double t0 = 0.0, T = 0.0;
    if (ridge.duration_s) {
        T = *ridge.duration_s;
    } else {
        const auto [lo, hi] = std::minmax_element(ridge.t_s.begin(), ridge.t_s.end());
        t0 = *lo;
        T = *hi - *lo;
        if (!(T > 0.0)) throw DegenerateFit("fit: ridge samples span zero time");
    }
    std::vector<RidgeSample> samples;
    samples.reserve(ridge.size());
    for (std::size_t i = 0; i < ridge.size(); ++i) {
        const double x = 2.0 * (ridge.t_s[i] - t0) / T - 1.0;
        if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12) {
            throw InvalidArgument("fit: t = " + format_double(ridge.t_s[i]) + " s lies outside [0, duration]");
        }
        samples.push_back(RidgeSample{std::clamp(x, -1.0, 1.0), 0.5 * T * ridge.f_hz[i], ridge.weight[i]});
    }
    return build_waveform(fit_wlls(samples, order - 1), T, 0.0);
}

// --- result grids -------------------------------------------------------------

void write_grid_csv(std::ostream& os, const ResultGrid& grid) {
    const auto& m = grid.meta();
    os << "# kind=" << m.kind << "\n";
    os << "# units=normalized (g = f T/2, xi = 2 tau/T, nu dimensionless)\n";
    if (!m.waveforms.empty()) {
        os << "# waveforms=";
        for (std::size_t i = 0; i < m.waveforms.size(); ++i) os << (i ? ";" : "") << m.waveforms[i];
        os << "\n";
    }
    os << "# truncation=" << m.truncation << "\n";
    os << "# tolerance=" << format_double(m.tolerance) << "\n";
    if (!m.route.empty()) os << "# route=" << m.route << "\n";

    const auto& axes = grid.axes();
    os << "# shape=";
    for (std::size_t a = 0; a < axes.size(); ++a) os << (a ? "x" : "") << axes[a].values.size();
    os << "\n";
    for (const auto& a : axes) os << a.name << ",";
    os << "re,im,abs\n";

    const auto n_axes = axes.size();
    std::vector<Eigen::Index> idx(n_axes, 0);
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
        for (std::size_t a = 0; a < n_axes; ++a) os << format_double(axes[a].values[idx[a]]) << ",";
        const cplx v = grid(k);
        os << format_double(v.real()) << "," << format_double(v.imag()) << "," << format_double(std::abs(v))
           << "\n";
        for (std::size_t a = n_axes; a-- > 0;) {
            if (++idx[a] < axes[a].values.size()) break;
            idx[a] = 0;
        }
    }
    if (!os) throw IoError("grid CSV write failed");
}

ResultGrid read_grid_csv(std::istream& is) {
    GridMeta meta;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<cplx> values;
    std::vector<std::size_t> shape;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty()) continue;
        if (v.front() == '#') {
            const auto body = trim(v.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            const auto key = body.substr(0, eq);
            const auto val = body.substr(eq + 1);
            if (key == "kind") meta.kind = std::string(val);
            else if (key == "route") meta.route = std::string(val);
            else if (key == "truncation") meta.truncation = static_cast<int>(parse_double(val, "grid meta"));
            else if (key == "tolerance") meta.tolerance = parse_double(val, "grid meta");
            else if (key == "shape") {
                for (auto d : split(val, 'x')) shape.push_back(static_cast<std::size_t>(parse_double(d, "grid meta")));
            } else if (key == "waveforms") {
                for (auto w : split(val, ';')) meta.waveforms.emplace_back(w);
            }
            continue;
        }
        const auto fields = split(v, ',');
        if (names.empty()) {
            if (fields.size() < 4 || fields[fields.size() - 3] != "re" || fields[fields.size() - 2] != "im" ||
                fields.back() != "abs") {
                throw IoError("grid CSV: header must end with re,im,abs");
            }
            for (std::size_t i = 0; i + 3 < fields.size(); ++i) names.emplace_back(fields[i]);
            columns.resize(names.size());
            continue;
        }
        const std::string ctx = "grid CSV line " + std::to_string(line_no);
        if (fields.size() != names.size() + 3) throw IoError(ctx + ": wrong field count");
        for (std::size_t a = 0; a < names.size(); ++a) columns[a].push_back(parse_double(fields[a], ctx));
        values.emplace_back(parse_double(fields[names.size()], ctx), parse_double(fields[names.size() + 1], ctx));
    }
    if (names.empty()) throw IoError("grid CSV: missing header");

    // Recover each axis from the row-major enumeration: axis a repeats every
    // `stride` rows, where stride is the product of the later axis lengths.
    std::vector<GridAxis> axes(names.size());
    std::size_t stride = 1;
    for (std::size_t a = names.size(); a-- > 0;) {
        std::vector<double> vals;
        const bool known = shape.size() == names.size();
        for (std::size_t r = 0; r < columns[a].size(); r += stride) {
            if (known ? vals.size() == shape[a] : !vals.empty() && columns[a][r] == vals.front()) break;
            vals.push_back(columns[a][r]);
        }
        axes[a].name = names[a];
        axes[a].values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        stride *= std::max<std::size_t>(vals.size(), 1);
    }
    Eigen::VectorXcd vals = Eigen::Map<Eigen::VectorXcd>(values.data(), static_cast<Eigen::Index>(values.size()));
    try {
        return ResultGrid(std::move(axes), std::move(vals), std::move(meta));
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("grid CSV: ") + e.what());
    }
}

void save_grid_csv(const std::string& path, const ResultGrid& grid) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_grid_csv(out, grid);
}

ResultGrid load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_grid_csv(in);
}

// --- audio --------------------------------------------------------------------

void write_wav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate) {
    if (sample_rate <= 0) throw InvalidArgument("wav: sample rate must be positive");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    const auto n = static_cast<std::uint32_t>(samples.size());
    const std::uint32_t data_bytes = n * 4;
    os.write("RIFF", 4);
    put_u32(os, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    put_u32(os, 18);
    put_u16(os, 3);  // IEEE float
    put_u16(os, 1);
    put_u32(os, static_cast<std::uint32_t>(sample_rate));
    put_u32(os, static_cast<std::uint32_t>(sample_rate) * 4);
    put_u16(os, 4);
    put_u16(os, 32);
    put_u16(os, 0);
    os.write("fact", 4);
    put_u32(os, 4);
    put_u32(os, n);
    os.write("data", 4);
    put_u32(os, data_bytes);
    for (Eigen::Index k = 0; k < samples.size(); ++k) {
        const float f = static_cast<float>(samples[k]);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(os, bits);
    }
    if (!os) throw IoError("write to '" + path + "' failed");
}

Eigen::VectorXd read_wav(const std::string& path, int* sample_rate) {
    const std::string raw = read_text_file(path);
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    if (raw.size() < 12 || raw.compare(0, 4, "RIFF") != 0 || raw.compare(8, 4, "WAVE") != 0) {
        throw IoError(path + ": not a RIFF/WAVE file");
    }
    std::size_t pos = 12;
    bool float_mono = false;
    while (pos + 8 <= raw.size()) {
        const std::string id = raw.substr(pos, 4);
        const std::uint32_t size = get_u32(p + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > raw.size()) throw IoError(path + ": truncated chunk '" + id + "'");
        if (id == "fmt ") {
            float_mono = get_u16(p + body) == 3 && get_u16(p + body + 2) == 1 && get_u16(p + body + 14) == 32;
            if (sample_rate) *sample_rate = static_cast<int>(get_u32(p + body + 4));
        } else if (id == "data") {
            if (!float_mono) throw IoError(path + ": only mono 32-bit float WAV is supported");
            Eigen::VectorXd out(size / 4);
            for (Eigen::Index k = 0; k < out.size(); ++k) {
                const std::uint32_t bits = get_u32(p + body + 4 * static_cast<std::size_t>(k));
                float f;
                std::memcpy(&f, &bits, 4);
                out[k] = f;
            }
            return out;
        }
        pos = body + size + (size & 1u);
    }
    throw IoError(path + ": no data chunk");
}

} // namespace cpsfm
