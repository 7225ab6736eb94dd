#include "cofflow/cof.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cofflow {
namespace {

constexpr std::array<Rgb, 256> kViridis = {{
#include "viridis_table.inc"
}};

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view key, const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError("metadata: bad number for '" + std::string(key) + "': " + text);
    }
    return v;
}

int parse_int(std::string_view key, const std::string& text) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError("metadata: bad integer for '" + std::string(key) + "': " + text);
    }
    return v;
}

}  // namespace

ScalarMap::ScalarMap(Size size, std::vector<double> values) : ScalarMap(Grid<double>(size, std::move(values))) {}

ScalarMap::ScalarMap(Grid<double> values) : values_(std::move(values)) {
    for (double v : values_.values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidArgument("scalar map values must be finite and nonnegative");
        }
    }
}

std::string_view to_string(RenderMode mode) {
    return mode == RenderMode::Gray ? "gray" : "viridis";
}

RenderMode parse_render_mode(std::string_view text) {
    if (text == "gray") return RenderMode::Gray;
    if (text == "viridis") return RenderMode::Viridis;
    throw InvalidArgument("unknown render mode '" + std::string(text) + "'");
}

Rgb viridis(std::uint8_t level) { return kViridis[level]; }

ScalarMap magnitude(const FlowField& flow) {
    Grid<double> out(flow.size());
    auto u = flow.u.values();
    auto v = flow.v.values();
    auto m = out.values();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::sqrt(u[i] * u[i] + v[i] * v[i]);
    return ScalarMap(std::move(out));
}

ScalarMap normalize(const ScalarMap& map) {
    Grid<double> out(map.size(), 0.0);
    if (map.values().empty()) return ScalarMap(std::move(out));
    const auto [lo_it, hi_it] = std::minmax_element(map.values().begin(), map.values().end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (range > 0.0) {
        auto src = map.values();
        auto dst = out.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (src[i] - lo) / range;
    }
    return ScalarMap(std::move(out));
}

ScalarMap combine_magnitudes(const ScalarMap& first, const ScalarMap& second) {
    if (first.size() != second.size()) {
        throw DimensionError("combine_magnitudes: maps differ in size");
    }
    Grid<double> sum(first.size());
    auto a = first.values();
    auto b = second.values();
    auto s = sum.values();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
    return normalize(ScalarMap(std::move(sum)));
}

CofImage to_rgb(const ScalarMap& map, RenderMode mode) {
    for (double v : map.values()) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("to_rgb: map is not normalized to [0,1]");
    }
    RgbImage image(map.size());
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const std::uint8_t level = to_byte(map(x, y));
            image.set(x, y, mode == RenderMode::Gray ? Rgb{level, level, level} : kViridis[level]);
        }
    }
    CofMetadata meta;
    meta.mode = mode;
    return {std::move(image), std::move(meta)};
}

CofImage compute_cof(const GrayImage& onset, const GrayImage& apex, const GrayImage& offset,
                     const CofOptions& options) {
    if (onset.size() != apex.size() || apex.size() != offset.size()) {
        throw DimensionError("compute_cof: onset, apex and offset frames differ in size");
    }
    const FlowField rise = farneback_flow(onset, apex, options.params);
    const FlowField decay = farneback_flow(apex, offset, options.params);

    const ScalarMap rise_mag = magnitude(rise);
    const ScalarMap decay_mag = magnitude(decay);

    const ScalarMap rise_norm = normalize(rise_mag);
    const ScalarMap decay_norm = normalize(decay_mag);

    const ScalarMap fused = combine_magnitudes(rise_norm, decay_norm);

    CofImage cof = to_rgb(fused, options.mode);
    cof.meta.sample_id = options.sample_id;
    cof.meta.params = options.params;
    return cof;
}

std::string describe(const FlowParams& p) {
    std::ostringstream os;
    os << "pyr_scale=" << format_double(p.pyramid_scale) << " levels=" << p.levels
       << " winsize=" << p.window_size << " iters=" << p.iterations << " poly_n=" << p.poly_n
       << " poly_sigma=" << format_double(p.poly_sigma);
    return os.str();
}

std::string format_metadata(const CofMetadata& meta) {
    std::map<std::string, std::string> kv = meta.extra;
    kv["sample_id"] = meta.sample_id;
    kv["mode"] = std::string(to_string(meta.mode));
    kv["normalization"] = meta.normalization;
    kv["tool_version"] = meta.tool_version;
    kv["flow.pyramid_scale"] = format_double(meta.params.pyramid_scale);
    kv["flow.levels"] = std::to_string(meta.params.levels);
    kv["flow.window_size"] = std::to_string(meta.params.window_size);
    kv["flow.iterations"] = std::to_string(meta.params.iterations);
    kv["flow.poly_n"] = std::to_string(meta.params.poly_n);
    kv["flow.poly_sigma"] = format_double(meta.params.poly_sigma);

    std::string out;
    for (const auto& [k, v] : kv) {
        if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
            throw InvalidArgument("metadata key/value contains a reserved character: " + k);
        }
        out += k + "=" + v + "\n";
    }
    return out;
}

CofMetadata parse_metadata(std::string_view text) {
    CofMetadata meta;
    meta.tool_version.clear();
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("metadata: line without '=': " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "sample_id") meta.sample_id = value;
        else if (key == "mode") meta.mode = parse_render_mode(value);
        else if (key == "normalization") meta.normalization = value;
        else if (key == "tool_version") meta.tool_version = value;
        else if (key == "flow.pyramid_scale") meta.params.pyramid_scale = parse_double(key, value);
        else if (key == "flow.levels") meta.params.levels = parse_int(key, value);
        else if (key == "flow.window_size") meta.params.window_size = parse_int(key, value);
        else if (key == "flow.iterations") meta.params.iterations = parse_int(key, value);
        else if (key == "flow.poly_n") meta.params.poly_n = parse_int(key, value);
        else if (key == "flow.poly_sigma") meta.params.poly_sigma = parse_double(key, value);
        else meta.extra[key] = value;
    }
    return meta;
}

void write_metadata(const CofMetadata& meta, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << format_metadata(meta);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

CofMetadata read_metadata(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_metadata(ss.str());
}

}  // namespace cofflow
