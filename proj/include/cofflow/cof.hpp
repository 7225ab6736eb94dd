#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cofflow/flow.hpp"
#include "cofflow/image.hpp"

namespace cofflow {

inline constexpr std::string_view kToolVersion = "cofflow 1.0.0";

/// Nonnegative finite scalar raster (flow magnitudes and their normalizations).
class ScalarMap {
public:
    ScalarMap() = default;
    ScalarMap(Size size, std::vector<double> values);
    explicit ScalarMap(Grid<double> values);

    [[nodiscard]] Size size() const { return values_.size(); }
    [[nodiscard]] int width() const { return values_.width(); }
    [[nodiscard]] int height() const { return values_.height(); }
    [[nodiscard]] double operator()(int x, int y) const { return values_(x, y); }
    [[nodiscard]] const Grid<double>& grid() const { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_.values(); }

    friend bool operator==(const ScalarMap&, const ScalarMap&) = default;

private:
    Grid<double> values_;
};

enum class RenderMode {
    Gray,     // v*255 replicated into r, g, b
    Viridis,  // 256-entry viridis lookup
};

std::string_view to_string(RenderMode mode);
RenderMode parse_render_mode(std::string_view text);

struct CofMetadata {
    std::string sample_id;
    FlowParams params;
    RenderMode mode = RenderMode::Gray;
    std::string normalization = "minmax";
    std::string tool_version = std::string(kToolVersion);
    std::map<std::string, std::string> extra;  // label, augmentation tag, ...

    friend bool operator==(const CofMetadata&, const CofMetadata&) = default;
};

/// Fused feature image plus its provenance.
struct CofImage {
    RgbImage image;
    CofMetadata meta;
};

/// Per-pixel sqrt(u^2 + v^2).
ScalarMap magnitude(const FlowField& flow);

/// Min-max rescale to [0,1]; a constant map becomes all zeros.
ScalarMap normalize(const ScalarMap& map);

/// Sum of two normalized maps, normalized again.
ScalarMap combine_magnitudes(const ScalarMap& first, const ScalarMap& second);

/// Renders a normalized map. Throws InvalidArgument for values outside [0,1].
CofImage to_rgb(const ScalarMap& map, RenderMode mode = RenderMode::Gray);

/// Viridis lookup entry for an 8-bit level.
Rgb viridis(std::uint8_t level);

struct CofOptions {
    FlowParams params;
    RenderMode mode = RenderMode::Gray;
    std::string sample_id;
};

/// Onset->apex and apex->offset flow magnitudes fused into one image.
CofImage compute_cof(const GrayImage& onset, const GrayImage& apex, const GrayImage& offset,
                     const CofOptions& options = {});

// Sidecar: one `key=value` per line, keys sorted, trailing newline.
std::string format_metadata(const CofMetadata& meta);
CofMetadata parse_metadata(std::string_view text);
void write_metadata(const CofMetadata& meta, const std::filesystem::path& path);
CofMetadata read_metadata(const std::filesystem::path& path);

/// Short human-readable rendering of flow parameters, also used in run logs.
std::string describe(const FlowParams& params);

}  // namespace cofflow
