#pragma once

#include <filesystem>
#include <vector>

#include "cofflow/grid.hpp"
#include "cofflow/image.hpp"

namespace cofflow {

/// Dense displacement field in pixels; u is horizontal, v vertical.
struct FlowField {
    Grid<double> u;
    Grid<double> v;

    FlowField() = default;
    explicit FlowField(Size size) : u(size, 0.0), v(size, 0.0) {}
    FlowField(Grid<double> u_, Grid<double> v_);

    [[nodiscard]] Size size() const { return u.size(); }
    [[nodiscard]] int width() const { return u.width(); }
    [[nodiscard]] int height() const { return u.height(); }

    /// True when every component is finite.
    [[nodiscard]] bool finite() const;

    friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Per-pixel quadratic model f(p) ~ p'Ap + b'p + c of a local neighborhood,
/// with p = (x, y) relative to the pixel. A is symmetric, stored as
/// (a11, a12, a22).
struct PolyExpansion {
    Grid<double> a11, a12, a22;
    Grid<double> b1, b2;
    Grid<double> c;

    [[nodiscard]] Size size() const { return c.size(); }
};

struct FlowParams {
    double pyramid_scale = 0.5;
    int levels = 3;
    int window_size = 15;
    int iterations = 3;
    int poly_n = 5;
    double poly_sigma = 1.1;

    /// Throws InvalidArgument when a field is outside its domain.
    void validate() const;

    friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

/// Normalized sampled Gaussian of length 2*radius+1.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Weighted least-squares fit of {1, x, y, x^2, y^2, xy} over a
/// poly_n x poly_n neighborhood with Gaussian applicability, clamp-to-edge
/// borders. Runs as separable correlations.
PolyExpansion poly_expand(const GrayImage& image, int poly_n, double poly_sigma);
PolyExpansion poly_expand(const Grid<double>& image, int poly_n, double poly_sigma);

/// One displacement update from two expansions and a prior estimate.
FlowField flow_single_scale(const PolyExpansion& first, const PolyExpansion& second,
                            const FlowField& prior, int window_size);

/// Coarse-to-fine two-frame dense flow from frame1 to frame2.
FlowField farneback_flow(const GrayImage& frame1, const GrayImage& frame2,
                         const FlowParams& params = {});

/// Pyramid level sizes, finest first, for an image of `size`.
/// Throws DimensionError when the coarsest level is smaller than poly_n.
std::vector<Size> pyramid_sizes(Size size, const FlowParams& params);

// ---------------------------------------------------------------------------
// Middlebury .flo persistence.

inline constexpr float kFloTag = 202021.25f;

void write_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

std::vector<unsigned char> encode_flo(const FlowField& flow);
FlowField decode_flo(const std::vector<unsigned char>& bytes);

}  // namespace cofflow
