#include <cmath>
#include <string>

#include "cofflow/flow.hpp"

namespace cofflow {
namespace {

constexpr double kSingularRatio = 1e-9;
// Per-pixel floor on trace(A'A): curvature below 1e-12 is rounding residue
// of the expansion (flat regions), not texture.
constexpr double kFlatCurvature2 = 1e-24;

// Clamp-to-edge separable box sum over a window x window neighborhood.
Grid<double> box_sum(const Grid<double>& in, int window) {
    const int r = window / 2;
    Grid<double> tmp(in.size()), out(in.size());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) s += in.clamped(x, y + k);
            tmp(x, y) = s;
        }
    }
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0;
            for (int k = -r; k <= r; ++k) s += tmp.clamped(x + k, y);
            out(x, y) = s;
        }
    }
    return out;
}

Grid<double> gaussian_blur(const Grid<double>& in, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const auto k = gaussian_kernel(sigma, radius);
    Grid<double> tmp(in.size()), out(in.size());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i) s += k[i + radius] * in.clamped(x, y + i);
            tmp(x, y) = s;
        }
    }
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i) s += k[i + radius] * tmp.clamped(x + i, y);
            out(x, y) = s;
        }
    }
    return out;
}

double sample_bilinear_clamped(const Grid<double>& g, double x, double y) {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const double fx = x - fx0;
    const double fy = y - fy0;
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    return (1.0 - fy) * ((1.0 - fx) * g.clamped(x0, y0) + fx * g.clamped(x0 + 1, y0)) +
           fy * ((1.0 - fx) * g.clamped(x0, y0 + 1) + fx * g.clamped(x0 + 1, y0 + 1));
}

// Pixel-center aligned bilinear resampling, multiplying values by `gain`.
Grid<double> resample(const Grid<double>& in, Size target, double gain = 1.0) {
    const double sx = static_cast<double>(in.width()) / target.width;
    const double sy = static_cast<double>(in.height()) / target.height;
    Grid<double> out(target);
    for (int y = 0; y < target.height; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < target.width; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            out(x, y) = gain * sample_bilinear_clamped(in, src_x, src_y);
        }
    }
    return out;
}

std::vector<Grid<double>> build_pyramid(const GrayImage& image, const std::vector<Size>& sizes) {
    std::vector<Grid<double>> levels;
    levels.reserve(sizes.size());
    levels.push_back(image.pixels());
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        levels.push_back(resample(gaussian_blur(levels.back(), 1.0), sizes[i]));
    }
    return levels;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

FlowField::FlowField(Grid<double> u_, Grid<double> v_) : u(std::move(u_)), v(std::move(v_)) {
    if (u.size() != v.size()) throw DimensionError("flow components differ in size");
}

bool FlowField::finite() const {
    for (double x : u.values()) {
        if (!std::isfinite(x)) return false;
    }
    for (double x : v.values()) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void FlowParams::validate() const {
    if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) {
        throw InvalidArgument("pyramid_scale must lie in (0,1)");
    }
    if (levels < 1) throw InvalidArgument("levels must be >= 1");
    if (window_size < 3 || window_size % 2 == 0) {
        throw InvalidArgument("window_size must be odd and >= 3");
    }
    if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
    if (poly_n < 3 || poly_n % 2 == 0) throw InvalidArgument("poly_n must be odd and >= 3");
    if (!(poly_sigma > 0.0) || !std::isfinite(poly_sigma)) {
        throw InvalidArgument("poly_sigma must be positive");
    }
}

std::vector<Size> pyramid_sizes(Size size, const FlowParams& params) {
    params.validate();
    std::vector<Size> sizes{size};
    for (int i = 1; i < params.levels; ++i) {
        const Size prev = sizes.back();
        sizes.push_back({static_cast<int>(std::lround(prev.width * params.pyramid_scale)),
                         static_cast<int>(std::lround(prev.height * params.pyramid_scale))});
    }
    const Size coarsest = sizes.back();
    if (coarsest.width < params.poly_n || coarsest.height < params.poly_n) {
        throw DimensionError("image too small for pyramid: " + std::to_string(size.width) + "x" +
                             std::to_string(size.height) + " reaches " +
                             std::to_string(coarsest.width) + "x" + std::to_string(coarsest.height) +
                             " at level " + std::to_string(params.levels - 1) +
                             ", below poly_n=" + std::to_string(params.poly_n));
    }
    return sizes;
}

FlowField flow_single_scale(const PolyExpansion& first, const PolyExpansion& second,
                            const FlowField& prior, int window_size) {
    const Size size = first.size();
    if (second.size() != size || prior.size() != size) {
        throw DimensionError("flow_single_scale: expansions and prior must share dimensions");
    }
    if (window_size < 1 || window_size % 2 == 0) {
        throw InvalidArgument("window_size must be odd and positive");
    }

    // Per-pixel normal equations G d = h with G = A'A, h = A' db.
    Grid<double> g11(size), g12(size), g22(size), h1(size), h2(size);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const int tx = clamp_index(x + static_cast<int>(std::lround(prior.u(x, y))), size.width);
            const int ty = clamp_index(y + static_cast<int>(std::lround(prior.v(x, y))), size.height);
            const double ox = tx - x;
            const double oy = ty - y;

            const double a11 = 0.5 * (first.a11(x, y) + second.a11(tx, ty));
            const double a12 = 0.5 * (first.a12(x, y) + second.a12(tx, ty));
            const double a22 = 0.5 * (first.a22(x, y) + second.a22(tx, ty));
            const double db1 = -0.5 * (second.b1(tx, ty) - first.b1(x, y)) + a11 * ox + a12 * oy;
            const double db2 = -0.5 * (second.b2(tx, ty) - first.b2(x, y)) + a12 * ox + a22 * oy;

            g11(x, y) = a11 * a11 + a12 * a12;
            g12(x, y) = a12 * (a11 + a22);
            g22(x, y) = a12 * a12 + a22 * a22;
            h1(x, y) = a11 * db1 + a12 * db2;
            h2(x, y) = a12 * db1 + a22 * db2;
        }
    }

    const Grid<double> s11 = box_sum(g11, window_size);
    const Grid<double> s12 = box_sum(g12, window_size);
    const Grid<double> s22 = box_sum(g22, window_size);
    const Grid<double> t1 = box_sum(h1, window_size);
    const Grid<double> t2 = box_sum(h2, window_size);

    const double trace_floor = kFlatCurvature2 * window_size * window_size;
    FlowField out(size);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const double a = s11(x, y), b = s12(x, y), d = s22(x, y);
            const double trace = a + d;
            const double det = a * d - b * b;
            if (!(trace > trace_floor) || !(det >= kSingularRatio * trace * trace)) {
                out.u(x, y) = prior.u(x, y);
                out.v(x, y) = prior.v(x, y);
                continue;
            }
            out.u(x, y) = (d * t1(x, y) - b * t2(x, y)) / det;
            out.v(x, y) = (a * t2(x, y) - b * t1(x, y)) / det;
        }
    }
    return out;
}

FlowField farneback_flow(const GrayImage& frame1, const GrayImage& frame2, const FlowParams& params) {
    if (frame1.size() != frame2.size()) {
        throw DimensionError("farneback_flow: frames differ in size (" +
                             std::to_string(frame1.width()) + "x" + std::to_string(frame1.height()) +
                             " vs " + std::to_string(frame2.width()) + "x" +
                             std::to_string(frame2.height()) + ")");
    }
    const std::vector<Size> sizes = pyramid_sizes(frame1.size(), params);
    const auto pyr1 = build_pyramid(frame1, sizes);
    const auto pyr2 = build_pyramid(frame2, sizes);

    FlowField flow;
    for (int level = static_cast<int>(sizes.size()) - 1; level >= 0; --level) {
        const Size size = sizes[level];
        if (flow.u.empty()) {
            flow = FlowField(size);
        } else {
            const Size coarse = flow.size();
            flow = FlowField(resample(flow.u, size, static_cast<double>(size.width) / coarse.width),
                             resample(flow.v, size, static_cast<double>(size.height) / coarse.height));
        }
        const PolyExpansion e1 = poly_expand(pyr1[level], params.poly_n, params.poly_sigma);
        const PolyExpansion e2 = poly_expand(pyr2[level], params.poly_n, params.poly_sigma);
        for (int it = 0; it < params.iterations; ++it) {
            flow = flow_single_scale(e1, e2, flow, params.window_size);
        }
    }
    return flow;
}

}  // namespace cofflow
