#include <algorithm>
#include <cmath>
#include <numbers>

#include "cofflow/image.hpp"

namespace cofflow {
namespace {

// cos/sin of an angle in degrees, exact at multiples of 90.
std::pair<double, double> cos_sin_degrees(double degrees) {
    const double reduced = std::remainder(degrees, 360.0);  // (-180, 180]
    if (reduced == 0.0) return {1.0, 0.0};
    if (reduced == 90.0) return {0.0, 1.0};
    if (reduced == -90.0) return {0.0, -1.0};
    if (reduced == 180.0 || reduced == -180.0) return {-1.0, 0.0};
    const double rad = reduced * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

struct AreaTap {
    int index;
    double weight;
};

// Source taps (with coverage weights normalized to sum 1) for each target cell.
std::vector<std::vector<AreaTap>> area_taps(int source, int target) {
    std::vector<std::vector<AreaTap>> taps(static_cast<std::size_t>(target));
    const double scale = static_cast<double>(source) / target;
    for (int t = 0; t < target; ++t) {
        const double lo = t * scale;
        const double hi = (t + 1) * scale;
        const int first = static_cast<int>(std::floor(lo));
        const int last = std::min(source - 1, static_cast<int>(std::ceil(hi)) - 1);
        for (int s = first; s <= last; ++s) {
            const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
            if (overlap > 0.0) taps[t].push_back({s, overlap / scale});
        }
    }
    return taps;
}

}  // namespace

GrayImage hflip(const GrayImage& image) {
    Grid<double> out(image.size());
    const int w = image.width();
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < w; ++x) out(w - 1 - x, y) = image(x, y);
    }
    return GrayImage(std::move(out));
}

double sample_bilinear_zero(const Grid<double>& grid, double x, double y) {
    const double fx0 = std::floor(x);
    const double fy0 = std::floor(y);
    const double fx = x - fx0;
    const double fy = y - fy0;
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    auto at = [&](int xi, int yi) {
        if (xi < 0 || yi < 0 || xi >= grid.width() || yi >= grid.height()) return 0.0;
        return grid(xi, yi);
    };
    return (1.0 - fy) * ((1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) +
           fy * ((1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1));
}

GrayImage rotate(const GrayImage& image, double degrees) {
    const auto [c, s] = cos_sin_degrees(degrees);
    const double cx = (image.width() - 1) / 2.0;
    const double cy = (image.height() - 1) / 2.0;
    const auto& src = image.pixels();
    const double lo_x = -1.0;
    const double hi_x = image.width();
    const double lo_y = -1.0;
    const double hi_y = image.height();

    Grid<double> out(image.size());
    for (int y = 0; y < image.height(); ++y) {
        const double dy = y - cy;
        for (int x = 0; x < image.width(); ++x) {
            const double dx = x - cx;
            const double sx = cx + dx * c - dy * s;
            const double sy = cy + dx * s + dy * c;
            if (sx <= lo_x || sx >= hi_x || sy <= lo_y || sy >= hi_y) continue;
            // convex combination of values in [0,1]; clamp guards rounding.
            out(x, y) = std::clamp(sample_bilinear_zero(src, sx, sy), 0.0, 1.0);
        }
    }
    return GrayImage(std::move(out));
}

Grid<double> resize_area(const Grid<double>& grid, Size target) {
    if (grid.empty() || target.width <= 0 || target.height <= 0) {
        throw DimensionError("resize_area needs non-empty source and target");
    }
    const auto xtaps = area_taps(grid.width(), target.width);
    const auto ytaps = area_taps(grid.height(), target.height);

    Grid<double> horizontal({target.width, grid.height()});
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < target.width; ++x) {
            double acc = 0.0;
            for (const auto& t : xtaps[x]) acc += t.weight * grid(t.index, y);
            horizontal(x, y) = acc;
        }
    }
    Grid<double> out(target);
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            double acc = 0.0;
            for (const auto& t : ytaps[y]) acc += t.weight * horizontal(x, t.index);
            out(x, y) = acc;
        }
    }
    return out;
}

}  // namespace cofflow
