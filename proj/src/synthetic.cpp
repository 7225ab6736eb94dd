#include "cofflow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cofflow::synthetic {

GrayImage gaussian_blob(Size size, double cx, double cy, double sigma, double amplitude) {
    Grid<double> g(size);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            g(x, y) = std::clamp(amplitude * std::exp(-r2 * inv), 0.0, 1.0);
        }
    }
    return GrayImage(std::move(g));
}

GrayImage smooth_texture(Size size, std::uint64_t seed, double dx, double dy, int bumps,
                         double min_sigma, double max_sigma) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, size.width - 1.0);
    std::uniform_real_distribution<double> uy(0.0, size.height - 1.0);
    std::uniform_real_distribution<double> us(min_sigma, max_sigma);
    std::uniform_real_distribution<double> ua(-1.0, 1.0);

    struct Bump {
        double x, y, s, a;
    };
    std::vector<Bump> list;
    for (int i = 0; i < bumps; ++i) {
        const double x = ux(rng), y = uy(rng), s = us(rng), a = ua(rng);
        list.push_back({x, y, s, a});
    }

    // Normalization uses the untranslated pattern so shifted copies share it.
    auto field = [&](double ox, double oy) {
        Grid<double> g(size);
        for (int y = 0; y < size.height; ++y) {
            for (int x = 0; x < size.width; ++x) {
                double v = 0.0;
                for (const auto& b : list) {
                    const double ddx = x - ox - b.x, ddy = y - oy - b.y;
                    v += b.a * std::exp(-(ddx * ddx + ddy * ddy) / (2.0 * b.s * b.s));
                }
                g(x, y) = v;
            }
        }
        return g;
    };
    const Grid<double> base = field(0.0, 0.0);
    const auto [lo, hi] = std::minmax_element(base.values().begin(), base.values().end());
    const double low = *lo, span = std::max(*hi - *lo, 1e-12);

    Grid<double> g = (dx == 0.0 && dy == 0.0) ? base : field(dx, dy);
    for (auto& v : g.values()) v = std::clamp(0.05 + 0.9 * (v - low) / span, 0.0, 1.0);
    return GrayImage(std::move(g));
}

}  // namespace cofflow::synthetic
