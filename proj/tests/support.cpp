#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numbers>

#include "cofflow/synthetic.hpp"

namespace testing {

ScratchDir::ScratchDir(const std::string& name) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("cofflow_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

cofflow::GrayImage random_byte_image(cofflow::Size size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> data(size.area());
    for (auto& v : data) v = static_cast<double>(rng() % 256) / 255.0;
    return cofflow::GrayImage(size, std::move(data));
}

cofflow::RgbImage random_rgb_image(cofflow::Size size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> data(size.area() * 3);
    for (auto& v : data) v = static_cast<std::uint8_t>(rng() % 256);
    return cofflow::RgbImage(size, std::move(data));
}

PolyCoeffs dense_poly_fit(const cofflow::Grid<double>& image, int x, int y, int poly_n, double sigma) {
    const int r = poly_n / 2;
    double m[6][7] = {};
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            const double px = dx, py = dy;
            const double basis[6] = {1.0, px, py, px * px, py * py, px * py};
            const double f = image.clamped(x + dx, y + dy);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) m[i][j] += w * basis[i] * basis[j];
                m[i][6] += w * basis[i] * f;
            }
        }
    }
    // Gaussian elimination with partial pivoting, then back substitution.
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int i = col + 1; i < 6; ++i) {
            if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
        }
        for (int k = 0; k < 7; ++k) std::swap(m[col][k], m[piv][k]);
        for (int i = col + 1; i < 6; ++i) {
            const double f = m[i][col] / m[col][col];
            for (int k = col; k < 7; ++k) m[i][k] -= f * m[col][k];
        }
    }
    PolyCoeffs out{};
    for (int i = 5; i >= 0; --i) {
        double s = m[i][6];
        for (int k = i + 1; k < 6; ++k) s -= m[i][k] * out[k];
        out[i] = s / m[i][i];
    }
    return out;
}

cofflow::RgbImage literal_combined_of(const cofflow::GrayImage& frame1, const cofflow::GrayImage& frame2,
                                      const cofflow::GrayImage& frame3, const cofflow::FlowParams& params) {
    // flow1, flow2
    const cofflow::FlowField flow1 = cofflow::farneback_flow(frame1, frame2, params);
    const cofflow::FlowField flow2 = cofflow::farneback_flow(frame2, frame3, params);
    const std::size_t n = flow1.size().area();

    // magnitude1, magnitude2
    std::vector<double> magnitude1(n), magnitude2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = flow1.u.storage()[i], v1 = flow1.v.storage()[i];
        const double u2 = flow2.u.storage()[i], v2 = flow2.v.storage()[i];
        magnitude1[i] = std::sqrt(u1 * u1 + v1 * v1);
        magnitude2[i] = std::sqrt(u2 * u2 + v2 * v2);
    }

    auto minmax = [](const std::vector<double>& in) {
        std::vector<double> out(in.size(), 0.0);
        double lo = in[0], hi = in[0];
        for (double v : in) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi > lo) {
            for (std::size_t i = 0; i < in.size(); ++i) out[i] = (in[i] - lo) / (hi - lo);
        }
        return out;
    };

    // norm_magnitude1, norm_magnitude2
    const auto norm_magnitude1 = minmax(magnitude1);
    const auto norm_magnitude2 = minmax(magnitude2);

    // combined magnitude, then its normalization
    std::vector<double> combined(n);
    for (std::size_t i = 0; i < n; ++i) combined[i] = norm_magnitude1[i] + norm_magnitude2[i];
    const auto norm_magnitude = minmax(combined);

    // convertToRGB: gray replicated, half-up rounding
    std::vector<std::uint8_t> rgb;
    rgb.reserve(3 * n);
    for (double v : norm_magnitude) {
        const auto level = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
        rgb.insert(rgb.end(), {level, level, level});
    }
    return cofflow::RgbImage(flow1.size(), std::move(rgb));
}

cofflow::GrayImage quantize(const cofflow::GrayImage& image) {
    cofflow::Grid<double> g = image.pixels();
    for (auto& v : g.values()) v = cofflow::to_byte(v) / 255.0;
    return cofflow::GrayImage(std::move(g));
}

cofflow::GrayImage random_smooth_image(cofflow::Size size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.02, 0.12), phase(0.0, 2.0 * std::numbers::pi),
        amp(0.05, 0.15);
    struct Wave {
        double fx, fy, ph, a;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 5; ++i) {
        const double fx = freq(rng), fy = freq(rng), ph = phase(rng), a = amp(rng);
        waves.push_back({fx, fy, ph, a});
    }
    return image_from(size, [&](double x, double y) {
        double v = 0.5;
        for (const auto& w : waves) v += w.a * std::cos(w.fx * x + w.fy * y + w.ph);
        return v;
    });
}

fs::path write_motion_dataset(const fs::path& dir, int per_class, std::uint64_t seed, cofflow::Size size) {
    fs::create_directories(dir / "frames");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-3.0, 3.0), disp(2.5, 4.0), back(0.2, 0.5),
        amp(0.45, 0.6);
    const cofflow::GrayImage texture = cofflow::synthetic::smooth_texture(size, seed ^ 0x5eed, 0, 0, 30, 3.0, 6.0);

    auto frame = [&](double cx, double cy, double a) {
        cofflow::Grid<double> g(size);
        for (int y = 0; y < size.height; ++y) {
            for (int x = 0; x < size.width; ++x) {
                const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                g(x, y) = std::clamp(0.1 + 0.3 * texture(x, y) + a * std::exp(-r2 / 50.0), 0.0, 1.0);
            }
        }
        return cofflow::GrayImage(std::move(g));
    };

    std::ofstream manifest(dir / "manifest.csv");
    manifest << "sample_id,onset_path,apex_path,offset_path,label\n";
    for (int i = 0; i < 2 * per_class; ++i) {
        const bool horizontal = i % 2 == 0;
        const std::string label = horizontal ? "horizontal" : "vertical";
        const std::string id = label.substr(0, 1) + std::to_string(i / 2);
        const double cx = size.width / 2.0 + jitter(rng), cy = size.height / 2.0 + jitter(rng);
        const double d = disp(rng), ret = back(rng), a = amp(rng);
        const double dx = horizontal ? d : 0.0, dy = horizontal ? 0.0 : d;
        const std::string paths[3] = {"frames/" + id + "_onset.pgm", "frames/" + id + "_apex.pgm",
                                      "frames/" + id + "_offset.pgm"};
        cofflow::save_image(frame(cx, cy, a), dir / paths[0]);
        cofflow::save_image(frame(cx + dx, cy + dy, a), dir / paths[1]);
        cofflow::save_image(frame(cx + ret * dx, cy + ret * dy, a), dir / paths[2]);
        manifest << id << ',' << paths[0] << ',' << paths[1] << ',' << paths[2] << ',' << label << '\n';
    }
    return dir / "manifest.csv";
}

}  // namespace testing
