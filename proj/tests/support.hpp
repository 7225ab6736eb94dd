#pragma once

// Test-only helpers: seeded generators, a scratch directory, and the
// independent oracles the library is checked against. Nothing here calls the
// code path it is used to verify.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cofflow/flow.hpp"
#include "cofflow/image.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name);
    ~ScratchDir();
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    fs::path path_;
};

/// Uniform random 8-bit-representable gray image (k/255 values).
cofflow::GrayImage random_byte_image(cofflow::Size size, std::uint64_t seed);

cofflow::RgbImage random_rgb_image(cofflow::Size size, std::uint64_t seed);

/// Grid from f(x, y), clamped into [0,1].
template <typename F>
cofflow::GrayImage image_from(cofflow::Size size, F f) {
    cofflow::Grid<double> g(size);
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            const double v = f(static_cast<double>(x), static_cast<double>(y));
            g(x, y) = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
    return cofflow::GrayImage(std::move(g));
}

/// Coefficients (c, bx, by, axx, ayy, axy) where axy multiplies x*y.
using PolyCoeffs = std::array<double, 6>;

/// Dense weighted least-squares fit at one pixel: builds the 6x6 normal
/// equations from every neighborhood sample (clamp-to-edge) and solves them
/// directly. No separability, no shared inverse.
PolyCoeffs dense_poly_fit(const cofflow::Grid<double>& image, int x, int y, int poly_n, double sigma);

/// Straight transcription of the two-flow magnitude fusion, written without
/// the library's magnitude/normalize/combine/to_rgb helpers.
cofflow::RgbImage literal_combined_of(const cofflow::GrayImage& frame1, const cofflow::GrayImage& frame2,
                                      const cofflow::GrayImage& frame3, const cofflow::FlowParams& params);

/// Rounds every intensity to the nearest 8-bit level, as a file round trip would.
cofflow::GrayImage quantize(const cofflow::GrayImage& image);

/// Random smooth image: a few low-frequency cosines, seeded.
cofflow::GrayImage random_smooth_image(cofflow::Size size, std::uint64_t seed);

/// Writes a two-class synthetic micro-motion dataset: a blob on a static
/// textured background moves horizontally ("horizontal") or vertically
/// ("vertical") between onset and apex and partially returns at offset.
/// Frames are PGM files under `dir`; returns the manifest path.
fs::path write_motion_dataset(const fs::path& dir, int per_class, std::uint64_t seed,
                              cofflow::Size size = {64, 64});

}  // namespace testing
