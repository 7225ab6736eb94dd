#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cofflow/grid.hpp"

namespace cofflow {

/// Single-channel intensity raster with values in [0,1].
///
/// Construction validates the range, so every GrayImage in circulation
/// satisfies the invariant. Width and height are both positive.
class GrayImage {
public:
    GrayImage() = default;
    explicit GrayImage(Size size, double fill = 0.0);
    GrayImage(Size size, std::vector<double> data);
    explicit GrayImage(Grid<double> pixels);

    [[nodiscard]] Size size() const { return pixels_.size(); }
    [[nodiscard]] int width() const { return pixels_.width(); }
    [[nodiscard]] int height() const { return pixels_.height(); }

    [[nodiscard]] double operator()(int x, int y) const { return pixels_(x, y); }
    [[nodiscard]] const Grid<double>& pixels() const { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    void validate() const;
    Grid<double> pixels_;
};

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit three-channel raster, row-major (r,g,b) triples.
class RgbImage {
public:
    RgbImage() = default;
    explicit RgbImage(Size size, Rgb fill = {0, 0, 0});
    RgbImage(Size size, std::vector<std::uint8_t> interleaved);

    [[nodiscard]] Size size() const { return size_; }
    [[nodiscard]] int width() const { return size_.width; }
    [[nodiscard]] int height() const { return size_.height; }

    [[nodiscard]] Rgb operator()(int x, int y) const;
    void set(int x, int y, Rgb value);

    /// Interleaved bytes, length width*height*3.
    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const { return data_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    Size size_{};
    std::vector<std::uint8_t> data_;
};

/// Intensity in [0,1] to an 8-bit level, rounding half up.
std::uint8_t to_byte(double intensity);

/// Luma conversion used when color frames are loaded as gray.
double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// ---------------------------------------------------------------------------
// File I/O. Format is chosen from the file contents when reading and from
// the extension (.pgm / .png) when writing.

GrayImage load_image(const std::filesystem::path& path);
RgbImage load_rgb_image(const std::filesystem::path& path);

void save_image(const GrayImage& image, const std::filesystem::path& path);
void save_image(const RgbImage& image, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Geometry used for augmentation.

GrayImage hflip(const GrayImage& image);

/// Rotates counter-clockwise (as displayed, y pointing down) by `degrees`
/// about ((w-1)/2, (h-1)/2). Bilinear inverse mapping, zero fill.
GrayImage rotate(const GrayImage& image, double degrees);

/// Bilinear sample treating out-of-range neighbors as 0.
double sample_bilinear_zero(const Grid<double>& grid, double x, double y);

/// Area-averaging resize (box filter with fractional pixel coverage).
Grid<double> resize_area(const Grid<double>& grid, Size target);

}  // namespace cofflow
