#include "cofflow/image.hpp"

#include <cmath>
#include <string>

namespace cofflow {

GrayImage::GrayImage(Size size, double fill) : pixels_(size, fill) { validate(); }

GrayImage::GrayImage(Size size, std::vector<double> data) : pixels_(size, std::move(data)) {
    validate();
}

GrayImage::GrayImage(Grid<double> pixels) : pixels_(std::move(pixels)) { validate(); }

void GrayImage::validate() const {
    if (pixels_.width() <= 0 || pixels_.height() <= 0) {
        throw DimensionError("gray image must have positive width and height");
    }
    for (double v : pixels_.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("gray intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

RgbImage::RgbImage(Size size, Rgb fill) : size_(size) {
    if (size.width <= 0 || size.height <= 0) {
        throw DimensionError("rgb image must have positive width and height");
    }
    data_.reserve(size.area() * 3);
    for (std::size_t i = 0; i < size.area(); ++i) {
        data_.insert(data_.end(), fill.begin(), fill.end());
    }
}

RgbImage::RgbImage(Size size, std::vector<std::uint8_t> interleaved)
    : size_(size), data_(std::move(interleaved)) {
    if (size.width <= 0 || size.height <= 0) {
        throw DimensionError("rgb image must have positive width and height");
    }
    if (data_.size() != size.area() * 3) {
        throw DimensionError("rgb data length does not match width*height*3");
    }
}

Rgb RgbImage::operator()(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * size_.width + x) * 3;
    return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(int x, int y, Rgb value) {
    const std::size_t i = (static_cast<std::size_t>(y) * size_.width + x) * 3;
    data_[i] = value[0];
    data_[i + 1] = value[1];
    data_[i + 2] = value[2];
}

std::uint8_t to_byte(double intensity) {
    const double scaled = std::floor(intensity * 255.0 + 0.5);
    if (scaled <= 0.0) return 0;
    if (scaled >= 255.0) return 255;
    return static_cast<std::uint8_t>(scaled);
}

double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    return y > 1.0 ? 1.0 : y;
}

}  // namespace cofflow
