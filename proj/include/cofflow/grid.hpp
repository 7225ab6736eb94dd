#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "cofflow/error.hpp"

namespace cofflow {

struct Size {
    int width = 0;
    int height = 0;

    [[nodiscard]] std::size_t area() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    friend bool operator==(const Size&, const Size&) = default;
};

/// Dense row-major 2-D array. The building block for all raster types.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(Size size, T fill = T{}) : size_(size), data_(checked_area(size), fill) {}
    Grid(Size size, std::vector<T> data) : size_(size), data_(std::move(data)) {
        if (data_.size() != checked_area(size)) {
            throw DimensionError("grid data length does not match width*height");
        }
    }

    [[nodiscard]] Size size() const { return size_; }
    [[nodiscard]] int width() const { return size_.width; }
    [[nodiscard]] int height() const { return size_.height; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) {
        assert(x >= 0 && x < size_.width && y >= 0 && y < size_.height);
        return data_[static_cast<std::size_t>(y) * size_.width + x];
    }
    const T& operator()(int x, int y) const {
        assert(x >= 0 && x < size_.width && y >= 0 && y < size_.height);
        return data_[static_cast<std::size_t>(y) * size_.width + x];
    }

    // clamp-to-edge access
    const T& clamped(int x, int y) const {
        x = x < 0 ? 0 : (x >= size_.width ? size_.width - 1 : x);
        y = y < 0 ? 0 : (y >= size_.height ? size_.height - 1 : y);
        return (*this)(x, y);
    }

    std::span<T> row(int y) {
        return {data_.data() + static_cast<std::size_t>(y) * size_.width,
                static_cast<std::size_t>(size_.width)};
    }
    std::span<const T> row(int y) const {
        return {data_.data() + static_cast<std::size_t>(y) * size_.width,
                static_cast<std::size_t>(size_.width)};
    }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    const std::vector<T>& storage() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static std::size_t checked_area(Size s) {
        if (s.width < 0 || s.height < 0) throw DimensionError("negative grid dimension");
        return s.area();
    }

    Size size_{};
    std::vector<T> data_;
};

}  // namespace cofflow
