// Raster currency of the whole pipeline: a row-major grid of real samples.
#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "dbcr/errors.hpp"

namespace dbcr {

// Row-major grid of real-valued samples, nominal range [0, 255] for decoded
// images (code maps extend this to [0, 511]). Row index i grows downward,
// column index j to the right.
class PixelGrid {
public:
    PixelGrid() = default;

    PixelGrid(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        check_dims(width, height);
        samples_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    PixelGrid(int width, int height, std::vector<double> samples)
        : width_(width), height_(height), samples_(std::move(samples)) {
        check_dims(width, height);
        if (samples_.size() != static_cast<std::size_t>(width) * height)
            throw DimensionError("pixel grid: sample count does not match width*height");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }

    double at(int i, int j) const {
        return samples_[static_cast<std::size_t>(i) * width_ + j];
    }
    double& at(int i, int j) {
        return samples_[static_cast<std::size_t>(i) * width_ + j];
    }

    // Replicate border policy: coordinates outside the grid read the nearest
    // interior pixel.
    double at_clamped(int i, int j) const {
        const int ci = std::clamp(i, 0, height_ - 1);
        const int cj = std::clamp(j, 0, width_ - 1);
        return at(ci, cj);
    }

    const std::vector<double>& samples() const { return samples_; }
    std::vector<double>& samples() { return samples_; }

    bool same_size(const PixelGrid& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    static void check_dims(int width, int height) {
        if (width < 1 || height < 1)
            throw DimensionError("pixel grid: width and height must be >= 1");
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> samples_;
};

// Three same-sized channel grids of one colour image.
struct RgbPixelGrid {
    PixelGrid r, g, b;

    RgbPixelGrid() = default;
    RgbPixelGrid(PixelGrid red, PixelGrid green, PixelGrid blue)
        : r(std::move(red)), g(std::move(green)), b(std::move(blue)) {
        if (!r.same_size(g) || !r.same_size(b))
            throw DimensionError("rgb grid: channel dimensions differ");
    }

    int width() const { return r.width(); }
    int height() const { return r.height(); }
};

} // namespace dbcr
