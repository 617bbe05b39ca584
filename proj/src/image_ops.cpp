#include "dbcr/image_ops.hpp"

#include <cmath>

namespace dbcr {

PixelGrid to_grayscale(const RgbPixelGrid& img) {
    PixelGrid out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.samples()[i] = 0.299 * img.r.samples()[i] +
                           0.587 * img.g.samples()[i] +
                           0.114 * img.b.samples()[i];
    }
    return out;
}

PixelGrid resize(const PixelGrid& grid, int new_width, int new_height) {
    if (grid.empty()) throw DimensionError("resize: empty grid");
    if (new_width < 1 || new_height < 1)
        throw DimensionError("resize: target dimensions must be >= 1");
    if (new_width == grid.width() && new_height == grid.height()) return grid;

    const double scale_x = static_cast<double>(grid.width()) / new_width;
    const double scale_y = static_cast<double>(grid.height()) / new_height;

    PixelGrid out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        const double sy = (y + 0.5) * scale_y - 0.5;
        const int i0 = static_cast<int>(std::floor(sy));
        const double fy = sy - i0;
        const int r0 = std::clamp(i0, 0, grid.height() - 1);
        const int r1 = std::clamp(i0 + 1, 0, grid.height() - 1);
        for (int x = 0; x < new_width; ++x) {
            const double sx = (x + 0.5) * scale_x - 0.5;
            const int j0 = static_cast<int>(std::floor(sx));
            const double fx = sx - j0;
            const int c0 = std::clamp(j0, 0, grid.width() - 1);
            const int c1 = std::clamp(j0 + 1, 0, grid.width() - 1);

            // a + f*(b-a) keeps constant regions exactly constant.
            const double top = grid.at(r0, c0) + fx * (grid.at(r0, c1) - grid.at(r0, c0));
            const double bottom = grid.at(r1, c0) + fx * (grid.at(r1, c1) - grid.at(r1, c0));
            out.at(y, x) = top + fy * (bottom - top);
        }
    }
    return out;
}

PixelGrid pad_replicate(const PixelGrid& grid, int margin) {
    if (grid.empty()) throw DimensionError("pad_replicate: empty grid");
    if (margin < 0) throw DimensionError("pad_replicate: negative margin");
    if (margin == 0) return grid;

    PixelGrid out(grid.width() + 2 * margin, grid.height() + 2 * margin);
    for (int i = 0; i < out.height(); ++i)
        for (int j = 0; j < out.width(); ++j)
            out.at(i, j) = grid.at_clamped(i - margin, j - margin);
    return out;
}

} // namespace dbcr
