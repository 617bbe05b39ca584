// Geometry and colour plumbing: grayscale conversion, bilinear resize,
// replicate padding.
#pragma once

#include "dbcr/pixel_grid.hpp"

namespace dbcr {

// BT.601 luma: 0.299 r + 0.587 g + 0.114 b.
PixelGrid to_grayscale(const RgbPixelGrid& img);

// Bilinear resize with replicate-clamped borders. Resizing to the source
// size returns a bitwise copy; constant grids stay constant for any target.
PixelGrid resize(const PixelGrid& grid, int new_width, int new_height);

inline RgbPixelGrid resize(const RgbPixelGrid& img, int new_width, int new_height) {
    return {resize(img.r, new_width, new_height),
            resize(img.g, new_width, new_height),
            resize(img.b, new_width, new_height)};
}

// Grows the grid by `margin` pixels on every side, copying the nearest
// interior pixel into the new border.
PixelGrid pad_replicate(const PixelGrid& grid, int margin);

} // namespace dbcr
