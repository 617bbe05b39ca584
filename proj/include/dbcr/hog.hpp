// Histogram of Oriented Gradients: central-difference gradients, orientation
// voting per cell, block normalization, concatenation.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dbcr/pixel_grid.hpp"

namespace dbcr {

enum class BlockNorm { l1, l2 };

struct HogParams {
    int cell_size = 8;     // pixels per cell side
    int block_size = 2;    // cells per block side
    int block_stride = 1;  // cells
    int bin_count = 9;
    bool signed_orientation = false; // false: 0..180 deg, true: 0..360 deg
    BlockNorm norm = BlockNorm::l2;
    double epsilon = 1e-5;
};

void validate(const HogParams& params);

struct HogLayout {
    int blocks_x = 0;
    int blocks_y = 0;
    int cells_per_block = 0; // block_size^2
    int bin_count = 0;

    std::size_t length() const {
        return static_cast<std::size_t>(blocks_x) * blocks_y * cells_per_block * bin_count;
    }
};

struct HogVector {
    std::vector<double> values;
    HogLayout layout;
};

// Per-cell orientation histograms before any normalization; bins are stored
// contiguously per cell, cells row-major.
struct CellHistograms {
    int cells_x = 0;
    int cells_y = 0;
    int bin_count = 0;
    std::vector<double> bins;

    const double* cell(int cy, int cx) const {
        return bins.data() + (static_cast<std::size_t>(cy) * cells_x + cx) * bin_count;
    }
};

// Central differences with replicate borders:
//   gx(i,j) = I(i,j+1) - I(i,j-1),  gy(i,j) = I(i+1,j) - I(i-1,j).
// Requires a grid at least 3x3.
std::pair<PixelGrid, PixelGrid> gradients(const PixelGrid& grid);

// mag = sqrt(gx^2+gy^2); theta in degrees, folded to [0,180) when unsigned
// and [0,360) when signed. Zero gradient maps to theta = 0.
std::pair<PixelGrid, PixelGrid> magnitude_orientation(const PixelGrid& gx,
                                                      const PixelGrid& gy,
                                                      bool signed_orientation = false);

// Each pixel votes its magnitude, split linearly between the two nearest
// bin centers (circular). Trailing partial cells are dropped.
CellHistograms cell_histograms(const PixelGrid& mag, const PixelGrid& theta,
                               const HogParams& params);

// Sliding block_size x block_size blocks at block_stride; each block's
// concatenated histogram v is normalized (L1: v/(|v|1+e),
// L2: v/sqrt(|v|2^2+e^2)) and all blocks are concatenated row-major.
HogVector normalize_blocks(const CellHistograms& cells, const HogParams& params);

// The full descriptor: gradients -> magnitude/orientation -> cell votes ->
// block normalization.
HogVector hog(const PixelGrid& grid, const HogParams& params);

// Descriptor layout for a width x height grid, from geometry alone.
HogLayout hog_layout(int width, int height, const HogParams& params);

} // namespace dbcr
