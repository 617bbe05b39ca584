// Single-level 2D Haar decomposition into four quarter-resolution sub-bands,
// averaging convention (ll stays in the source value range).
#pragma once

#include "dbcr/pixel_grid.hpp"

namespace dbcr {

// The four sub-bands of one decomposition level. All bands share dimensions
// ceil(source/2); odd sources are replicate-padded to even before the
// transform and the original dimensions are kept for reconstruction.
struct SubBands {
    PixelGrid ll, lh, hl, hh;
    int source_width = 0;
    int source_height = 0;
};

// Per 2x2 block [[a,b],[c,d]]:
//   ll = (a+b+c+d)/4   lh = (a-b+c-d)/4
//   hl = (a+b-c-d)/4   hh = (a-b-c+d)/4
SubBands haar_decompose(const PixelGrid& grid);

// Exact inverse of haar_decompose; padding rows/columns are trimmed back to
// the source dimensions.
PixelGrid haar_reconstruct(const SubBands& bands);

} // namespace dbcr
