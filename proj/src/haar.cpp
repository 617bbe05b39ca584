#include "dbcr/haar.hpp"

#include "dbcr/image_ops.hpp"

namespace dbcr {

SubBands haar_decompose(const PixelGrid& grid) {
    if (grid.empty()) throw DimensionError("haar: empty grid");

    const PixelGrid* src = &grid;
    PixelGrid padded;
    if (grid.width() % 2 != 0 || grid.height() % 2 != 0) {
        // Replicate-pad odd dimensions to even on the right/bottom edge.
        padded = PixelGrid(grid.width() + grid.width() % 2,
                           grid.height() + grid.height() % 2);
        for (int i = 0; i < padded.height(); ++i)
            for (int j = 0; j < padded.width(); ++j)
                padded.at(i, j) = grid.at_clamped(i, j);
        src = &padded;
    }

    const int bw = src->width() / 2, bh = src->height() / 2;
    SubBands bands{PixelGrid(bw, bh), PixelGrid(bw, bh), PixelGrid(bw, bh),
                   PixelGrid(bw, bh), grid.width(), grid.height()};

    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            const double a = src->at(2 * by, 2 * bx);
            const double b = src->at(2 * by, 2 * bx + 1);
            const double c = src->at(2 * by + 1, 2 * bx);
            const double d = src->at(2 * by + 1, 2 * bx + 1);
            bands.ll.at(by, bx) = (a + b + c + d) / 4.0;
            bands.lh.at(by, bx) = (a - b + c - d) / 4.0;
            bands.hl.at(by, bx) = (a + b - c - d) / 4.0;
            bands.hh.at(by, bx) = (a - b - c + d) / 4.0;
        }
    }
    return bands;
}

PixelGrid haar_reconstruct(const SubBands& bands) {
    const PixelGrid& ll = bands.ll;
    if (!ll.same_size(bands.lh) || !ll.same_size(bands.hl) || !ll.same_size(bands.hh))
        throw DimensionError("haar: band dimensions differ");
    if (bands.source_width < 1 || bands.source_height < 1)
        throw DimensionError("haar: invalid source dimensions");
    if ((bands.source_width + 1) / 2 != ll.width() ||
        (bands.source_height + 1) / 2 != ll.height())
        throw DimensionError("haar: bands do not match source dimensions");

    PixelGrid even(ll.width() * 2, ll.height() * 2);
    for (int by = 0; by < ll.height(); ++by) {
        for (int bx = 0; bx < ll.width(); ++bx) {
            const double s = ll.at(by, bx);
            const double h = bands.lh.at(by, bx);
            const double v = bands.hl.at(by, bx);
            const double d = bands.hh.at(by, bx);
            even.at(2 * by, 2 * bx) = s + h + v + d;
            even.at(2 * by, 2 * bx + 1) = s - h + v - d;
            even.at(2 * by + 1, 2 * bx) = s + h - v - d;
            even.at(2 * by + 1, 2 * bx + 1) = s - h - v + d;
        }
    }
    if (even.width() == bands.source_width && even.height() == bands.source_height)
        return even;

    PixelGrid out(bands.source_width, bands.source_height);
    for (int i = 0; i < out.height(); ++i)
        for (int j = 0; j < out.width(); ++j)
            out.at(i, j) = even.at(i, j);
    return out;
}

} // namespace dbcr
