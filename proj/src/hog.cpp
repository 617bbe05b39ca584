#include "dbcr/hog.hpp"

#include <cmath>

namespace dbcr {

void validate(const HogParams& p) {
    if (p.cell_size < 2) throw DimensionError("hog: cell_size must be >= 2");
    if (p.block_size < 1) throw DimensionError("hog: block_size must be >= 1");
    if (p.block_stride < 1 || p.block_stride > p.block_size)
        throw DimensionError("hog: block_stride must be in [1, block_size]");
    if (p.bin_count < 2) throw DimensionError("hog: bin_count must be >= 2");
    if (!(p.epsilon > 0.0)) throw DimensionError("hog: epsilon must be > 0");
}

std::pair<PixelGrid, PixelGrid> gradients(const PixelGrid& grid) {
    if (grid.width() < 3 || grid.height() < 3)
        throw DimensionError("hog: gradients need a grid of at least 3x3");

    PixelGrid gx(grid.width(), grid.height());
    PixelGrid gy(grid.width(), grid.height());
    for (int i = 0; i < grid.height(); ++i) {
        for (int j = 0; j < grid.width(); ++j) {
            gx.at(i, j) = grid.at_clamped(i, j + 1) - grid.at_clamped(i, j - 1);
            gy.at(i, j) = grid.at_clamped(i + 1, j) - grid.at_clamped(i - 1, j);
        }
    }
    return {std::move(gx), std::move(gy)};
}

std::pair<PixelGrid, PixelGrid> magnitude_orientation(const PixelGrid& gx,
                                                      const PixelGrid& gy,
                                                      bool signed_orientation) {
    if (!gx.same_size(gy))
        throw DimensionError("hog: gradient grids differ in size");

    PixelGrid mag(gx.width(), gx.height());
    PixelGrid theta(gx.width(), gx.height());
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double x = gx.samples()[i], y = gy.samples()[i];
        mag.samples()[i] = std::sqrt(x * x + y * y);
        if (x == 0.0 && y == 0.0) {
            theta.samples()[i] = 0.0; // degenerate, carries zero vote weight
            continue;
        }
        double deg = std::atan2(y, x) * 180.0 / M_PI;
        deg = std::fmod(deg + 360.0, 360.0);
        if (!signed_orientation && deg >= 180.0) deg -= 180.0;
        theta.samples()[i] = deg;
    }
    return {std::move(mag), std::move(theta)};
}

CellHistograms cell_histograms(const PixelGrid& mag, const PixelGrid& theta,
                               const HogParams& params) {
    validate(params);
    if (!mag.same_size(theta))
        throw DimensionError("hog: magnitude/orientation grids differ in size");
    if (mag.width() < params.cell_size || mag.height() < params.cell_size)
        throw DimensionError("hog: grid smaller than one cell");

    CellHistograms out;
    out.cells_x = mag.width() / params.cell_size;
    out.cells_y = mag.height() / params.cell_size;
    out.bin_count = params.bin_count;
    out.bins.assign(static_cast<std::size_t>(out.cells_x) * out.cells_y *
                        out.bin_count, 0.0);

    const double range = params.signed_orientation ? 360.0 : 180.0;
    const double bin_width = range / params.bin_count;
    const int covered_w = out.cells_x * params.cell_size;
    const int covered_h = out.cells_y * params.cell_size;

    for (int i = 0; i < covered_h; ++i) {
        const int cy = i / params.cell_size;
        for (int j = 0; j < covered_w; ++j) {
            const int cx = j / params.cell_size;
            const double m = mag.at(i, j);
            if (m == 0.0) continue;

            // Linear split between the two nearest bin centers, circular
            // over the orientation range.
            const double t = theta.at(i, j) / bin_width - 0.5;
            const int lo = static_cast<int>(std::floor(t));
            const double frac = t - lo;
            const int b0 = ((lo % params.bin_count) + params.bin_count) % params.bin_count;
            const int b1 = (b0 + 1) % params.bin_count;

            double* cell = out.bins.data() +
                (static_cast<std::size_t>(cy) * out.cells_x + cx) * out.bin_count;
            cell[b0] += m * (1.0 - frac);
            cell[b1] += m * frac;
        }
    }
    return out;
}

HogVector normalize_blocks(const CellHistograms& cells, const HogParams& params) {
    validate(params);
    if (cells.cells_x < params.block_size || cells.cells_y < params.block_size)
        throw DimensionError("hog: no full block fits");

    HogLayout layout;
    layout.blocks_x = (cells.cells_x - params.block_size) / params.block_stride + 1;
    layout.blocks_y = (cells.cells_y - params.block_size) / params.block_stride + 1;
    layout.cells_per_block = params.block_size * params.block_size;
    layout.bin_count = cells.bin_count;

    HogVector out;
    out.layout = layout;
    out.values.reserve(layout.length());

    const std::size_t block_len =
        static_cast<std::size_t>(layout.cells_per_block) * layout.bin_count;
    std::vector<double> v(block_len);

    for (int by = 0; by < layout.blocks_y; ++by) {
        for (int bx = 0; bx < layout.blocks_x; ++bx) {
            std::size_t k = 0;
            for (int cy = 0; cy < params.block_size; ++cy)
                for (int cx = 0; cx < params.block_size; ++cx) {
                    const double* cell = cells.cell(by * params.block_stride + cy,
                                                    bx * params.block_stride + cx);
                    for (int b = 0; b < cells.bin_count; ++b) v[k++] = cell[b];
                }

            double denom;
            if (params.norm == BlockNorm::l1) {
                double sum = 0.0;
                for (double x : v) sum += std::abs(x);
                denom = sum + params.epsilon;
            } else {
                double sq = 0.0;
                for (double x : v) sq += x * x;
                denom = std::sqrt(sq + params.epsilon * params.epsilon);
            }
            for (double x : v) out.values.push_back(x / denom);
        }
    }
    return out;
}

HogVector hog(const PixelGrid& grid, const HogParams& params) {
    auto [gx, gy] = gradients(grid);
    auto [mag, theta] = magnitude_orientation(gx, gy, params.signed_orientation);
    return normalize_blocks(cell_histograms(mag, theta, params), params);
}

HogLayout hog_layout(int width, int height, const HogParams& params) {
    validate(params);
    if (width < 3 || height < 3)
        throw DimensionError("hog: gradients need a grid of at least 3x3");
    const int cells_x = width / params.cell_size;
    const int cells_y = height / params.cell_size;
    if (cells_x < params.block_size || cells_y < params.block_size)
        throw DimensionError("hog: no full block fits");

    HogLayout layout;
    layout.blocks_x = (cells_x - params.block_size) / params.block_stride + 1;
    layout.blocks_y = (cells_y - params.block_size) / params.block_stride + 1;
    layout.cells_per_block = params.block_size * params.block_size;
    layout.bin_count = params.bin_count;
    return layout;
}

} // namespace dbcr
