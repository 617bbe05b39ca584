// DBC and LBP pixel kernels. The DBC map precomputes one thresholded
// derivative plane over a d-extended domain and gathers nine bits per pixel
// from it, so each derivative is evaluated once instead of up to nine times.

#include "dbcr/texture_codes.hpp"

#include <cmath>

namespace dbcr {

namespace {

struct Offset {
    int di, dj;
};

// Subtracted-neighbour offset per direction, scaled by d at the call site.
Offset neighbor_offset(DbcDirection dir) {
    switch (dir) {
        case DbcDirection::deg0: return {0, -1};
        case DbcDirection::deg45: return {-1, 1};
        case DbcDirection::deg90: return {-1, 0};
        case DbcDirection::deg135: return {-1, -1};
    }
    throw Error("unknown direction");
}

void validate(const DbcParams& params) {
    if (params.distance < 1)
        throw DimensionError("dbc: distance must be >= 1");
    if (params.directions.empty())
        throw DimensionError("dbc: direction set must be non-empty");
}

void validate(const LbpParams& params) {
    if (params.neighbors < 4 || params.neighbors > 16)
        throw DimensionError("lbp: neighbor count must be in [4, 16]");
    if (params.radius < 1.0)
        throw DimensionError("lbp: radius must be >= 1");
}

// Bilinear sample with replicate-clamped corners; coordinates within 1e-8
// of an integer snap to it so exact ring positions read exact pixels.
double sample_circle(const PixelGrid& g, double y, double x) {
    const double ry = std::round(y), rx = std::round(x);
    if (std::abs(y - ry) < 1e-8) y = ry;
    if (std::abs(x - rx) < 1e-8) x = rx;

    const int i0 = static_cast<int>(std::floor(y));
    const int j0 = static_cast<int>(std::floor(x));
    const double fy = y - i0, fx = x - j0;

    const double v00 = g.at_clamped(i0, j0);
    const double v01 = g.at_clamped(i0, j0 + 1);
    const double v10 = g.at_clamped(i0 + 1, j0);
    const double v11 = g.at_clamped(i0 + 1, j0 + 1);
    const double top = v00 + fx * (v01 - v00);
    const double bottom = v10 + fx * (v11 - v10);
    return top + fy * (bottom - top);
}

} // namespace

int direction_degrees(DbcDirection dir) {
    switch (dir) {
        case DbcDirection::deg0: return 0;
        case DbcDirection::deg45: return 45;
        case DbcDirection::deg90: return 90;
        case DbcDirection::deg135: return 135;
    }
    throw Error("unknown direction");
}

double directional_derivative(const PixelGrid& grid, DbcDirection dir, int d,
                              int i, int j) {
    const Offset o = neighbor_offset(dir);
    return grid.at_clamped(i, j) - grid.at_clamped(i + o.di * d, j + o.dj * d);
}

CodeMap dbc_code_map(const PixelGrid& grid, DbcDirection dir,
                     const DbcParams& params) {
    validate(params);
    if (grid.empty()) throw DimensionError("dbc: empty grid");

    const int d = params.distance;
    const int w = grid.width(), h = grid.height();

    // Thresholded derivative plane covering every position a border pixel's
    // code can reference: d beyond the grid on each side.
    const int ew = w + 2 * d, eh = h + 2 * d;
    std::vector<std::uint8_t> bit(static_cast<std::size_t>(ew) * eh);
    for (int ei = 0; ei < eh; ++ei)
        for (int ej = 0; ej < ew; ++ej)
            bit[static_cast<std::size_t>(ei) * ew + ej] = static_cast<std::uint8_t>(
                dbc_threshold(directional_derivative(grid, dir, d, ei - d, ej - d)));

    // Code positions in paper order: center, then its ring starting west and
    // wrapping clockwise. Packed most-significant-bit-first.
    const Offset ring[9] = {{0, 0},  {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
                            {0, 1},  {1, 1},  {1, 0},   {1, -1}};

    CodeMap map;
    map.width = w;
    map.height = h;
    map.code_bits = 9;
    map.direction = dir;
    map.codes.resize(grid.size());
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            std::uint16_t code = 0;
            for (const Offset& o : ring) {
                const int ei = i + o.di * d + d;
                const int ej = j + o.dj * d + d;
                code = static_cast<std::uint16_t>(
                    (code << 1) | bit[static_cast<std::size_t>(ei) * ew + ej]);
            }
            map.codes[static_cast<std::size_t>(i) * w + j] = code;
        }
    }
    return map;
}

CodeMap lbp_code_map(const PixelGrid& grid, const LbpParams& params) {
    validate(params);
    if (grid.empty()) throw DimensionError("lbp: empty grid");

    const int w = grid.width(), h = grid.height();
    const int P = params.neighbors;
    const double R = params.radius;
    const bool literal33 = (P == 8 && R == 1.0);

    // Ring offsets, p = 0 east, counter-clockwise.
    static const Offset ring8[8] = {{0, 1},  {-1, 1}, {-1, 0}, {-1, -1},
                                    {0, -1}, {1, -1}, {1, 0},  {1, 1}};

    CodeMap map;
    map.width = w;
    map.height = h;
    map.code_bits = P;
    map.codes.resize(grid.size());

    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const double center = grid.at(i, j);
            std::uint16_t code = 0;
            for (int p = 0; p < P; ++p) {
                double neighbor;
                if (literal33) {
                    neighbor = grid.at_clamped(i + ring8[p].di, j + ring8[p].dj);
                } else {
                    const double angle = 2.0 * M_PI * p / P;
                    neighbor = sample_circle(grid, i - R * std::sin(angle),
                                             j + R * std::cos(angle));
                }
                if (neighbor - center >= 0.0)
                    code = static_cast<std::uint16_t>(code | (1u << p));
            }
            map.codes[static_cast<std::size_t>(i) * w + j] = code;
        }
    }
    return map;
}

PixelGrid fuse_directions(std::span<const CodeMap> maps) {
    if (maps.empty()) throw FusionError("fuse: no direction maps");
    for (const CodeMap& m : maps) {
        if (!m.direction)
            throw FusionError("fuse: map without a direction tag");
        if (m.width != maps[0].width || m.height != maps[0].height)
            throw FusionError("fuse: direction map dimensions differ");
    }
    for (std::size_t a = 0; a < maps.size(); ++a)
        for (std::size_t b = a + 1; b < maps.size(); ++b)
            if (maps[a].direction == maps[b].direction)
                throw FusionError("fuse: duplicate direction maps");

    PixelGrid out(maps[0].width, maps[0].height);
    const double inv = 1.0 / static_cast<double>(maps.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double sum = 0.0;
        for (const CodeMap& m : maps) sum += m.codes[i];
        out.samples()[i] = sum * inv;
    }
    return out;
}

PixelGrid fuse_channels(const PixelGrid& r_map, const PixelGrid& g_map,
                        const PixelGrid& b_map) {
    if (!r_map.same_size(g_map) || !r_map.same_size(b_map))
        throw FusionError("fuse: channel map dimensions differ");
    PixelGrid out(r_map.width(), r_map.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.samples()[i] = (r_map.samples()[i] + g_map.samples()[i] +
                            b_map.samples()[i]) / 3.0;
    return out;
}

PixelGrid code_map_debug_grid(const CodeMap& map) {
    PixelGrid out(map.width, map.height);
    const int shift = map.code_bits > 8 ? map.code_bits - 8 : 0;
    for (std::size_t i = 0; i < map.codes.size(); ++i)
        out.samples()[i] = static_cast<double>(map.codes[i] >> shift);
    return out;
}

} // namespace dbcr
