// Directional Binary Code and Local Binary Pattern texture operators, plus
// the fusion steps that roll per-direction/per-channel code maps into one
// colour texture map.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dbcr/pixel_grid.hpp"

namespace dbcr {

enum class DbcDirection : std::uint8_t { deg0, deg45, deg90, deg135 };

constexpr DbcDirection kAllDirections[] = {
    DbcDirection::deg0, DbcDirection::deg45,
    DbcDirection::deg90, DbcDirection::deg135};

int direction_degrees(DbcDirection dir);

struct DbcParams {
    int distance = 1;                            // pixel offset d
    std::vector<DbcDirection> directions = {     // defaults to all four
        DbcDirection::deg0, DbcDirection::deg45,
        DbcDirection::deg90, DbcDirection::deg135};
};

struct LbpParams {
    int neighbors = 8;   // P
    double radius = 1.0; // R
};

// Per-pixel integer codes for one texture operator. `direction` is set for
// DBC maps and empty for LBP maps. Codes never reach 2^code_bits.
struct CodeMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> codes; // row-major
    int code_bits = 0;                // 9 for DBC, P for LBP
    std::optional<DbcDirection> direction;

    std::uint16_t at(int i, int j) const {
        return codes[static_cast<std::size_t>(i) * width + j];
    }
};

// First-order derivative along `dir` at offset d: I(x_ij) minus the
// direction's neighbour. Out-of-grid coordinates read replicate-padded
// samples, so the call is total.
double directional_derivative(const PixelGrid& grid, DbcDirection dir, int d,
                              int i, int j);

// 1 for x >= 0, else 0.
inline int dbc_threshold(double x) { return x >= 0.0 ? 1 : 0; }

// Nine thresholded derivatives around each pixel (center first, then its
// eight d-neighbours), packed most-significant-bit-first into a 0..511 code.
// Output dimensions equal the source; borders are handled by replication.
CodeMap dbc_code_map(const PixelGrid& grid, DbcDirection dir, const DbcParams& params);

// Classic LBP code map. P=8, R=1 uses the literal 3x3 neighbourhood;
// other parameters sample the circle bilinearly. Neighbour p=0 sits east
// of the center and the ring proceeds counter-clockwise.
CodeMap lbp_code_map(const PixelGrid& grid, const LbpParams& params);

// Per-pixel mean of the direction maps of one channel, as a real grid.
PixelGrid fuse_directions(std::span<const CodeMap> maps);

// Per-pixel mean of the three channel texture maps: the colour texture map.
PixelGrid fuse_channels(const PixelGrid& r_map, const PixelGrid& g_map,
                        const PixelGrid& b_map);

// Rescales a code map into [0, 255] for PGM dumps (floor(code/2) for DBC).
// Debug aid only; the pipeline never consumes this.
PixelGrid code_map_debug_grid(const CodeMap& map);

} // namespace dbcr
