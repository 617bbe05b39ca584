#include <doctest.h>

#include <random>

#include "dbcr/texture_codes.hpp"
#include "test_helpers.hpp"

using namespace dbcr;

namespace {

// ---- brute-force reference -------------------------------------------------
// Literal per-pixel evaluation of the code definitions, no shared threshold
// plane and no packing tricks. The production kernels must match this
// exactly on every pixel.

double clamped(const PixelGrid& g, int i, int j) {
    i = std::clamp(i, 0, g.height() - 1);
    j = std::clamp(j, 0, g.width() - 1);
    return g.at(i, j);
}

double brute_derivative(const PixelGrid& g, DbcDirection dir, int d, int i, int j) {
    switch (dir) {
        case DbcDirection::deg0: return clamped(g, i, j) - clamped(g, i, j - d);
        case DbcDirection::deg45: return clamped(g, i, j) - clamped(g, i - d, j + d);
        case DbcDirection::deg90: return clamped(g, i, j) - clamped(g, i - d, j);
        case DbcDirection::deg135: return clamped(g, i, j) - clamped(g, i - d, j - d);
    }
    return 0.0;
}

int brute_dbc_code(const PixelGrid& g, DbcDirection dir, int d, int i, int j) {
    const int pos[9][2] = {{i, j},         {i, j - d},     {i - d, j - d},
                           {i - d, j},     {i - d, j + d}, {i, j + d},
                           {i + d, j + d}, {i + d, j},     {i + d, j - d}};
    int code = 0;
    for (const auto& p : pos) {
        const int bit = brute_derivative(g, dir, d, p[0], p[1]) >= 0.0 ? 1 : 0;
        code = code * 2 + bit;
    }
    return code;
}

int brute_lbp_code(const PixelGrid& g, int i, int j) {
    // P=8, R=1, p=0 east then counter-clockwise.
    const int off[8][2] = {{0, 1},  {-1, 1}, {-1, 0}, {-1, -1},
                           {0, -1}, {1, -1}, {1, 0},  {1, 1}};
    const double center = g.at(i, j);
    int code = 0;
    for (int p = 0; p < 8; ++p) {
        const double gp = clamped(g, i + off[p][0], j + off[p][1]);
        if (gp - center >= 0.0) code += 1 << p;
    }
    return code;
}

} // namespace

TEST_CASE("directional_derivative: stated examples") {
    const PixelGrid c(4, 4, 9.0);
    for (DbcDirection dir : kAllDirections)
        CHECK(directional_derivative(c, dir, 1, 2, 2) == 0.0);

    PixelGrid row(2, 1);
    row.at(0, 0) = 3;
    row.at(0, 1) = 7;
    CHECK(directional_derivative(row, DbcDirection::deg0, 1, 0, 1) == 4.0);

    PixelGrid ramp(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ramp.at(i, j) = j;
    CHECK(directional_derivative(ramp, DbcDirection::deg90, 1, 1, 1) == 0.0);
    CHECK(directional_derivative(ramp, DbcDirection::deg0, 1, 1, 1) == 1.0);
}

TEST_CASE("dbc_threshold: zero belongs to the positive branch") {
    CHECK(dbc_threshold(5.0) == 1);
    CHECK(dbc_threshold(-3.0) == 0);
    CHECK(dbc_threshold(0.0) == 1);
}

TEST_CASE("dbc_code_map: constant grid gives all-511 codes") {
    const PixelGrid c(6, 5, 77.0);
    for (DbcDirection dir : kAllDirections) {
        const CodeMap map = dbc_code_map(c, dir, {});
        CHECK(map.width == 6);
        CHECK(map.height == 5);
        CHECK(map.code_bits == 9);
        for (auto code : map.codes) CHECK(code == 511);
    }
}

TEST_CASE("dbc_code_map: horizontal ramp saturates the 0-degree code") {
    PixelGrid ramp(7, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) ramp.at(i, j) = j;
    const CodeMap map = dbc_code_map(ramp, DbcDirection::deg0, {});
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 6; ++j) CHECK(map.at(i, j) == 511);
}

TEST_CASE("dbc_code_map matches the brute-force evaluator") {
    std::mt19937 rng(21);
    for (int round = 0; round < 20; ++round) {
        const PixelGrid g = test::random_grid(8, 8, rng);
        for (DbcDirection dir : kAllDirections) {
            for (int d : {1, 2}) {
                DbcParams params;
                params.distance = d;
                const CodeMap map = dbc_code_map(g, dir, params);
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j)
                        REQUIRE(map.at(i, j) == brute_dbc_code(g, dir, d, i, j));
            }
        }
    }
}

TEST_CASE("lbp_code_map: constant and dominated-center cases") {
    const PixelGrid c(5, 4, 10.0);
    const CodeMap constant = lbp_code_map(c, {});
    CHECK(constant.code_bits == 8);
    for (auto code : constant.codes) CHECK(code == 255);

    PixelGrid peak(3, 3, 4.0);
    peak.at(1, 1) = 5.0;
    CHECK(lbp_code_map(peak, {}).at(1, 1) == 0);
}

TEST_CASE("lbp_code_map matches the brute-force evaluator") {
    std::mt19937 rng(22);
    for (int round = 0; round < 20; ++round) {
        const PixelGrid g = test::random_grid(8, 8, rng);
        const CodeMap map = lbp_code_map(g, {});
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                REQUIRE(map.at(i, j) == brute_lbp_code(g, i, j));
    }
}

TEST_CASE("lbp_code_map: circular sampling agrees with the 3x3 path on axes") {
    // P=4 R=1 reads the four axis neighbours; compare with direct reads.
    std::mt19937 rng(23);
    const PixelGrid g = test::random_grid(6, 6, rng);
    LbpParams p4;
    p4.neighbors = 4;
    const CodeMap map = lbp_code_map(g, p4);
    for (int i = 1; i < 5; ++i)
        for (int j = 1; j < 5; ++j) {
            int expect = 0;
            if (g.at(i, j + 1) >= g.at(i, j)) expect |= 1;
            if (g.at(i - 1, j) >= g.at(i, j)) expect |= 2;
            if (g.at(i, j - 1) >= g.at(i, j)) expect |= 4;
            if (g.at(i + 1, j) >= g.at(i, j)) expect |= 8;
            CHECK(map.at(i, j) == expect);
        }
}

TEST_CASE("code maps are shift-covariant away from borders") {
    std::mt19937 rng(24);
    const PixelGrid big = test::random_grid(16, 16, rng);

    auto crop = [&](int i0, int j0, int w, int h) {
        PixelGrid out(w, h);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) out.at(i, j) = big.at(i0 + i, j0 + j);
        return out;
    };

    const PixelGrid a = crop(2, 2, 10, 10);
    const PixelGrid b = crop(3, 4, 10, 10); // (di,dj) = (1,2)

    for (DbcDirection dir : kAllDirections) {
        const CodeMap ma = dbc_code_map(a, dir, {});
        const CodeMap mb = dbc_code_map(b, dir, {});
        const int margin = 2; // code reach is 2d
        for (int i = margin; i < 10 - margin - 1; ++i)
            for (int j = margin; j < 10 - margin - 2; ++j)
                CHECK(ma.at(i + 1, j + 2) == mb.at(i, j));
    }

    const CodeMap la = lbp_code_map(a, {});
    const CodeMap lb = lbp_code_map(b, {});
    for (int i = 1; i < 8; ++i)
        for (int j = 1; j < 7; ++j) CHECK(la.at(i + 1, j + 2) == lb.at(i, j));
}

TEST_CASE("adding a constant changes neither DBC nor LBP codes") {
    std::mt19937 rng(25);
    const PixelGrid g = test::random_grid(9, 9, rng, 0, 200);
    const PixelGrid h = test::shifted(g, 31.0);

    for (DbcDirection dir : kAllDirections)
        CHECK(dbc_code_map(g, dir, {}).codes == dbc_code_map(h, dir, {}).codes);
    CHECK(lbp_code_map(g, {}).codes == lbp_code_map(h, {}).codes);
}

TEST_CASE("code bounds: DBC < 512, LBP(P=8) < 256") {
    std::mt19937 rng(26);
    const PixelGrid g = test::random_grid(12, 10, rng);
    for (DbcDirection dir : kAllDirections)
        for (auto code : dbc_code_map(g, dir, {}).codes) CHECK(code < 512);
    for (auto code : lbp_code_map(g, {}).codes) CHECK(code < 256);
}

TEST_CASE("fuse_directions: means and bounds") {
    std::mt19937 rng(27);
    const PixelGrid g = test::random_grid(8, 8, rng);
    std::vector<CodeMap> maps;
    for (DbcDirection dir : kAllDirections)
        maps.push_back(dbc_code_map(g, dir, {}));

    const PixelGrid fused = fuse_directions(maps);
    for (std::size_t i = 0; i < fused.size(); ++i) {
        double lo = 511, hi = 0, sum = 0;
        for (const CodeMap& m : maps) {
            lo = std::min(lo, static_cast<double>(m.codes[i]));
            hi = std::max(hi, static_cast<double>(m.codes[i]));
            sum += m.codes[i];
        }
        CHECK(fused.samples()[i] == doctest::Approx(sum / 4.0));
        CHECK(fused.samples()[i] >= lo);
        CHECK(fused.samples()[i] <= hi);
    }

    const PixelGrid c(3, 3, 0.0);
    std::vector<CodeMap> constant;
    for (DbcDirection dir : kAllDirections)
        constant.push_back(dbc_code_map(c, dir, {}));
    for (double v : fuse_directions(constant).samples()) CHECK(v == 511.0);
}

TEST_CASE("fuse_directions rejects bad input") {
    std::mt19937 rng(28);
    const PixelGrid g = test::random_grid(6, 6, rng);
    const PixelGrid small = test::random_grid(5, 6, rng);

    std::vector<CodeMap> mismatched{dbc_code_map(g, DbcDirection::deg0, {}),
                                    dbc_code_map(small, DbcDirection::deg45, {})};
    CHECK_THROWS_AS(fuse_directions(mismatched), FusionError);

    std::vector<CodeMap> duplicate{dbc_code_map(g, DbcDirection::deg0, {}),
                                   dbc_code_map(g, DbcDirection::deg0, {})};
    CHECK_THROWS_AS(fuse_directions(duplicate), FusionError);

    std::vector<CodeMap> untagged{lbp_code_map(g, {})};
    CHECK_THROWS_AS(fuse_directions(untagged), FusionError);

    CHECK_THROWS_AS(fuse_directions(std::span<const CodeMap>{}), FusionError);
}

TEST_CASE("fuse_channels: mean per pixel, grayscale degenerates to one map") {
    const PixelGrid a(2, 2, 30.0), b(2, 2, 60.0), c(2, 2, 90.0);
    for (double v : fuse_channels(a, b, c).samples()) CHECK(v == 60.0);

    std::mt19937 rng(29);
    const PixelGrid m = test::random_grid(7, 7, rng);
    CHECK(fuse_channels(m, m, m).samples() == m.samples());

    CHECK_THROWS_AS(fuse_channels(a, b, PixelGrid(3, 2, 0.0)), FusionError);
}

TEST_CASE("code_map_debug_grid scales DBC codes into [0,255]") {
    std::mt19937 rng(30);
    const PixelGrid g = test::random_grid(8, 8, rng);
    const CodeMap map = dbc_code_map(g, DbcDirection::deg90, {});
    const PixelGrid dbg = code_map_debug_grid(map);
    for (std::size_t i = 0; i < dbg.size(); ++i) {
        CHECK(dbg.samples()[i] == std::floor(map.codes[i] / 2.0));
        CHECK(dbg.samples()[i] <= 255.0);
    }
}

TEST_CASE("parameter validation") {
    const PixelGrid g(4, 4, 0.0);
    DbcParams bad_d;
    bad_d.distance = 0;
    CHECK_THROWS_AS(dbc_code_map(g, DbcDirection::deg0, bad_d), DimensionError);
    DbcParams no_dirs;
    no_dirs.directions.clear();
    CHECK_THROWS_AS(dbc_code_map(g, DbcDirection::deg0, no_dirs), DimensionError);

    LbpParams bad_p;
    bad_p.neighbors = 3;
    CHECK_THROWS_AS(lbp_code_map(g, bad_p), DimensionError);
    LbpParams bad_r;
    bad_r.radius = 0.5;
    CHECK_THROWS_AS(lbp_code_map(g, bad_r), DimensionError);
}
