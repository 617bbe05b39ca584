#include <doctest.h>

#include <random>
#include <set>

#include "dbcr/image_io.hpp"
#include "dbcr/image_ops.hpp"
#include "test_helpers.hpp"

using namespace dbcr;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

} // namespace

TEST_CASE("decode_image: 2x1 binary PPM") {
    std::vector<std::uint8_t> ppm = bytes_of("P6\n2 1\n255\n");
    const std::uint8_t pixels[] = {255, 0, 0, 0, 0, 255};
    ppm.insert(ppm.end(), pixels, pixels + 6);

    const RgbPixelGrid img = decode_image(ppm);
    CHECK(img.width() == 2);
    CHECK(img.height() == 1);
    CHECK(img.r.samples() == std::vector<double>{255, 0});
    CHECK(img.g.samples() == std::vector<double>{0, 0});
    CHECK(img.b.samples() == std::vector<double>{0, 255});
}

TEST_CASE("decode_image: 1x1 PGM replicates gray into all channels") {
    std::vector<std::uint8_t> pgm = bytes_of("P5\n1 1\n255\n");
    pgm.push_back(7);
    const RgbPixelGrid img = decode_image(pgm);
    CHECK(img.r.samples() == std::vector<double>{7});
    CHECK(img.g.samples() == std::vector<double>{7});
    CHECK(img.b.samples() == std::vector<double>{7});
}

TEST_CASE("decode_image: truncated payload reports the byte position") {
    std::vector<std::uint8_t> ppm = bytes_of("P6\n4 4\n255\n");
    ppm.insert(ppm.end(), 9, 128); // 3 of 16 pixels
    CHECK_THROWS_WITH_AS(decode_image(ppm),
                         doctest::Contains("truncated"), DecodeError);
}

TEST_CASE("decode_image: header and format errors") {
    CHECK_THROWS_AS(decode_image(bytes_of("P6\n-3 4\n255\n")), DecodeError);
    CHECK_THROWS_AS(decode_image(bytes_of("P6\n2 1\n70000\n")), DecodeError);
    CHECK_THROWS_AS(decode_image(bytes_of("P2\n1 1\n255\n7")), DecodeError);
    CHECK_THROWS_AS(decode_image(bytes_of("GIF89a")), DecodeError);
    CHECK_THROWS_AS(decode_image({}), DecodeError);
}

TEST_CASE("decode_image: comments and odd whitespace in header") {
    std::vector<std::uint8_t> pgm =
        bytes_of("P5 # magic\n# size next\n 2\t2 # wide\n255\n");
    const std::uint8_t pixels[] = {1, 2, 3, 4};
    pgm.insert(pgm.end(), pixels, pixels + 4);
    const RgbPixelGrid img = decode_image(pgm);
    CHECK(img.r.samples() == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("ppm/pgm round-trip is bit-exact for integer samples") {
    std::mt19937 rng(11);
    const RgbPixelGrid color = test::random_rgb(13, 7, rng);
    const auto color_bytes = encode_ppm(color);
    const RgbPixelGrid color2 = decode_image(color_bytes);
    CHECK(color2.r.samples() == color.r.samples());
    CHECK(color2.g.samples() == color.g.samples());
    CHECK(color2.b.samples() == color.b.samples());
    CHECK(encode_ppm(color2) == color_bytes);

    const PixelGrid gray = test::random_grid(9, 14, rng);
    const auto gray_bytes = encode_pgm(gray);
    const RgbPixelGrid gray2 = decode_image(gray_bytes);
    CHECK(gray2.r.samples() == gray.samples());
    CHECK(encode_pgm(gray2.r) == gray_bytes);
}

TEST_CASE("to_grayscale: BT.601 weights") {
    const PixelGrid c100(1, 1, 100.0);
    CHECK(to_grayscale({c100, c100, c100}).at(0, 0) == doctest::Approx(100.0));

    RgbPixelGrid red{PixelGrid(1, 1, 255.0), PixelGrid(1, 1, 0.0),
                     PixelGrid(1, 1, 0.0)};
    CHECK(to_grayscale(red).at(0, 0) == doctest::Approx(76.245));

    RgbPixelGrid cyan{PixelGrid(1, 1, 0.0), PixelGrid(1, 1, 255.0),
                      PixelGrid(1, 1, 255.0)};
    // 0.587*255 + 0.114*255, evaluated by hand
    CHECK(to_grayscale(cyan).at(0, 0) == doctest::Approx(178.755));
}

TEST_CASE("to_grayscale stays within the channel range per pixel") {
    std::mt19937 rng(12);
    const RgbPixelGrid img = test::random_rgb(17, 9, rng);
    const PixelGrid gray = to_grayscale(img);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double lo = std::min({img.r.samples()[i], img.g.samples()[i],
                                    img.b.samples()[i]});
        const double hi = std::max({img.r.samples()[i], img.g.samples()[i],
                                    img.b.samples()[i]});
        CHECK(gray.samples()[i] >= lo - 1e-9);
        CHECK(gray.samples()[i] <= hi + 1e-9);
    }
}

TEST_CASE("resize: constants stay constant, identity is bitwise") {
    const PixelGrid c(5, 3, 42.0);
    for (auto [w, h] : {std::pair{2, 9}, {7, 7}, {1, 1}, {16, 2}}) {
        const PixelGrid r = resize(c, w, h);
        for (double v : r.samples()) CHECK(v == 42.0);
    }

    std::mt19937 rng(13);
    const PixelGrid g = test::random_grid(8, 6, rng);
    CHECK(resize(g, 8, 6).samples() == g.samples());
}

TEST_CASE("resize: hand-evaluated bilinear column pattern") {
    // [[0,0],[100,100]] stretched from 2x2 to 2 wide x 4 tall. Source rows
    // at y in {-0.25, 0.25, 0.75, 1.25} with clamped bilinear weights.
    PixelGrid g(2, 2);
    g.at(0, 0) = 0;
    g.at(0, 1) = 0;
    g.at(1, 0) = 100;
    g.at(1, 1) = 100;
    const PixelGrid r = resize(g, 2, 4);
    const std::vector<double> expected_column = {0, 25, 75, 100};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 4; ++y)
            CHECK(r.at(y, x) == doctest::Approx(expected_column[y]));
}

TEST_CASE("resize rejects bad targets") {
    const PixelGrid g(2, 2, 1.0);
    CHECK_THROWS_AS(resize(g, 0, 4), DimensionError);
    CHECK_THROWS_AS(resize(g, 4, -1), DimensionError);
}

TEST_CASE("pad_replicate: examples") {
    std::mt19937 rng(14);
    const PixelGrid g = test::random_grid(4, 4, rng);
    CHECK(pad_replicate(g, 0).samples() == g.samples());

    const PixelGrid one(1, 1, 5.0);
    const PixelGrid p1 = pad_replicate(one, 1);
    CHECK(p1.width() == 3);
    CHECK(p1.height() == 3);
    for (double v : p1.samples()) CHECK(v == 5.0);

    PixelGrid two(2, 1);
    two.at(0, 0) = 1;
    two.at(0, 1) = 9;
    const PixelGrid p2 = pad_replicate(two, 1);
    CHECK(p2.width() == 4);
    CHECK(p2.height() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(p2.at(i, 0) == 1);
        CHECK(p2.at(i, 1) == 1);
        CHECK(p2.at(i, 2) == 9);
        CHECK(p2.at(i, 3) == 9);
    }
}

TEST_CASE("pad_replicate never invents sample values") {
    std::mt19937 rng(15);
    const PixelGrid g = test::random_grid(5, 4, rng, 0, 9);
    const std::set<double> source(g.samples().begin(), g.samples().end());
    const PixelGrid p = pad_replicate(g, 3);
    for (double v : p.samples()) CHECK(source.count(v) == 1);
}

TEST_CASE("pixel grid invariants are enforced") {
    CHECK_THROWS_AS(PixelGrid(0, 5), DimensionError);
    CHECK_THROWS_AS(PixelGrid(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(RgbPixelGrid(PixelGrid(2, 2), PixelGrid(2, 3), PixelGrid(2, 2)),
                    DimensionError);
}
