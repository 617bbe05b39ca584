// Shared fixtures for the test suites: deterministic random grids, synthetic
// dataset generators and a scoped temp directory.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dbcr/image_io.hpp"
#include "dbcr/pixel_grid.hpp"

namespace dbcr::test {

// Integer-valued random grid in [lo, hi]; integer samples keep difference
// kernels exact, matching real 8-bit imagery.
inline PixelGrid random_grid(int width, int height, std::mt19937& rng,
                             int lo = 0, int hi = 255) {
    std::uniform_int_distribution<int> dist(lo, hi);
    PixelGrid g(width, height);
    for (double& v : g.samples()) v = dist(rng);
    return g;
}

inline RgbPixelGrid random_rgb(int width, int height, std::mt19937& rng,
                               int lo = 0, int hi = 255) {
    return {random_grid(width, height, rng, lo, hi),
            random_grid(width, height, rng, lo, hi),
            random_grid(width, height, rng, lo, hi)};
}

inline PixelGrid shifted(const PixelGrid& g, double c) {
    PixelGrid out = g;
    for (double& v : out.samples()) v += c;
    return out;
}

// Unique temp directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dbcr_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Synthetic class images for end-to-end retrieval tests. Size is square.
// noise must stay small enough that class structure dominates.
inline RgbPixelGrid make_solid(int size, int r, int g, int b, int noise,
                               std::mt19937& rng) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    RgbPixelGrid img{PixelGrid(size, size), PixelGrid(size, size),
                     PixelGrid(size, size)};
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            img.r.at(i, j) = std::clamp(r + (noise ? jitter(rng) : 0), 0, 255);
            img.g.at(i, j) = std::clamp(g + (noise ? jitter(rng) : 0), 0, 255);
            img.b.at(i, j) = std::clamp(b + (noise ? jitter(rng) : 0), 0, 255);
        }
    return img;
}

inline RgbPixelGrid make_vertical_stripes(int size, int period, int noise,
                                          std::mt19937& rng) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    RgbPixelGrid img{PixelGrid(size, size), PixelGrid(size, size),
                     PixelGrid(size, size)};
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const int v = (j / period) % 2 ? 220 : 30;
            const int n = noise ? jitter(rng) : 0;
            img.r.at(i, j) = std::clamp(v + n, 0, 255);
            img.g.at(i, j) = std::clamp(v + n, 0, 255);
            img.b.at(i, j) = std::clamp(v + n, 0, 255);
        }
    return img;
}

inline RgbPixelGrid make_checkerboard(int size, int square, int noise,
                                      std::mt19937& rng) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    RgbPixelGrid img{PixelGrid(size, size), PixelGrid(size, size),
                     PixelGrid(size, size)};
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const int v = ((i / square) + (j / square)) % 2 ? 220 : 30;
            const int n = noise ? jitter(rng) : 0;
            img.r.at(i, j) = std::clamp(v + n, 0, 255);
            img.g.at(i, j) = std::clamp(v + n, 0, 255);
            img.b.at(i, j) = std::clamp(v + n, 0, 255);
        }
    return img;
}

// Writes a three-class PPM dataset (solid / vertical stripes / checkerboard)
// under root/<class>/img<N>.ppm and returns the file count.
inline int write_three_class_dataset(const std::filesystem::path& root,
                                     int per_class, int size, int noise,
                                     std::uint32_t seed) {
    std::mt19937 rng(seed);
    int written = 0;
    for (int n = 0; n < per_class; ++n) {
        const std::string name = "img" + std::to_string(n) + ".ppm";
        {
            const auto dir = root / "solid";
            std::filesystem::create_directories(dir);
            const auto img = make_solid(size, 40 + 12 * n, 90 + 9 * n,
                                        200 - 10 * n, noise, rng);
            write_file(dir / name, encode_ppm(img));
            ++written;
        }
        {
            const auto dir = root / "stripes";
            std::filesystem::create_directories(dir);
            const auto img = make_vertical_stripes(size, 8 + (n % 3) * 4, noise, rng);
            write_file(dir / name, encode_ppm(img));
            ++written;
        }
        {
            const auto dir = root / "checker";
            std::filesystem::create_directories(dir);
            const auto img = make_checkerboard(size, 12 + (n % 3) * 6, noise, rng);
            write_file(dir / name, encode_ppm(img));
            ++written;
        }
    }
    return written;
}

} // namespace dbcr::test
