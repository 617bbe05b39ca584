// Raster codecs. Binary PPM (P6) and PGM (P5) are built in and bit-exact;
// JPEG decoding is compiled in when libjpeg is available.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dbcr/pixel_grid.hpp"

namespace dbcr {

// Decodes a raster file held in memory. The hint ("ppm", "pgm", "jpg", ...)
// is consulted only when the content magic is ambiguous; decoding is driven
// by the leading bytes. Grayscale sources replicate their single channel
// into r = g = b. Throws DecodeError naming the offending byte offset or
// the missing capability.
RgbPixelGrid decode_image(const std::vector<std::uint8_t>& bytes,
                          const std::string& format_hint = "");

// Binary encoders, maxval 255. Samples are rounded to the nearest integer
// and clamped to [0, 255]; integer-valued grids round-trip bit-exactly.
std::vector<std::uint8_t> encode_ppm(const RgbPixelGrid& img);
std::vector<std::uint8_t> encode_pgm(const PixelGrid& gray);

// File helpers.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes);
RgbPixelGrid load_image(const std::filesystem::path& path);

// True when this build can decode JPEG streams.
bool jpeg_supported();

} // namespace dbcr
