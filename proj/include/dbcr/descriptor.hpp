// The full feature pipeline: DBC colour texture map and original image ->
// Haar sub-bands -> HOG per band -> one concatenated vector, all under a
// fingerprinted configuration.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dbcr/hog.hpp"
#include "dbcr/pixel_grid.hpp"
#include "dbcr/texture_codes.hpp"

namespace dbcr {

enum class OriginalBranch { grayscale, per_channel };

// SHA-256 of the canonical configuration string. Two vectors are comparable
// iff their fingerprints match.
struct Fingerprint {
    std::array<std::uint8_t, 32> bytes{};

    std::string hex() const;
    bool operator==(const Fingerprint&) const = default;
};

struct DescriptorConfig {
    int canonical_width = 256;
    int canonical_height = 256;
    DbcParams dbc;
    HogParams hog;
    OriginalBranch original_branch = OriginalBranch::grayscale;
    // Tags recording conventions the numbers depend on. Only the defaults
    // are implemented; the fields exist so the fingerprint pins them.
    std::string wavelet_norm = "haar-mean";
    std::string fusion_rule = "mean";
};

void validate(const DescriptorConfig& config);

// Deterministic key=value rendering of every parameter; its SHA-256 is the
// config fingerprint.
std::string canonical_string(const DescriptorConfig& config);
Fingerprint fingerprint(const DescriptorConfig& config);

// Key/value config file support (same keys as the canonical string).
DescriptorConfig parse_config_text(const std::string& text);
DescriptorConfig load_config_file(const std::filesystem::path& path);

// Final descriptor. Values are float32: the pipeline computes in double and
// narrows once here, so described, stored and loaded vectors are bit-equal.
struct FeatureVector {
    std::vector<float> values;
    Fingerprint fingerprint;

    std::size_t dim() const { return values.size(); }
};

// Exact vector length under `config`, computed from geometry alone.
std::size_t feature_dim(const DescriptorConfig& config);

// Resize to canonical geometry, DBC per channel per direction, fuse into the
// colour texture map, Haar-decompose the texture map and the original-branch
// image(s), HOG each sub-band, concatenate (texture bands LL,LH,HL,HH first,
// then the original branch in the same band order per image).
FeatureVector describe(const RgbPixelGrid& img, const DescriptorConfig& config);

} // namespace dbcr
