// Configuration canonicalization, fingerprinting and the end-to-end
// descriptor pipeline.

#include "dbcr/descriptor.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "dbcr/haar.hpp"
#include "dbcr/image_ops.hpp"

namespace dbcr {

namespace {

// Shortest round-trip decimal rendering, locale-independent.
std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string directions_csv(const std::vector<DbcDirection>& dirs) {
    std::string out;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(direction_degrees(dirs[i]));
    }
    return out;
}

std::string branch_name(OriginalBranch b) {
    return b == OriginalBranch::grayscale ? "grayscale" : "per-channel";
}

std::string norm_name(BlockNorm n) { return n == BlockNorm::l1 ? "l1" : "l2"; }

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

std::vector<DbcDirection> parse_directions(const std::string& value) {
    std::vector<DbcDirection> dirs;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "0") dirs.push_back(DbcDirection::deg0);
        else if (item == "45") dirs.push_back(DbcDirection::deg45);
        else if (item == "90") dirs.push_back(DbcDirection::deg90);
        else if (item == "135") dirs.push_back(DbcDirection::deg135);
        else throw ConfigError("config: bad direction '" + item + "'");
    }
    return dirs;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::string Fingerprint::hex() const {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

void validate(const DescriptorConfig& c) {
    if (c.canonical_width < 1 || c.canonical_height < 1)
        throw ConfigError("config: canonical size must be >= 1");
    if (c.dbc.distance < 1)
        throw ConfigError("config: dbc_distance must be >= 1");
    if (c.dbc.directions.empty())
        throw ConfigError("config: dbc_directions must be non-empty");
    for (std::size_t a = 0; a < c.dbc.directions.size(); ++a)
        for (std::size_t b = a + 1; b < c.dbc.directions.size(); ++b)
            if (c.dbc.directions[a] == c.dbc.directions[b])
                throw ConfigError("config: duplicate dbc direction");
    try {
        dbcr::validate(c.hog);
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.wavelet_norm != "haar-mean")
        throw ConfigError("config: unsupported wavelet_norm '" + c.wavelet_norm + "'");
    if (c.fusion_rule != "mean")
        throw ConfigError("config: unsupported fusion_rule '" + c.fusion_rule + "'");
}

std::string canonical_string(const DescriptorConfig& c) {
    validate(c);
    std::ostringstream out;
    out << "dbcr-config-v1\n"
        << "canonical_width=" << c.canonical_width << '\n'
        << "canonical_height=" << c.canonical_height << '\n'
        << "dbc_distance=" << c.dbc.distance << '\n'
        << "dbc_directions=" << directions_csv(c.dbc.directions) << '\n'
        << "original_branch=" << branch_name(c.original_branch) << '\n'
        << "hog_cell_size=" << c.hog.cell_size << '\n'
        << "hog_block_size=" << c.hog.block_size << '\n'
        << "hog_block_stride=" << c.hog.block_stride << '\n'
        << "hog_bin_count=" << c.hog.bin_count << '\n'
        << "hog_signed=" << (c.hog.signed_orientation ? "true" : "false") << '\n'
        << "hog_norm=" << norm_name(c.hog.norm) << '\n'
        << "hog_epsilon=" << format_double(c.hog.epsilon) << '\n'
        << "wavelet_norm=" << c.wavelet_norm << '\n'
        << "fusion_rule=" << c.fusion_rule << '\n';
    return out.str();
}

Fingerprint fingerprint(const DescriptorConfig& c) {
    const std::string text = canonical_string(c);
    Fingerprint fp;
    unsigned int len = 0;
    if (!EVP_Digest(text.data(), text.size(), fp.bytes.data(), &len,
                    EVP_sha256(), nullptr) || len != fp.bytes.size())
        throw Error("fingerprint: SHA-256 failed");
    return fp;
}

DescriptorConfig parse_config_text(const std::string& text) {
    DescriptorConfig c;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' ||
            stripped == "dbcr-config-v1")
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "canonical_width") c.canonical_width = parse_int(key, value);
        else if (key == "canonical_height") c.canonical_height = parse_int(key, value);
        else if (key == "dbc_distance") c.dbc.distance = parse_int(key, value);
        else if (key == "dbc_directions") c.dbc.directions = parse_directions(value);
        else if (key == "original_branch") {
            if (value == "grayscale") c.original_branch = OriginalBranch::grayscale;
            else if (value == "per-channel") c.original_branch = OriginalBranch::per_channel;
            else throw ConfigError("config: bad original_branch '" + value + "'");
        }
        else if (key == "hog_cell_size") c.hog.cell_size = parse_int(key, value);
        else if (key == "hog_block_size") c.hog.block_size = parse_int(key, value);
        else if (key == "hog_block_stride") c.hog.block_stride = parse_int(key, value);
        else if (key == "hog_bin_count") c.hog.bin_count = parse_int(key, value);
        else if (key == "hog_signed") c.hog.signed_orientation = parse_bool(key, value);
        else if (key == "hog_norm") {
            if (value == "l1") c.hog.norm = BlockNorm::l1;
            else if (value == "l2") c.hog.norm = BlockNorm::l2;
            else throw ConfigError("config: bad hog_norm '" + value + "'");
        }
        else if (key == "hog_epsilon") c.hog.epsilon = parse_double(key, value);
        else if (key == "wavelet_norm") c.wavelet_norm = value;
        else if (key == "fusion_rule") c.fusion_rule = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    validate(c);
    return c;
}

DescriptorConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::size_t feature_dim(const DescriptorConfig& config) {
    validate(config);
    const int band_w = (config.canonical_width + 1) / 2;
    const int band_h = (config.canonical_height + 1) / 2;
    const std::size_t per_band = hog_layout(band_w, band_h, config.hog).length();
    const std::size_t images =
        1 + (config.original_branch == OriginalBranch::grayscale ? 1 : 3);
    return images * 4 * per_band;
}

namespace {

void append_band_hogs(const PixelGrid& grid, const HogParams& params,
                      std::vector<double>& out) {
    const SubBands bands = haar_decompose(grid);
    for (const PixelGrid* band : {&bands.ll, &bands.lh, &bands.hl, &bands.hh}) {
        const HogVector h = hog(*band, params);
        out.insert(out.end(), h.values.begin(), h.values.end());
    }
}

} // namespace

FeatureVector describe(const RgbPixelGrid& img, const DescriptorConfig& config) {
    validate(config);
    const RgbPixelGrid canon =
        resize(img, config.canonical_width, config.canonical_height);

    // Texture branch: DBC per channel per direction, fused by mean into the
    // colour texture map.
    std::array<PixelGrid, 3> channel_maps;
    const PixelGrid* channels[3] = {&canon.r, &canon.g, &canon.b};
    for (int ch = 0; ch < 3; ++ch) {
        std::vector<CodeMap> maps;
        maps.reserve(config.dbc.directions.size());
        for (DbcDirection dir : config.dbc.directions)
            maps.push_back(dbc_code_map(*channels[ch], dir, config.dbc));
        channel_maps[ch] = fuse_directions(maps);
    }
    const PixelGrid texture_map =
        fuse_channels(channel_maps[0], channel_maps[1], channel_maps[2]);

    std::vector<double> values;
    values.reserve(feature_dim(config));
    append_band_hogs(texture_map, config.hog, values);

    if (config.original_branch == OriginalBranch::grayscale) {
        append_band_hogs(to_grayscale(canon), config.hog, values);
    } else {
        append_band_hogs(canon.r, config.hog, values);
        append_band_hogs(canon.g, config.hog, values);
        append_band_hogs(canon.b, config.hog, values);
    }

    FeatureVector fv;
    fv.fingerprint = fingerprint(config);
    fv.values.reserve(values.size());
    for (double v : values) fv.values.push_back(static_cast<float>(v));
    return fv;
}

} // namespace dbcr
