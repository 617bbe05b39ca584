// Similarity metrics, exhaustive ranking, dataset ingestion and the binary
// index format.

#include "dbcr/index.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dbcr {

namespace fs = std::filesystem;

Metric parse_metric(const std::string& name) {
    if (name == "l1") return Metric::l1;
    if (name == "l2") return Metric::l2;
    if (name == "canberra") return Metric::canberra;
    if (name == "chi2") return Metric::chi_square;
    throw ConfigError("unknown metric '" + name + "' (want l1|l2|canberra|chi2)");
}

std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::l1: return "l1";
        case Metric::l2: return "l2";
        case Metric::canberra: return "canberra";
        case Metric::chi_square: return "chi2";
    }
    throw Error("unknown metric");
}

double metric_distance(std::span<const float> a, std::span<const float> b,
                       Metric metric) {
    const std::size_t n = a.size();
    double acc = 0.0;
    switch (metric) {
        case Metric::l1:
            for (std::size_t i = 0; i < n; ++i)
                acc += std::abs(static_cast<double>(a[i]) - b[i]);
            return acc;
        case Metric::l2:
            for (std::size_t i = 0; i < n; ++i) {
                const double d = static_cast<double>(a[i]) - b[i];
                acc += d * d;
            }
            return std::sqrt(acc);
        case Metric::canberra:
            for (std::size_t i = 0; i < n; ++i) {
                const double denom = std::abs(static_cast<double>(a[i])) +
                                     std::abs(static_cast<double>(b[i]));
                if (denom == 0.0) continue; // term defined as 0
                acc += std::abs(static_cast<double>(a[i]) - b[i]) / denom;
            }
            return acc;
        case Metric::chi_square:
            for (std::size_t i = 0; i < n; ++i) {
                const double denom = static_cast<double>(a[i]) + b[i];
                if (denom == 0.0) continue; // term defined as 0
                const double d = static_cast<double>(a[i]) - b[i];
                acc += d * d / denom;
            }
            return acc;
    }
    throw Error("unknown metric");
}

double distance(const FeatureVector& a, const FeatureVector& b, Metric metric) {
    if (a.dim() != b.dim())
        throw ComparabilityError("distance: vector lengths differ (" +
                                 std::to_string(a.dim()) + " vs " +
                                 std::to_string(b.dim()) + ")");
    if (!(a.fingerprint == b.fingerprint))
        throw ComparabilityError("distance: config fingerprints differ (" +
                                 a.fingerprint.hex() + " vs " +
                                 b.fingerprint.hex() + ")");
    return metric_distance(a.values, b.values, metric);
}

RankedList knn(const FeatureVector& query, const FeatureIndex& index,
               std::size_t k, Metric metric) {
    if (k < 1) throw Error("knn: k must be >= 1");
    RankedList out;
    if (index.entries.empty()) return out;

    if (!(query.fingerprint == index.fingerprint))
        throw ComparabilityError("knn: query fingerprint " +
                                 query.fingerprint.hex() +
                                 " does not match index fingerprint " +
                                 index.fingerprint.hex());
    if (query.dim() != index.dim)
        throw ComparabilityError("knn: query dim " + std::to_string(query.dim()) +
                                 " does not match index dim " +
                                 std::to_string(index.dim));

    std::vector<RankedHit> hits;
    hits.reserve(index.entries.size());
    for (const IndexEntry& e : index.entries)
        hits.push_back({e.id, metric_distance(query.values, e.vector.values, metric)});

    std::sort(hits.begin(), hits.end(), [](const RankedHit& x, const RankedHit& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        return x.id < y.id;
    });
    if (hits.size() > k) hits.resize(k);
    out.hits = std::move(hits);
    return out;
}

DatasetLayout parse_layout(const std::string& name) {
    if (name == "classdirs") return DatasetLayout::folder_per_class;
    if (name == "wang") return DatasetLayout::wang;
    throw ConfigError("unknown layout '" + name + "' (want classdirs|wang)");
}

namespace {

bool raster_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm" || ext == ".pgm" || ext == ".jpg" || ext == ".jpeg" ||
           ext == ".png";
}

} // namespace

std::vector<std::pair<fs::path, std::string>>
ingest(const fs::path& root, DatasetLayout layout) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw IngestError("ingest: '" + root.string() + "' is not a readable directory");

    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw IngestError("ingest: cannot walk " + root.string() +
                                  ": " + ec.message());
        if (it->is_regular_file() && raster_extension(it->path()))
            files.push_back(it->path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.generic_string() < b.generic_string();
              });

    std::vector<std::pair<fs::path, std::string>> out;
    out.reserve(files.size());
    std::vector<std::string> offenders;

    for (const fs::path& p : files) {
        if (layout == DatasetLayout::folder_per_class) {
            out.emplace_back(p, p.parent_path().filename().string());
        } else {
            const std::string stem = p.stem().string();
            int n = 0;
            auto [end, err] = std::from_chars(stem.data(), stem.data() + stem.size(), n);
            if (err != std::errc{} || end != stem.data() + stem.size() || n < 0) {
                offenders.push_back(p.string());
                continue;
            }
            out.emplace_back(p, std::to_string(n / 100));
        }
    }
    if (!offenders.empty()) {
        std::string msg = "ingest: non-numeric stems under wang layout:";
        for (const std::string& o : offenders) msg += "\n  " + o;
        throw IngestError(msg);
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'D', 'B', 'C', 'R'};

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8)
        out.push_back(static_cast<char>((v >> s) & 0xFF));
}

class IndexParser {
public:
    explicit IndexParser(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size())
            throw IndexFormatError("index: truncated while reading " +
                                   std::string(what) + " at byte " +
                                   std::to_string(pos_));
    }

    std::uint16_t u16(const char* what) {
        need(2, what);
        const std::uint16_t v = static_cast<std::uint16_t>(
            bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int s = 0; s < 4; ++s)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + s]) << (8 * s);
        pos_ += 4;
        return v;
    }

    std::string str(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    void raw(void* dst, std::size_t n, const char* what) {
        need(n, what);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }
    std::size_t size() const { return bytes_.size(); }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

void append_f32_le(std::string& out, const std::vector<float>& values) {
    static_assert(sizeof(float) == 4);
    if constexpr (std::endian::native == std::endian::little) {
        const std::size_t at = out.size();
        out.resize(at + values.size() * 4);
        std::memcpy(out.data() + at, values.data(), values.size() * 4);
    } else {
        for (float f : values) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            put_u32(out, u);
        }
    }
}

} // namespace

void save_index(const FeatureIndex& index, const fs::path& path) {
    if (index.entries.size() > 0xFFFFFFFFu)
        throw Error("index: too many entries");

    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kIndexFormatVersion);
    out.append(reinterpret_cast<const char*>(index.fingerprint.bytes.data()), 32);
    put_u32(out, index.dim);
    put_u32(out, static_cast<std::uint32_t>(index.entries.size()));

    for (const IndexEntry& e : index.entries) {
        if (e.vector.values.size() != index.dim)
            throw Error("index: entry " + std::to_string(e.id) +
                        " has dim " + std::to_string(e.vector.values.size()) +
                        " but header says " + std::to_string(index.dim));
        if (!(e.vector.fingerprint == index.fingerprint))
            throw Error("index: entry " + std::to_string(e.id) +
                        " fingerprint does not match header");
        if (e.path.size() > 0xFFFF || e.label.size() > 0xFFFF)
            throw Error("index: path or label longer than 65535 bytes");
        put_u32(out, e.id);
        put_u16(out, static_cast<std::uint16_t>(e.path.size()));
        out += e.path;
        put_u16(out, static_cast<std::uint16_t>(e.label.size()));
        out += e.label;
        append_f32_le(out, e.vector.values);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot create " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

FeatureIndex load_index(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());

    IndexParser p(bytes);
    char magic[4];
    p.raw(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw IndexFormatError("index: bad magic (not a DBCR index)");
    const std::uint16_t version = p.u16("version");
    if (version != kIndexFormatVersion)
        throw IndexFormatError("index: unsupported format version " +
                               std::to_string(version));

    FeatureIndex index;
    p.raw(index.fingerprint.bytes.data(), 32, "fingerprint");
    index.dim = p.u32("dim");
    const std::uint32_t count = p.u32("entry count");

    index.entries.reserve(count);
    std::vector<bool> seen;
    for (std::uint32_t i = 0; i < count; ++i) {
        IndexEntry e;
        e.id = p.u32("entry id");
        const std::uint16_t path_len = p.u16("path length");
        e.path = p.str(path_len, "path");
        const std::uint16_t label_len = p.u16("label length");
        e.label = p.str(label_len, "label");
        e.vector.fingerprint = index.fingerprint;
        e.vector.values.resize(index.dim);
        if (index.dim > 0) {
            p.raw(e.vector.values.data(), static_cast<std::size_t>(index.dim) * 4,
                  "vector values");
            if constexpr (std::endian::native != std::endian::little) {
                for (float& v : e.vector.values) {
                    std::uint32_t u;
                    std::memcpy(&u, &v, 4);
                    u = ((u & 0xFF) << 24) | ((u & 0xFF00) << 8) |
                        ((u >> 8) & 0xFF00) | (u >> 24);
                    std::memcpy(&v, &u, 4);
                }
            }
        }
        if (e.id >= seen.size()) seen.resize(e.id + 1, false);
        if (seen[e.id])
            throw IndexFormatError("index: duplicate entry id " +
                                   std::to_string(e.id));
        seen[e.id] = true;
        index.entries.push_back(std::move(e));
    }
    if (p.pos() != p.size())
        throw IndexFormatError("index: " + std::to_string(p.size() - p.pos()) +
                               " trailing bytes after last entry");
    return index;
}

} // namespace dbcr
