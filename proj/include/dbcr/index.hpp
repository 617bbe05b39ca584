// Distance metrics, the persistent feature index, dataset ingestion and
// exhaustive k-nearest ranking.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dbcr/descriptor.hpp"

namespace dbcr {

enum class Metric { l1, l2, canberra, chi_square };

Metric parse_metric(const std::string& name); // "l1"|"l2"|"canberra"|"chi2"
std::string metric_name(Metric metric);

// Raw-span distance; both spans must have equal length (not checked here).
// Canberra and chi-square terms with a zero denominator contribute 0.
double metric_distance(std::span<const float> a, std::span<const float> b,
                       Metric metric);

// Checked entry point: lengths and fingerprints must match.
double distance(const FeatureVector& a, const FeatureVector& b, Metric metric);

struct IndexEntry {
    std::uint32_t id = 0;
    std::string path;
    std::string label;
    FeatureVector vector;
};

struct FeatureIndex {
    Fingerprint fingerprint;
    std::uint32_t dim = 0;
    std::vector<IndexEntry> entries;
};

struct RankedHit {
    std::uint32_t id = 0;
    double distance = 0.0;
};

struct RankedList {
    std::string query; // source path or id, informational
    std::vector<RankedHit> hits; // ascending distance, ties by ascending id
};

// Exhaustive scan: the k nearest entries (all of them if k exceeds the
// count), ascending distance with id tie-break. An empty index yields an
// empty list.
RankedList knn(const FeatureVector& query, const FeatureIndex& index,
               std::size_t k, Metric metric);

enum class DatasetLayout { folder_per_class, wang };

DatasetLayout parse_layout(const std::string& name); // "classdirs"|"wang"

// Enumerates raster files under root in lexicographic path order and labels
// them: folder-per-class takes the parent directory name; wang parses the
// filename stem as an integer n and labels floor(n/100).
std::vector<std::pair<std::filesystem::path, std::string>>
ingest(const std::filesystem::path& root, DatasetLayout layout);

// Binary index format (little-endian): magic "DBCR", u16 version = 1,
// 32-byte fingerprint, u32 dim, u32 entry count, then per entry
// u32 id, u16 path length + UTF-8 path, u16 label length + UTF-8 label,
// dim float32 values.
void save_index(const FeatureIndex& index, const std::filesystem::path& path);
FeatureIndex load_index(const std::filesystem::path& path);

inline constexpr std::uint16_t kIndexFormatVersion = 1;

} // namespace dbcr
