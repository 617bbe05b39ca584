// Retrieval measurement: precision/recall at K, rank-window average
// precision, per-class aggregates, confusion matrix and timing.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dbcr/index.hpp"

namespace dbcr {

struct EvalConfig {
    int k = 20;               // retrieved-set size for precision/recall
    Metric metric = Metric::l2;
    int rank_window = 100;    // window for average precision
    bool include_self = true; // query counts as its own relevant hit
};

// P = (relevant in top K) / K, R = same numerator / total_relevant.
std::pair<double, double> precision_recall_at_k(
    const RankedList& ranked, const std::string& query_label,
    const std::unordered_map<std::uint32_t, std::string>& labels, int k,
    int total_relevant);

// Average precision of one query over a rank window: the fraction of the
// first `window` ranked entries sharing the query's label. Ranks are
// 1-based positions in the full sorted list.
double rank_window_precision(
    const RankedList& full_ranking, const std::string& query_label,
    const std::unordered_map<std::uint32_t, std::string>& labels, int window);

// Mean of one class's per-query average precisions. Throws on an empty
// class, naming it.
double class_average_precision(std::span<const double> per_query_values,
                               const std::string& class_label);

// Every indexed image queried with itself excluded; predicted class is the
// nearest remaining neighbour's label. Row t holds the percentage of
// class-t queries predicted as each class (rows sum to 100).
struct ConfusionMatrix {
    std::vector<std::string> labels; // sorted
    std::vector<std::vector<double>> rows_percent;
};

ConfusionMatrix confusion_matrix(const FeatureIndex& index, Metric metric,
                                 int threads = 0);

struct ClassReport {
    std::string label;
    int size = 0;
    double precision_at_k = 0.0;
    double recall_at_k = 0.0;
    double avg_precision = 0.0;
};

struct EvalReport {
    EvalConfig config;
    std::string fingerprint_hex;
    std::size_t query_count = 0;
    std::vector<ClassReport> classes; // sorted by label
    double overall_precision_at_k = 0.0;
    double overall_recall_at_k = 0.0;
    double overall_avg_precision = 0.0;
    double retrieval_rate_percent = 0.0; // top-1 NN accuracy, self excluded
    ConfusionMatrix confusion;
    std::vector<std::string> single_member_classes; // no same-class neighbour possible
    std::vector<double> per_query_avg_precision;    // by entry order
    double total_seconds = 0.0;
    double seconds_per_100_queries = 0.0;
};

// Runs every indexed image as a query and assembles all metrics above.
// Metric values are deterministic across runs and thread counts; only the
// timing fields vary.
EvalReport run_benchmark(const FeatureIndex& index, const EvalConfig& config,
                         int threads = 0);

// Renderings. JSON keeps full precision; timing lives under a single
// "timing" key so deterministic comparisons can drop it.
std::string report_to_json(const EvalReport& report, bool include_timing = true);
std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report, const FeatureIndex& index);

} // namespace dbcr
