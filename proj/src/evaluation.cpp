// Benchmark protocol: every indexed image queried against the index, with
// precision/recall, rank-window average precision, confusion matrix and
// timing assembled into one report.

#include "dbcr/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dbcr/parallel.hpp"

namespace dbcr {

using nlohmann::json;

std::pair<double, double> precision_recall_at_k(
    const RankedList& ranked, const std::string& query_label,
    const std::unordered_map<std::uint32_t, std::string>& labels, int k,
    int total_relevant) {
    if (ranked.hits.empty()) throw Error("precision: empty ranking");
    if (k < 1) throw Error("precision: k must be >= 1");
    if (total_relevant < 1) throw Error("precision: total_relevant must be >= 1");

    int hits = 0;
    const int top = std::min<std::size_t>(k, ranked.hits.size());
    for (int r = 0; r < top; ++r) {
        const auto it = labels.find(ranked.hits[r].id);
        if (it != labels.end() && it->second == query_label) ++hits;
    }
    return {static_cast<double>(hits) / k,
            static_cast<double>(hits) / total_relevant};
}

double rank_window_precision(
    const RankedList& full_ranking, const std::string& query_label,
    const std::unordered_map<std::uint32_t, std::string>& labels, int window) {
    if (window < 1) throw Error("rank window must be >= 1");
    int hits = 0;
    const int top = std::min<std::size_t>(window, full_ranking.hits.size());
    for (int r = 0; r < top; ++r) {
        const auto it = labels.find(full_ranking.hits[r].id);
        if (it != labels.end() && it->second == query_label) ++hits;
    }
    return static_cast<double>(hits) / window;
}

double class_average_precision(std::span<const double> per_query_values,
                               const std::string& class_label) {
    if (per_query_values.empty())
        throw Error("class '" + class_label + "' has no query results");
    double sum = 0.0;
    for (double v : per_query_values) sum += v;
    return sum / static_cast<double>(per_query_values.size());
}

namespace {

struct QueryOutcome {
    double precision_at_k = 0.0;
    double recall_at_k = 0.0;
    double avg_precision = 0.0;
    int predicted_class = -1; // index into the sorted label list
};

struct RankSlot {
    double distance;
    std::uint32_t id;
    bool operator<(const RankSlot& o) const {
        return distance != o.distance ? distance < o.distance : id < o.id;
    }
};

// Sorted class labels with entry lookup tables.
struct ClassTable {
    std::vector<std::string> labels;
    std::vector<int> entry_class;  // per entry position
    std::vector<int> class_count;  // per class
    std::unordered_map<std::uint32_t, int> class_of_id;

    explicit ClassTable(const FeatureIndex& index) {
        std::map<std::string, int> ids;
        for (const IndexEntry& e : index.entries) ids.emplace(e.label, 0);
        int next = 0;
        for (auto& [label, id] : ids) {
            id = next++;
            labels.push_back(label);
        }
        class_count.assign(labels.size(), 0);
        entry_class.reserve(index.entries.size());
        for (const IndexEntry& e : index.entries) {
            const int c = ids[e.label];
            entry_class.push_back(c);
            class_of_id.emplace(e.id, c);
            ++class_count[c];
        }
    }
};

// One query's full scan: rank every entry, then read the metrics off the
// sorted order. `self` is the query's own position in the entry list.
QueryOutcome evaluate_query(const FeatureIndex& index, const ClassTable& table,
                            std::size_t self, const EvalConfig& config,
                            std::vector<RankSlot>& scratch) {
    const std::vector<float>& q = index.entries[self].vector.values;
    const std::size_t n = index.entries.size();
    scratch.clear();
    for (std::size_t j = 0; j < n; ++j)
        scratch.push_back({metric_distance(q, index.entries[j].vector.values,
                                           config.metric),
                           index.entries[j].id});
    std::sort(scratch.begin(), scratch.end());

    const int query_class = table.entry_class[self];
    const std::uint32_t self_id = index.entries[self].id;

    QueryOutcome out;
    int rank = 0, hits_k = 0, hits_window = 0;
    for (const RankSlot& slot : scratch) {
        const bool is_self = slot.id == self_id;
        if (is_self && !config.include_self) continue;
        ++rank;
        const int cls = table.class_of_id.at(slot.id);
        if (cls == query_class) {
            if (rank <= config.k) ++hits_k;
            if (rank <= config.rank_window) ++hits_window;
        }
        if (out.predicted_class < 0 && !is_self) out.predicted_class = cls;
    }

    const int class_size = table.class_count[query_class];
    const int total_relevant = config.include_self ? class_size : class_size - 1;
    out.precision_at_k = static_cast<double>(hits_k) / config.k;
    out.recall_at_k = total_relevant > 0
                          ? static_cast<double>(hits_k) / total_relevant
                          : 0.0;
    out.avg_precision = static_cast<double>(hits_window) / config.rank_window;
    return out;
}

} // namespace

ConfusionMatrix confusion_matrix(const FeatureIndex& index, Metric metric,
                                 int threads) {
    if (index.entries.empty()) throw Error("confusion: empty index");
    const ClassTable table(index);
    if (table.labels.size() < 2)
        throw Error("confusion: need at least 2 classes");

    EvalConfig probe;
    probe.metric = metric;
    probe.k = 1;
    probe.rank_window = 1;

    const std::size_t n = index.entries.size();
    std::vector<int> predicted(n, -1);
    parallel_for(n, threads, [&](std::size_t q) {
        std::vector<RankSlot> scratch;
        predicted[q] = evaluate_query(index, table, q, probe, scratch).predicted_class;
    });

    ConfusionMatrix cm;
    cm.labels = table.labels;
    cm.rows_percent.assign(table.labels.size(),
                           std::vector<double>(table.labels.size(), 0.0));
    for (std::size_t q = 0; q < n; ++q)
        cm.rows_percent[table.entry_class[q]][predicted[q]] += 1.0;
    for (std::size_t t = 0; t < table.labels.size(); ++t)
        for (double& cell : cm.rows_percent[t])
            cell *= 100.0 / table.class_count[t];
    return cm;
}

EvalReport run_benchmark(const FeatureIndex& index, const EvalConfig& config,
                         int threads) {
    if (index.entries.empty()) throw Error("benchmark: empty index");
    if (config.k < 1 || config.rank_window < 1)
        throw Error("benchmark: k and rank_window must be >= 1");

    const ClassTable table(index);
    const std::size_t n = index.entries.size();

    std::vector<QueryOutcome> outcomes(n);
    const auto start = std::chrono::steady_clock::now();
    parallel_for(n, threads, [&](std::size_t q) {
        std::vector<RankSlot> scratch;
        scratch.reserve(n);
        outcomes[q] = evaluate_query(index, table, q, config, scratch);
    });
    const auto stop = std::chrono::steady_clock::now();

    EvalReport report;
    report.config = config;
    report.fingerprint_hex = index.fingerprint.hex();
    report.query_count = n;
    report.total_seconds = std::chrono::duration<double>(stop - start).count();
    report.seconds_per_100_queries = report.total_seconds * 100.0 / n;

    const std::size_t classes = table.labels.size();
    std::vector<double> sum_p(classes, 0.0), sum_r(classes, 0.0), sum_ap(classes, 0.0);
    std::vector<std::vector<double>> confusion(classes,
                                               std::vector<double>(classes, 0.0));
    double total_p = 0.0, total_r = 0.0, total_ap = 0.0;
    std::size_t correct = 0;

    report.per_query_avg_precision.reserve(n);
    for (std::size_t q = 0; q < n; ++q) {
        const QueryOutcome& o = outcomes[q];
        const int cls = table.entry_class[q];
        sum_p[cls] += o.precision_at_k;
        sum_r[cls] += o.recall_at_k;
        sum_ap[cls] += o.avg_precision;
        total_p += o.precision_at_k;
        total_r += o.recall_at_k;
        total_ap += o.avg_precision;
        report.per_query_avg_precision.push_back(o.avg_precision);
        if (o.predicted_class >= 0) {
            confusion[cls][o.predicted_class] += 1.0;
            if (o.predicted_class == cls) ++correct;
        }
    }

    for (std::size_t t = 0; t < classes; ++t) {
        const int size = table.class_count[t];
        report.classes.push_back({table.labels[t], size, sum_p[t] / size,
                                  sum_r[t] / size, sum_ap[t] / size});
        if (size == 1) report.single_member_classes.push_back(table.labels[t]);
        for (double& cell : confusion[t]) cell *= 100.0 / size;
    }
    report.overall_precision_at_k = total_p / n;
    report.overall_recall_at_k = total_r / n;
    report.overall_avg_precision = total_ap / n;
    report.retrieval_rate_percent = 100.0 * static_cast<double>(correct) / n;
    report.confusion.labels = table.labels;
    report.confusion.rows_percent = std::move(confusion);
    return report;
}

std::string report_to_json(const EvalReport& report, bool include_timing) {
    json j;
    j["fingerprint"] = report.fingerprint_hex;
    j["metric"] = metric_name(report.config.metric);
    j["k"] = report.config.k;
    j["rank_window"] = report.config.rank_window;
    j["include_self"] = report.config.include_self;
    j["query_count"] = report.query_count;

    json classes = json::array();
    for (const ClassReport& c : report.classes) {
        classes.push_back({{"label", c.label},
                           {"size", c.size},
                           {"precision_at_k", c.precision_at_k},
                           {"recall_at_k", c.recall_at_k},
                           {"avg_precision", c.avg_precision}});
    }
    j["classes"] = classes;
    j["overall"] = {{"precision_at_k", report.overall_precision_at_k},
                    {"recall_at_k", report.overall_recall_at_k},
                    {"avg_precision", report.overall_avg_precision}};
    j["retrieval_rate_percent"] = report.retrieval_rate_percent;
    j["confusion"] = {{"labels", report.confusion.labels},
                      {"rows_percent", report.confusion.rows_percent}};
    j["single_member_classes"] = report.single_member_classes;
    j["per_query_avg_precision"] = report.per_query_avg_precision;
    if (include_timing)
        j["timing"] = {{"total_seconds", report.total_seconds},
                       {"seconds_per_100_queries", report.seconds_per_100_queries}};
    return j.dump(2);
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream out;
    out << std::fixed;

    std::size_t label_w = 7;
    for (const ClassReport& c : report.classes)
        label_w = std::max(label_w, c.label.size());

    out << "Metric: " << metric_name(report.config.metric)
        << "   K: " << report.config.k
        << "   rank window: " << report.config.rank_window
        << "   queries: " << report.query_count << "\n";
    out << "Fingerprint: " << report.fingerprint_hex << "\n\n";

    out << std::left << std::setw(static_cast<int>(label_w) + 2) << "Class"
        << std::right << std::setw(8) << "Size" << std::setw(14) << "Precision@K"
        << std::setw(12) << "Recall@K" << std::setw(14) << "AvgPrecision" << "\n";
    for (const ClassReport& c : report.classes) {
        out << std::left << std::setw(static_cast<int>(label_w) + 2) << c.label
            << std::right << std::setw(8) << c.size
            << std::setw(14) << std::setprecision(4) << c.precision_at_k
            << std::setw(12) << c.recall_at_k
            << std::setw(14) << c.avg_precision << "\n";
    }
    out << std::left << std::setw(static_cast<int>(label_w) + 2) << "Overall"
        << std::right << std::setw(8) << report.query_count
        << std::setw(14) << report.overall_precision_at_k
        << std::setw(12) << report.overall_recall_at_k
        << std::setw(14) << report.overall_avg_precision << "\n\n";

    out << "Retrieval rate: " << std::setprecision(1)
        << report.retrieval_rate_percent << " %\n";
    out << "Retrieval time: " << std::setprecision(3)
        << report.seconds_per_100_queries << " s / 100 queries\n\n";

    // Confusion cells rounded to integer percentages only here.
    out << "Confusion matrix (% of row class):\n";
    out << std::left << std::setw(static_cast<int>(label_w) + 2) << "";
    for (const std::string& l : report.confusion.labels)
        out << std::right << std::setw(std::max<int>(6, static_cast<int>(l.size()) + 2))
            << l;
    out << "\n";
    for (std::size_t t = 0; t < report.confusion.labels.size(); ++t) {
        out << std::left << std::setw(static_cast<int>(label_w) + 2)
            << report.confusion.labels[t];
        for (std::size_t c = 0; c < report.confusion.labels.size(); ++c) {
            const std::string& l = report.confusion.labels[c];
            out << std::right
                << std::setw(std::max<int>(6, static_cast<int>(l.size()) + 2))
                << static_cast<long>(std::lround(report.confusion.rows_percent[t][c]));
        }
        out << "\n";
    }
    if (!report.single_member_classes.empty()) {
        out << "\nClasses with a single member (no same-class neighbour possible):";
        for (const std::string& l : report.single_member_classes) out << " " << l;
        out << "\n";
    }
    return out.str();
}

std::string report_to_csv(const EvalReport& report, const FeatureIndex& index) {
    if (report.per_query_avg_precision.size() != index.entries.size())
        throw Error("csv: report does not match index");
    std::ostringstream out;
    out << "# fingerprint: " << report.fingerprint_hex << "\n";
    out << "query_id,path,label,avg_precision\n";
    out << std::setprecision(17);
    for (std::size_t q = 0; q < index.entries.size(); ++q) {
        const IndexEntry& e = index.entries[q];
        out << e.id << ',' << e.path << ',' << e.label << ','
            << report.per_query_avg_precision[q] << "\n";
    }
    return out.str();
}

} // namespace dbcr
