// dbcr — build, query and evaluate DBC/Haar/HOG feature indexes.
//
// Subcommands: index, query, evaluate, describe, info. Every run that
// writes artifacts also writes a manifest recording the exact effective
// configuration and its fingerprint.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbcr/descriptor.hpp"
#include "dbcr/evaluation.hpp"
#include "dbcr/image_io.hpp"
#include "dbcr/index.hpp"
#include "dbcr/parallel.hpp"
#include "dbcr/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitComparability = 4;

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_to_json(const dbcr::DescriptorConfig& config) {
    json j;
    std::istringstream in(dbcr::canonical_string(config));
    std::string line;
    std::getline(in, line); // header line
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw dbcr::IoError("cannot create " + path.string());
    out << text;
    if (!out) throw dbcr::IoError("write failed for " + path.string());
}

void write_manifest(const fs::path& path, const std::string& command,
                    const dbcr::DescriptorConfig& config,
                    const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
    json j;
    j["tool"] = "dbcr";
    j["tool_version"] = dbcr::kToolVersion;
    j["command"] = command;
    j["created_at"] = iso_timestamp();
    j["fingerprint"] = dbcr::fingerprint(config).hex();
    j["descriptor_config"] = config_to_json(config);
    j["outputs"] = outputs;
    for (auto& [key, value] : extra.items()) j[key] = value;
    write_text(path, j.dump(2) + "\n");
}

std::string rebuild_command_line(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

// Config resolution for commands that must match an existing index: an
// explicit --config wins, then the index's sidecar manifest, then defaults.
// The caller still verifies the fingerprint against the index header.
dbcr::DescriptorConfig resolve_config(const std::optional<std::string>& config_path,
                                      const fs::path& index_path) {
    if (config_path) return dbcr::load_config_file(*config_path);

    const fs::path manifest = index_path.string() + ".manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        json j;
        in >> j;
        std::string text = "dbcr-config-v1\n";
        for (auto& [key, value] : j.at("descriptor_config").items())
            text += key + "=" + value.get<std::string>() + "\n";
        return dbcr::parse_config_text(text);
    }
    return {};
}

struct DescribeFailure {
    std::string path;
    std::string reason;
};

int cmd_index(const std::string& dataset, const std::string& layout_name,
              const std::optional<std::string>& config_path,
              const std::string& out_path, bool skip_errors, int threads,
              const std::string& command_line) {
    const dbcr::DatasetLayout layout = dbcr::parse_layout(layout_name);
    const dbcr::DescriptorConfig config =
        config_path ? dbcr::load_config_file(*config_path) : dbcr::DescriptorConfig{};

    const auto listing = dbcr::ingest(dataset, layout);
    if (listing.empty()) {
        std::cerr << "error: no raster files found under " << dataset << "\n";
        return kExitData;
    }

    const std::size_t n = listing.size();
    std::vector<std::optional<dbcr::FeatureVector>> vectors(n);
    std::vector<std::optional<DescribeFailure>> failures(n);

    dbcr::parallel_for(n, threads, [&](std::size_t i) {
        try {
            vectors[i] = dbcr::describe(dbcr::load_image(listing[i].first), config);
        } catch (const dbcr::Error& e) {
            failures[i] = DescribeFailure{listing[i].first.string(), e.what()};
        }
    });

    std::size_t failed = 0;
    for (const auto& f : failures) {
        if (f) {
            ++failed;
            std::cerr << "error: " << f->path << ": " << f->reason << "\n";
        }
    }

    if (failed > 0 && !skip_errors) {
        std::cerr << failed << " of " << n
                  << " files failed; no index written (use --skip-errors to "
                     "keep the rest)\n";
        return kExitData;
    }

    dbcr::FeatureIndex index;
    index.fingerprint = dbcr::fingerprint(config);
    index.dim = static_cast<std::uint32_t>(dbcr::feature_dim(config));
    std::uint32_t next_id = 0;
    std::map<std::string, int> per_class;
    for (std::size_t i = 0; i < n; ++i) {
        if (!vectors[i]) continue;
        dbcr::IndexEntry entry;
        entry.id = next_id++;
        entry.path = listing[i].first.string();
        entry.label = listing[i].second;
        entry.vector = std::move(*vectors[i]);
        ++per_class[entry.label];
        index.entries.push_back(std::move(entry));
    }

    const fs::path out(out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    dbcr::save_index(index, out);
    write_manifest(out_path + ".manifest.json", command_line, config,
                   {out_path},
                   {{"entry_count", index.entries.size()},
                    {"dataset", dataset},
                    {"layout", layout_name}});

    std::cout << "indexed " << index.entries.size() << " images into "
              << out_path << "\n";
    std::cout << "fingerprint " << index.fingerprint.hex() << "\n";
    std::cout << "per-class counts:\n";
    for (const auto& [label, count] : per_class)
        std::cout << "  " << label << ": " << count << "\n";

    if (failed > 0) {
        std::cerr << failed << " of " << n << " files failed and were skipped\n";
        return kExitData;
    }
    return kExitOk;
}

int cmd_query(const std::string& image_path, const std::string& index_path,
              int k, const std::string& metric_name,
              const std::optional<std::string>& config_path, bool as_json) {
    const dbcr::Metric metric = dbcr::parse_metric(metric_name);
    const dbcr::FeatureIndex index = dbcr::load_index(index_path);
    const dbcr::DescriptorConfig config = resolve_config(config_path, index_path);

    const dbcr::Fingerprint config_fp = dbcr::fingerprint(config);
    if (!(config_fp == index.fingerprint)) {
        std::cerr << "error: config fingerprint does not match the index\n"
                  << "  config: " << config_fp.hex() << "\n"
                  << "  index:  " << index.fingerprint.hex() << "\n"
                  << "pass the config the index was built with via --config\n";
        return kExitComparability;
    }

    dbcr::FeatureVector query =
        dbcr::describe(dbcr::load_image(image_path), config);
    dbcr::RankedList ranked =
        dbcr::knn(query, index, static_cast<std::size_t>(k), metric);
    ranked.query = image_path;

    std::unordered_map<std::uint32_t, const dbcr::IndexEntry*> by_id;
    for (const dbcr::IndexEntry& e : index.entries) by_id[e.id] = &e;

    if (as_json) {
        json j;
        j["query"] = image_path;
        j["metric"] = metric_name;
        j["fingerprint"] = index.fingerprint.hex();
        json hits = json::array();
        for (std::size_t r = 0; r < ranked.hits.size(); ++r) {
            const dbcr::IndexEntry* e = by_id.at(ranked.hits[r].id);
            hits.push_back({{"rank", r + 1},
                            {"id", ranked.hits[r].id},
                            {"label", e->label},
                            {"path", e->path},
                            {"distance", ranked.hits[r].distance}});
        }
        j["hits"] = hits;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << std::left << std::setw(6) << "rank" << std::setw(8) << "id"
                  << std::setw(16) << "label" << std::setw(12) << "distance"
                  << "path" << "\n";
        std::cout << std::setprecision(6);
        for (std::size_t r = 0; r < ranked.hits.size(); ++r) {
            const dbcr::IndexEntry* e = by_id.at(ranked.hits[r].id);
            std::cout << std::left << std::setw(6) << r + 1 << std::setw(8)
                      << ranked.hits[r].id << std::setw(16) << e->label
                      << std::setw(12) << ranked.hits[r].distance << e->path
                      << "\n";
        }
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& index_path, int k, int window,
                 const std::string& metric_name, bool include_self,
                 bool all_metrics, const std::optional<std::string>& report_path,
                 const std::optional<std::string>& config_path, int threads,
                 const std::string& command_line) {
    const dbcr::FeatureIndex index = dbcr::load_index(index_path);

    dbcr::EvalConfig eval;
    eval.k = k;
    eval.rank_window = window;
    eval.include_self = include_self;
    eval.metric = dbcr::parse_metric(metric_name);

    std::vector<dbcr::Metric> metrics;
    if (all_metrics)
        metrics = {dbcr::Metric::l1, dbcr::Metric::l2, dbcr::Metric::canberra,
                   dbcr::Metric::chi_square};
    else
        metrics = {eval.metric};

    std::vector<dbcr::EvalReport> reports;
    for (dbcr::Metric m : metrics) {
        dbcr::EvalConfig run = eval;
        run.metric = m;
        reports.push_back(dbcr::run_benchmark(index, run, threads));
    }

    for (const dbcr::EvalReport& r : reports) {
        std::cout << report_to_text(r) << "\n";
    }
    if (all_metrics) {
        std::cout << "Comparison across distance measures:\n";
        std::cout << std::left << std::setw(12) << "Metric" << std::right
                  << std::setw(16) << "AvgPrecision" << std::setw(16)
                  << "Precision@" + std::to_string(k) << std::setw(16)
                  << "RetrievalRate%" << std::setw(14) << "s/100" << "\n";
        std::cout << std::fixed;
        for (const dbcr::EvalReport& r : reports) {
            std::cout << std::left << std::setw(12)
                      << dbcr::metric_name(r.config.metric) << std::right
                      << std::setw(16) << std::setprecision(4)
                      << r.overall_avg_precision << std::setw(16)
                      << r.overall_precision_at_k << std::setw(16)
                      << std::setprecision(1) << r.retrieval_rate_percent
                      << std::setw(14) << std::setprecision(3)
                      << r.seconds_per_100_queries << "\n";
        }
    }

    if (report_path) {
        std::string base = *report_path;
        if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
            base = base.substr(0, base.size() - 5);

        std::vector<std::string> outputs;
        for (const dbcr::EvalReport& r : reports) {
            const std::string suffix =
                all_metrics ? "." + dbcr::metric_name(r.config.metric) : "";
            const std::string json_path = base + suffix + ".json";
            const std::string text_path = base + suffix + ".txt";
            const std::string csv_path = base + suffix + ".csv";
            write_text(json_path, report_to_json(r) + "\n");
            write_text(text_path, report_to_text(r));
            write_text(csv_path, report_to_csv(r, index));
            outputs.insert(outputs.end(), {json_path, text_path, csv_path});
        }

        const dbcr::DescriptorConfig config = resolve_config(config_path, index_path);
        if (dbcr::fingerprint(config) == index.fingerprint) {
            write_manifest(base + ".manifest.json", command_line, config, outputs,
                           {{"index", index_path},
                            {"k", k},
                            {"rank_window", window},
                            {"include_self", include_self}});
        }
        std::cout << "reports written under " << base << ".*\n";
    }
    return kExitOk;
}

int cmd_describe(const std::string& image_path,
                 const std::optional<std::string>& config_path,
                 const std::optional<std::string>& out_path) {
    const dbcr::DescriptorConfig config =
        config_path ? dbcr::load_config_file(*config_path) : dbcr::DescriptorConfig{};
    const dbcr::FeatureVector fv =
        dbcr::describe(dbcr::load_image(image_path), config);

    json j;
    j["path"] = image_path;
    j["fingerprint"] = fv.fingerprint.hex();
    j["dim"] = fv.dim();
    j["values"] = fv.values;
    const std::string text = j.dump() + "\n";
    if (out_path)
        write_text(*out_path, text);
    else
        std::cout << text;
    return kExitOk;
}

int cmd_info(const std::string& index_path) {
    const dbcr::FeatureIndex index = dbcr::load_index(index_path);
    std::cout << "format version: " << dbcr::kIndexFormatVersion << "\n";
    std::cout << "fingerprint:    " << index.fingerprint.hex() << "\n";
    std::cout << "dim:            " << index.dim << "\n";
    std::cout << "entries:        " << index.entries.size() << "\n";
    std::map<std::string, int> per_class;
    for (const dbcr::IndexEntry& e : index.entries) ++per_class[e.label];
    std::cout << "classes:        " << per_class.size() << "\n";
    for (const auto& [label, count] : per_class)
        std::cout << "  " << label << ": " << count << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dbcr — directional binary code image retrieval toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dbcr::kToolVersion);

    const std::string command_line = rebuild_command_line(argc, argv);

    // index
    auto* sc_index = app.add_subcommand("index", "describe a dataset and write an index");
    std::string ds_dir, layout = "classdirs", out_path;
    std::optional<std::string> config_path;
    bool skip_errors = false;
    int threads = 0;
    sc_index->add_option("dataset", ds_dir, "dataset root directory")->required();
    sc_index->add_option("--layout", layout, "dataset layout: classdirs|wang")
        ->check(CLI::IsMember({"classdirs", "wang"}));
    sc_index->add_option("--config", config_path, "descriptor config file");
    sc_index->add_option("--out", out_path, "output index path")->required();
    sc_index->add_flag("--skip-errors", skip_errors,
                       "write a partial index when some files fail");
    sc_index->add_option("--threads", threads, "worker threads (0 = auto)")
        ->envname("DBCR_THREADS");

    // query
    auto* sc_query = app.add_subcommand("query", "rank an index against one image");
    std::string q_image, q_index, metric = "l2";
    int k = 20;
    bool as_json = false;
    std::optional<std::string> q_config;
    sc_query->add_option("image", q_image, "query image")->required();
    sc_query->add_option("index", q_index, "index file")->required();
    sc_query->add_option("--k", k, "number of results");
    sc_query->add_option("--metric", metric, "distance: l1|l2|canberra|chi2")
        ->check(CLI::IsMember({"l1", "l2", "canberra", "chi2"}));
    sc_query->add_option("--config", q_config,
                         "descriptor config (default: index sidecar manifest)");
    sc_query->add_flag("--json", as_json, "emit JSON instead of a table");

    // evaluate
    auto* sc_eval = app.add_subcommand("evaluate", "benchmark an index against itself");
    std::string e_index, e_metric = "l2";
    int e_k = 20, e_window = 100, e_threads = 0;
    bool all_metrics = false, exclude_self = false;
    std::optional<std::string> report_path, e_config;
    sc_eval->add_option("index", e_index, "index file")->required();
    sc_eval->add_option("--k", e_k, "retrieved-set size");
    sc_eval->add_option("--window", e_window, "rank window for average precision");
    sc_eval->add_option("--metric", e_metric, "distance: l1|l2|canberra|chi2")
        ->check(CLI::IsMember({"l1", "l2", "canberra", "chi2"}));
    sc_eval->add_flag("--all-metrics", all_metrics, "run all four distances");
    sc_eval->add_flag("--exclude-self", exclude_self,
                      "drop the query itself from its ranking");
    sc_eval->add_option("--report", report_path,
                        "report base path (writes .json/.txt/.csv)");
    sc_eval->add_option("--config", e_config, "descriptor config for the manifest");
    sc_eval->add_option("--threads", e_threads, "worker threads (0 = auto)")
        ->envname("DBCR_THREADS");

    // describe
    auto* sc_desc = app.add_subcommand("describe", "print one image's feature vector");
    std::string d_image;
    std::optional<std::string> d_config, d_out;
    sc_desc->add_option("image", d_image, "image file")->required();
    sc_desc->add_option("--config", d_config, "descriptor config file");
    sc_desc->add_option("--out", d_out, "write JSON here instead of stdout");

    // info
    auto* sc_info = app.add_subcommand("info", "print an index header");
    std::string i_index;
    sc_info->add_option("index", i_index, "index file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sc_index->parsed())
            return cmd_index(ds_dir, layout, config_path, out_path, skip_errors,
                             threads, command_line);
        if (sc_query->parsed())
            return cmd_query(q_image, q_index, k, metric, q_config, as_json);
        if (sc_eval->parsed())
            return cmd_evaluate(e_index, e_k, e_window, e_metric, !exclude_self,
                                all_metrics, report_path, e_config, e_threads,
                                command_line);
        if (sc_desc->parsed()) return cmd_describe(d_image, d_config, d_out);
        if (sc_info->parsed()) return cmd_info(i_index);
    } catch (const dbcr::ComparabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComparability;
    } catch (const dbcr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dbcr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
