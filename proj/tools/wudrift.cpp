// wudrift: command-line front end for the navigation-clustering pipeline.
//
//   wudrift ingest    access log -> navigations.tsv + requests.tsv
//   wudrift features  navigations -> feature table + stats sidecar
//   wudrift synth     scenario -> synthetic feature table + ground truth
//   wudrift cluster   feature table -> results directory for one strategy
//   wudrift evaluate  two results directories (or one and a truth file) -> indices
//   wudrift report    several results directories -> CR / F-measure report
//
// Exit status 0 on success; otherwise a JSON error object on stderr and
// status 1 (runtime failure) or 2 (bad command line).

#include <cstdio>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wudrift/core.hpp"
#include "wudrift/error.hpp"
#include "wudrift/eval.hpp"
#include "wudrift/features.hpp"
#include "wudrift/ingest.hpp"
#include "wudrift/report.hpp"
#include "wudrift/strategies.hpp"
#include "wudrift/synth.hpp"
#include "wudrift/table_io.hpp"

namespace fs = std::filesystem;
using namespace wudrift;

namespace {

struct SharedOptions {
    std::string config_file;
    std::size_t k = 0, max_iter = 0, n_init = 0, threads = 0;
    std::uint64_t seed = 0;
    std::string granularity;
    CLI::Option* k_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;
    CLI::Option* n_init_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* granularity_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void add_shared(CLI::App* cmd, SharedOptions& opts) {
    cmd->add_option("--config", opts.config_file, "JSON run configuration (flags override it)")
        ->check(CLI::ExistingFile);
    opts.k_opt = cmd->add_option("--k", opts.k, "number of clusters (default 10)");
    opts.max_iter_opt = cmd->add_option("--max-iter", opts.max_iter, "maximum iterations (default 100)");
    opts.n_init_opt = cmd->add_option("--n-init", opts.n_init, "random initializations (default 100)");
    opts.seed_opt = cmd->add_option("--seed", opts.seed, "random seed (default 42)");
    opts.granularity_opt =
        cmd->add_option("--granularity", opts.granularity, "sub-period granularity: month|week|day (default month)");
    opts.threads_opt = cmd->add_option("--threads", opts.threads, "worker threads (default 1)");
}

struct Settings {
    ClusteringConfig clustering;
    Granularity granularity = Granularity::Month;
};

Granularity granularity_or_throw(const std::string& name) {
    auto g = parse_granularity(name);
    if (!g) throw Error("usage", "unknown granularity '" + name + "'");
    return *g;
}

Settings resolve(const SharedOptions& opts) {
    Settings s;
    if (!opts.config_file.empty()) {
        auto in = io::open_input(opts.config_file);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
            for (const auto& [key, _] : doc.items())
                if (key != "k" && key != "max_iterations" && key != "n_initializations" && key != "seed" &&
                    key != "granularity" && key != "threads")
                    throw Error("invalid_config", "unknown key '" + key + "' in " + opts.config_file);
            s.clustering.k = doc.value("k", s.clustering.k);
            s.clustering.max_iterations = doc.value("max_iterations", s.clustering.max_iterations);
            s.clustering.n_initializations = doc.value("n_initializations", s.clustering.n_initializations);
            s.clustering.seed = doc.value("seed", s.clustering.seed);
            s.clustering.threads = doc.value("threads", s.clustering.threads);
            if (doc.contains("granularity")) s.granularity = granularity_or_throw(doc["granularity"].get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw Error("invalid_config", "cannot read " + opts.config_file + ": " + e.what());
        }
    }
    if (opts.k_opt && opts.k_opt->count()) s.clustering.k = opts.k;
    if (opts.max_iter_opt && opts.max_iter_opt->count()) s.clustering.max_iterations = opts.max_iter;
    if (opts.n_init_opt && opts.n_init_opt->count()) s.clustering.n_initializations = opts.n_init;
    if (opts.seed_opt && opts.seed_opt->count()) s.clustering.seed = opts.seed;
    if (opts.threads_opt && opts.threads_opt->count()) s.clustering.threads = opts.threads;
    if (opts.granularity_opt && opts.granularity_opt->count()) s.granularity = granularity_or_throw(opts.granularity);
    s.clustering.validate();
    return s;
}

void check_labels(const std::vector<FeatureVector>& vectors, Granularity granularity) {
    static const std::map<Granularity, std::regex> kPatterns{
        {Granularity::Month, std::regex(R"(\d{4}-\d{2})")},
        {Granularity::Week, std::regex(R"(\d{4}-W\d{2})")},
        {Granularity::Day, std::regex(R"(\d{4}-\d{2}-\d{2})")}};
    const auto& pattern = kPatterns.at(granularity);
    for (const auto& fv : vectors)
        if (!std::regex_match(fv.sub_period, pattern))
            throw Error("granularity_mismatch", "sub-period label '" + fv.sub_period + "' is not a " +
                                                    std::string(to_string(granularity)) + " label");
}

void print_json(const nlohmann::ordered_json& doc) { std::cout << doc.dump(2) << '\n'; }

Partition read_truth(const fs::path& path, const std::string& label) {
    auto in = io::open_input(path);
    std::string line;
    std::getline(in, line);
    std::vector<std::size_t> labels;
    std::vector<std::uint64_t> items;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = io::split(line, '\t');
        if (f.size() != 3) throw Error("parse", "bad truth line: " + line);
        if (f[1] != label) continue;
        items.push_back(io::parse_uint(f[0]));
        labels.push_back(io::parse_uint(f[2]));
        count = std::max(count, labels.back() + 1);
    }
    return make_partition(std::move(labels), count, std::move(items));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concept-drift detection in web usage data by clustering over time sub-periods"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse an access log into filtered navigations");
    std::string log_path, log_format = "combined", ingest_out;
    std::int64_t timeout = kDefaultSessionTimeout;
    NavigationFilter filter;
    bool outliers = false;
    double outlier_quantile = 0.99;
    ingest->add_option("--log", log_path, "access log (plain or gzip)")->required()->check(CLI::ExistingFile);
    ingest->add_option("--format", log_format, "common|combined")->capture_default_str();
    ingest->add_option("--out", ingest_out, "output directory")->required();
    ingest->add_option("--timeout", timeout, "session timeout in seconds")->capture_default_str();
    ingest->add_option("--min-requests", filter.min_requests)->capture_default_str();
    ingest->add_option("--min-duration", filter.min_duration, "seconds")->capture_default_str();
    ingest->add_option("--min-ratio", filter.min_ratio, "seconds per request")->capture_default_str();
    ingest->add_flag("--drop-outliers", outliers, "drop navigations above the outlier quantile");
    ingest->add_option("--outlier-quantile", outlier_quantile)->capture_default_str();

    // features
    auto* features = app.add_subcommand("features", "compute the navigation descriptors");
    std::string nav_dir, semantic_file, features_out, scope_name = "global";
    bool raw = false;
    SharedOptions feature_opts;
    features->add_option("--navigations", nav_dir, "directory written by ingest")->required();
    features->add_option("--semantic", semantic_file, "URL patterns of the semantic structure")
        ->check(CLI::ExistingFile);
    features->add_option("--scope", scope_name, "standardization scope: global|per-sub-period")
        ->capture_default_str();
    features->add_flag("--raw", raw, "write unstandardized values");
    features->add_option("--out", features_out, "feature table path")->required();
    add_shared(features, feature_opts);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic drift stream");
    std::string scenario_file, preset, synth_out;
    SharedOptions synth_opts;
    synth->add_option("--scenario", scenario_file, "scenario JSON")->check(CLI::ExistingFile);
    synth->add_option("--preset", preset, "built-in scenario: birth");
    synth->add_option("--out", synth_out, "output directory")->required();
    add_shared(synth, synth_opts);

    // cluster
    auto* cluster = app.add_subcommand("cluster", "run one clustering strategy");
    std::string features_in, strategy_name, cluster_out, carry_name = "recomputed";
    SharedOptions cluster_opts;
    cluster->add_option("--features", features_in, "feature table")->required()->check(CLI::ExistingFile);
    cluster->add_option("--strategy", strategy_name, "global|independent|previous|dependent")
        ->required()
        ->check(CLI::IsMember({"global", "independent", "previous", "dependent"}));
    cluster->add_option("--carry", carry_name, "previous strategy: recomputed|first-period")
        ->capture_default_str()
        ->check(CLI::IsMember({"recomputed", "first-period"}));
    cluster->add_option("--out", cluster_out, "results directory")->required();
    add_shared(cluster, cluster_opts);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "compare two results directories period by period");
    std::string eval_a, eval_b, eval_truth, eval_out;
    evaluate->add_option("--a", eval_a, "results directory (a priori role)")->required();
    evaluate->add_option("--b", eval_b, "results directory (reached role)");
    evaluate->add_option("--truth", eval_truth, "ground-truth file from synth, used as the a priori role")
        ->check(CLI::ExistingFile);
    evaluate->add_option("--out", eval_out, "CSV output (stdout when omitted)");

    // report
    auto* report = app.add_subcommand("report", "compare strategies per sub-period");
    std::vector<std::string> report_inputs;
    std::string report_out;
    report->add_option("--results", report_inputs, "results directories")->required()->expected(1, -1);
    report->add_option("--out", report_out, "report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        nlohmann::ordered_json err{{"error", {{"code", "usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 2;
    }

    try {
        if (*ingest) {
            auto format = parse_log_format(log_format);
            if (!format) throw Error("usage", "unknown log format '" + log_format + "'");
            auto parsed = parse_log_file(log_path, *format);
            auto navs = sessionize(parsed.requests, timeout);
            const auto sessions = navs.size();
            navs = filter_navigations(std::move(navs), filter);
            const auto kept = navs.size();
            if (outliers) navs = drop_outliers(std::move(navs), outlier_quantile);
            write_navigations(navs, fs::path(ingest_out) / "navigations.tsv",
                              fs::path(ingest_out) / "requests.tsv");
            print_json({{"lines", parsed.lines},
                        {"requests", parsed.requests.size()},
                        {"malformed", parsed.malformed},
                        {"navigations", sessions},
                        {"after_filter", kept},
                        {"written", navs.size()}});
        } else if (*features) {
            const auto settings = resolve(feature_opts);
            auto scope = parse_scope(scope_name);
            if (!scope) throw Error("usage", "unknown scope '" + scope_name + "'");
            const auto navs = read_navigations(fs::path(nav_dir) / "navigations.tsv",
                                               fs::path(nav_dir) / "requests.tsv");
            const auto pages = semantic_file.empty() ? SemanticPages{} : SemanticPages::load(semantic_file);
            std::vector<FeatureVector> vectors;
            std::size_t flagged = 0;
            for (const auto& nav : navs) {
                vectors.push_back(compute_features(nav, pages, settings.granularity));
                flagged += vectors.back().no_successful_requests ? 1 : 0;
            }
            if (!raw) {
                auto [standardized, stats] = standardize(std::move(vectors), *scope);
                vectors = std::move(standardized);
                write_stats(features_out + ".stats.json", stats);
            }
            write_feature_table(features_out, vectors);
            print_json({{"navigations", vectors.size()},
                        {"no_successful_requests", flagged},
                        {"standardized", !raw}});
        } else if (*synth) {
            if (scenario_file.empty() == preset.empty())
                throw Error("usage", "synth needs exactly one of --scenario or --preset");
            DriftScenario scenario;
            if (!preset.empty()) {
                if (preset != "birth") throw Error("usage", "unknown preset '" + preset + "'");
                scenario = birth_scenario();
            } else {
                scenario = load_scenario(scenario_file);
            }
            if (synth_opts.seed_opt->count()) scenario.seed = synth_opts.seed;
            const auto data = generate(scenario);
            write_feature_table(fs::path(synth_out) / "features.tsv", data.vectors);
            write_truth(fs::path(synth_out) / "truth.tsv", data);
            print_json({{"points", data.vectors.size()}, {"periods", scenario.periods}, {"seed", scenario.seed}});
        } else if (*cluster) {
            const auto settings = resolve(cluster_opts);
            const auto vectors = read_feature_table(features_in);
            check_labels(vectors, settings.granularity);
            const auto data = TemporalDataset::from_features(vectors);
            const auto strategy = *parse_strategy(strategy_name);
            const auto carry = *parse_carry_mode(carry_name);
            const auto result = run_strategy(strategy, data, settings.clustering, carry);
            RunManifest manifest{settings.clustering, settings.granularity, carry,
                                 fs::path(features_in).filename().string()};
            write_strategy_result(cluster_out, result, manifest);
            print_json({{"strategy", strategy_name}, {"sub_periods", result.periods.size()},
                        {"navigations", data.total_size()}});
        } else if (*evaluate) {
            if (eval_b.empty() == eval_truth.empty())
                throw Error("usage", "evaluate needs exactly one of --b or --truth");
            const auto a = read_strategy_result(eval_a);
            std::optional<StrategyResult> b;
            if (!eval_b.empty()) b = read_strategy_result(eval_b);
            std::ostringstream csv;
            csv << "sub_period,cr,f_ab,f_ba\n";
            for (const auto& period : a.periods) {
                Partition other;
                if (b) {
                    const auto* match = b->find(period.label);
                    if (!match) throw Error("period_mismatch", "sub-period " + period.label + " missing from " + eval_b);
                    other = match->partition;
                } else {
                    other = read_truth(eval_truth, period.label);
                }
                // the truth plays the a priori role
                const Partition& apriori = b ? period.partition : other;
                const Partition& reached = b ? other : period.partition;
                csv << period.label << ',' << io::format_double(corrected_rand(apriori, reached)) << ','
                    << io::format_double(f_measure(apriori, reached).overall) << ','
                    << io::format_double(f_measure(reached, apriori).overall) << '\n';
            }
            if (eval_out.empty()) {
                std::cout << csv.str();
            } else {
                auto out = io::open_output(eval_out);
                out << csv.str();
            }
        } else if (*report) {
            std::vector<StrategyResult> results;
            for (const auto& dir : report_inputs) results.push_back(read_strategy_result(dir));
            const auto bundle = compare_strategies(results);
            write_report(report_out, bundle);
            print_json({{"strategies", bundle.strategies}, {"sub_periods", bundle.sub_periods.size()}});
        }
    } catch (const Error& e) {
        nlohmann::ordered_json err{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err{{"error", {{"code", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 1;
    }
    return 0;
}
