#include "wudrift/strategies.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "wudrift/error.hpp"
#include "wudrift/table_io.hpp"

namespace wudrift {

TemporalDataset::TemporalDataset(std::vector<SubPeriodData> periods) : periods_(std::move(periods)) {
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < periods_.size(); ++i) {
        const auto& p = periods_[i];
        if (i > 0 && !(periods_[i - 1].label < p.label))
            throw Error("invalid_dataset", "sub-period labels must be strictly increasing at '" +
                                               p.label + "'");
        if (p.ids.empty()) throw Error("invalid_dataset", "sub-period '" + p.label + "' is empty");
        if (p.ids.size() != p.points.rows())
            throw Error("invalid_dataset", "sub-period '" + p.label + "' id/point count mismatch");
        if (p.points.cols() != periods_.front().points.cols())
            throw Error("dimension_mismatch", "sub-period '" + p.label + "' has another dimension");
        for (auto id : p.ids)
            if (!seen.insert(id).second)
                throw Error("invalid_dataset", "navigation " + std::to_string(id) +
                                                   " appears more than once");
    }
}

TemporalDataset TemporalDataset::from_features(std::span<const FeatureVector> vectors) {
    std::map<std::string, SubPeriodData> grouped;
    for (const auto& fv : vectors) {
        auto& period = grouped[fv.sub_period];
        period.label = fv.sub_period;
        period.ids.push_back(fv.nav_id);
        period.points.append_row(fv.values);
    }
    std::vector<SubPeriodData> periods;
    for (auto& [label, data] : grouped) periods.push_back(std::move(data));
    return TemporalDataset(std::move(periods));
}

std::vector<std::string> TemporalDataset::labels() const {
    std::vector<std::string> out;
    for (const auto& p : periods_) out.push_back(p.label);
    return out;
}

std::size_t TemporalDataset::total_size() const {
    std::size_t n = 0;
    for (const auto& p : periods_) n += p.size();
    return n;
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::Global: return "global";
        case Strategy::Independent: return "independent";
        case Strategy::Previous: return "previous";
        case Strategy::Dependent: return "dependent";
    }
    return "global";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (auto s : kAllStrategies)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

std::string_view to_string(CarryMode mode) {
    return mode == CarryMode::Recomputed ? "recomputed" : "first-period";
}

std::optional<CarryMode> parse_carry_mode(std::string_view name) {
    if (name == "recomputed") return CarryMode::Recomputed;
    if (name == "first-period") return CarryMode::FirstPeriod;
    return std::nullopt;
}

const PeriodResult* StrategyResult::find(std::string_view label) const {
    for (const auto& p : periods)
        if (p.label == label) return &p;
    return nullptr;
}

namespace {

void require_points(const SubPeriodData& period, const ClusteringConfig& config) {
    if (period.size() < config.k)
        throw Error("undersized_period", "sub-period '" + period.label + "' has " +
                                             std::to_string(period.size()) +
                                             " navigations, fewer than k = " +
                                             std::to_string(config.k));
}

void require_periods(const TemporalDataset& data) {
    if (data.periods().empty()) throw Error("invalid_dataset", "dataset has no sub-periods");
}

PeriodResult from_run(const SubPeriodData& period, RunResult run) {
    PeriodResult out;
    out.label = period.label;
    out.partition = std::move(run.partition);
    out.partition.items = period.ids;
    out.prototypes = std::move(run.prototypes);
    out.iterations = run.iterations;
    out.allocation_inertia = run.inertia_trace.front();
    return out;
}

}  // namespace

StrategyResult global_strategy(const TemporalDataset& data, const ClusteringConfig& config) {
    require_periods(data);
    Matrix all;
    for (const auto& period : data.periods())
        for (std::size_t i = 0; i < period.size(); ++i) all.append_row(period.points.row(i));
    if (all.rows() < config.k)
        throw Error("too_few_points", "dataset has " + std::to_string(all.rows()) +
                                          " navigations, fewer than k = " + std::to_string(config.k));
    const auto global = best_of(all, config);

    StrategyResult result{Strategy::Global, {}};
    std::size_t offset = 0;
    for (const auto& period : data.periods()) {
        std::vector<std::size_t> labels(global.partition.labels.begin() + offset,
                                        global.partition.labels.begin() + offset + period.size());
        PeriodResult pr;
        pr.label = period.label;
        pr.partition = make_partition(std::move(labels), config.k, period.ids);
        for (std::size_t i = 0; i < period.size(); ++i)
            pr.partition.inertia += squared_distance(
                period.points.row(i), global.prototypes.centers.row(pr.partition.labels[i]));
        pr.prototypes = global.prototypes;
        pr.iterations = global.iterations;
        pr.allocation_inertia = pr.partition.inertia;
        result.periods.push_back(std::move(pr));
        offset += period.size();
    }
    return result;
}

StrategyResult independent_local_strategy(const TemporalDataset& data, const ClusteringConfig& config) {
    require_periods(data);
    for (const auto& period : data.periods()) require_points(period, config);
    StrategyResult result{Strategy::Independent, {}};
    // Every period uses the same seed, so a period's result never depends on
    // its position in the sequence.
    for (const auto& period : data.periods())
        result.periods.push_back(from_run(period, best_of(period.points, config)));
    return result;
}

StrategyResult previous_local_strategy(const TemporalDataset& data, const ClusteringConfig& config,
                                       CarryMode carry) {
    require_periods(data);
    const auto& periods = data.periods();
    require_points(periods.front(), config);

    StrategyResult result{Strategy::Previous, {}};
    result.periods.push_back(from_run(periods.front(), best_of(periods.front().points, config)));
    const Prototypes first = result.periods.front().prototypes;
    Prototypes carried = first;

    for (std::size_t t = 1; t < periods.size(); ++t) {
        const auto& period = periods[t];
        PeriodResult pr;
        pr.label = period.label;
        pr.partition = allocate(period.points, carried);
        pr.partition.items = period.ids;
        pr.prototypes = represent(period.points, pr.partition, carried);
        pr.iterations = 0;
        pr.allocation_inertia = pr.partition.inertia;
        carried = carry == CarryMode::Recomputed ? pr.prototypes : first;
        result.periods.push_back(std::move(pr));
    }
    return result;
}

StrategyResult dependent_local_strategy(const TemporalDataset& data, const ClusteringConfig& config) {
    require_periods(data);
    const auto& periods = data.periods();
    require_points(periods.front(), config);

    StrategyResult result{Strategy::Dependent, {}};
    result.periods.push_back(from_run(periods.front(), best_of(periods.front().points, config)));

    ClusteringConfig seeded = config;
    seeded.n_initializations = 1;
    for (std::size_t t = 1; t < periods.size(); ++t) {
        const auto& carried = result.periods.back().prototypes;
        result.periods.push_back(from_run(periods[t], run(periods[t].points, seeded, carried)));
    }
    return result;
}

StrategyResult run_strategy(Strategy strategy, const TemporalDataset& data,
                            const ClusteringConfig& config, CarryMode carry) {
    switch (strategy) {
        case Strategy::Global: return global_strategy(data, config);
        case Strategy::Independent: return independent_local_strategy(data, config);
        case Strategy::Previous: return previous_local_strategy(data, config, carry);
        case Strategy::Dependent: return dependent_local_strategy(data, config);
    }
    throw Error("invalid_argument", "unknown strategy");
}

Partition concatenate(const StrategyResult& result) {
    Partition out;
    for (const auto& p : result.periods) {
        out.cluster_count = std::max(out.cluster_count, p.partition.cluster_count);
        out.items.insert(out.items.end(), p.partition.items.begin(), p.partition.items.end());
        out.labels.insert(out.labels.end(), p.partition.labels.begin(), p.partition.labels.end());
        out.inertia += p.partition.inertia;
    }
    out.sizes.assign(out.cluster_count, 0);
    for (auto l : out.labels) ++out.sizes[l];
    return out;
}

namespace {

std::string period_file(std::string_view label, std::string_view suffix) {
    return std::string(label) + std::string(suffix);
}

std::string variable_name(std::size_t index, std::size_t dimension) {
    if (dimension == kFeatureCount) return std::string(kFeatureNames[index]);
    return "x" + std::to_string(index);
}

}  // namespace

void write_strategy_result(const std::filesystem::path& dir, const StrategyResult& result,
                           const RunManifest& manifest) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json doc;
    doc["strategy"] = to_string(result.strategy);
    doc["config"] = {{"k", manifest.config.k},
                     {"max_iterations", manifest.config.max_iterations},
                     {"n_initializations", manifest.config.n_initializations},
                     {"seed", manifest.config.seed},
                     {"distance", "euclidean"},
                     {"convergence", "assignments-unchanged"},
                     {"initialization", "random-data-points"}};
    doc["granularity"] = to_string(manifest.granularity);
    if (result.strategy == Strategy::Previous) doc["carry"] = to_string(manifest.carry);
    doc["input"] = manifest.input;
    doc["sub_periods"] = nlohmann::ordered_json::array();

    for (const auto& p : result.periods) {
        std::vector<std::size_t> empty;
        for (std::size_t c = 0; c < p.prototypes.k(); ++c)
            if (p.prototypes.empty[c]) empty.push_back(c);
        doc["sub_periods"].push_back({{"label", p.label},
                                      {"items", p.partition.size()},
                                      {"iterations", p.iterations},
                                      {"inertia", p.partition.inertia},
                                      {"allocation_inertia", p.allocation_inertia},
                                      {"empty_clusters", empty}});

        auto part = io::open_output(dir / period_file(p.label, ".partition.tsv"));
        part << "nav_id\tsub_period\tcluster\n";
        for (std::size_t i = 0; i < p.partition.size(); ++i)
            part << p.partition.items[i] << '\t' << p.label << '\t' << p.partition.labels[i] << '\n';

        auto protos = io::open_output(dir / period_file(p.label, ".prototypes.tsv"));
        const auto dim = p.prototypes.dimension();
        protos << "cluster\tempty";
        for (std::size_t j = 0; j < dim; ++j) protos << '\t' << variable_name(j, dim);
        protos << '\n';
        for (std::size_t c = 0; c < p.prototypes.k(); ++c) {
            protos << c << '\t' << (p.prototypes.empty[c] ? 1 : 0);
            for (double v : p.prototypes.centers.row(c)) protos << '\t' << io::format_double(v);
            protos << '\n';
        }
        if (!part || !protos) throw Error("io", "failed writing results for " + p.label);
    }
    auto out = io::open_output(dir / "manifest.json");
    out << doc.dump(2) << '\n';
}

namespace {

nlohmann::json load_manifest_json(const std::filesystem::path& dir) {
    auto in = io::open_input(dir / "manifest.json");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("parse", "invalid manifest in " + dir.string() + ": " + e.what());
    }
}

}  // namespace

RunManifest read_manifest(const std::filesystem::path& dir) {
    const auto doc = load_manifest_json(dir);
    try {
        RunManifest m;
        const auto& cfg = doc.at("config");
        m.config.k = cfg.at("k").get<std::size_t>();
        m.config.max_iterations = cfg.at("max_iterations").get<std::size_t>();
        m.config.n_initializations = cfg.at("n_initializations").get<std::size_t>();
        m.config.seed = cfg.at("seed").get<std::uint64_t>();
        auto granularity = parse_granularity(doc.at("granularity").get<std::string>());
        if (!granularity) throw Error("parse", "unknown granularity in manifest");
        m.granularity = *granularity;
        if (doc.contains("carry")) {
            auto carry = parse_carry_mode(doc.at("carry").get<std::string>());
            if (!carry) throw Error("parse", "unknown carry mode in manifest");
            m.carry = *carry;
        }
        m.input = doc.value("input", "");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error("parse", "incomplete manifest in " + dir.string() + ": " + e.what());
    }
}

StrategyResult read_strategy_result(const std::filesystem::path& dir) {
    const auto doc = load_manifest_json(dir);
    const auto manifest = read_manifest(dir);
    StrategyResult result;
    auto strategy = parse_strategy(doc.at("strategy").get<std::string>());
    if (!strategy) throw Error("parse", "unknown strategy in manifest " + dir.string());
    result.strategy = *strategy;

    std::string line;
    for (const auto& entry : doc.at("sub_periods")) {
        PeriodResult p;
        p.label = entry.at("label").get<std::string>();
        p.iterations = entry.at("iterations").get<std::size_t>();
        p.allocation_inertia = entry.at("allocation_inertia").get<double>();

        auto part = io::open_input(dir / period_file(p.label, ".partition.tsv"));
        std::getline(part, line);
        std::vector<std::size_t> labels;
        std::vector<std::uint64_t> items;
        while (std::getline(part, line)) {
            if (line.empty()) continue;
            auto fields = io::split(line, '\t');
            if (fields.size() != 3 || fields[1] != p.label)
                throw Error("parse", "bad partition line in " + p.label + ": " + line);
            items.push_back(io::parse_uint(fields[0]));
            labels.push_back(io::parse_uint(fields[2]));
        }
        p.partition = make_partition(std::move(labels), manifest.config.k, std::move(items));
        p.partition.inertia = entry.at("inertia").get<double>();

        auto protos = io::open_input(dir / period_file(p.label, ".prototypes.tsv"));
        std::getline(protos, line);
        while (std::getline(protos, line)) {
            if (line.empty()) continue;
            auto fields = io::split(line, '\t');
            if (fields.size() < 3) throw Error("parse", "bad prototype line in " + p.label);
            std::vector<double> values;
            for (std::size_t j = 2; j < fields.size(); ++j) values.push_back(io::parse_double(fields[j]));
            p.prototypes.centers.append_row(values);
            p.prototypes.empty.push_back(fields[1] == "1");
        }
        result.periods.push_back(std::move(p));
    }
    return result;
}

}  // namespace wudrift
