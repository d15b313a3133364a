#include "wudrift/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "wudrift/error.hpp"
#include "wudrift/table_io.hpp"

namespace wudrift {

Summary summarize(std::vector<double> values) {
    if (values.empty()) throw Error("invalid_argument", "cannot summarize an empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    Summary s;
    s.count = values.size();
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    return s;
}

double ReportBundle::cr_value(const std::string& sub_period, const std::string& a,
                              const std::string& b) const {
    for (const auto& e : cr)
        if (e.sub_period == sub_period &&
            ((e.first == a && e.second == b) || (e.first == b && e.second == a)))
            return e.value;
    throw Error("invalid_argument", "no CR entry for " + a + "/" + b + " in " + sub_period);
}

const FEntry* ReportBundle::f_entry(const std::string& sub_period, const std::string& apriori,
                                    const std::string& reached) const {
    for (const auto& e : f)
        if (e.sub_period == sub_period && e.apriori == apriori && e.reached == reached) return &e;
    return nullptr;
}

ReportBundle compare_strategies(const std::vector<StrategyResult>& results) {
    ReportBundle bundle;
    if (results.empty()) return bundle;

    std::map<std::string, int> seen;
    for (const auto& r : results) {
        std::string name(to_string(r.strategy));
        if (int n = ++seen[name]; n > 1) name += "#" + std::to_string(n);
        bundle.strategies.push_back(name);
    }
    for (const auto& p : results.front().periods) bundle.sub_periods.push_back(p.label);
    for (std::size_t s = 1; s < results.size(); ++s) {
        std::vector<std::string> labels;
        for (const auto& p : results[s].periods) labels.push_back(p.label);
        if (labels != bundle.sub_periods)
            throw Error("period_mismatch", "strategy " + bundle.strategies[s] +
                                               " covers different sub-periods than " +
                                               bundle.strategies.front());
    }

    const auto& names = bundle.strategies;
    for (std::size_t t = 0; t < bundle.sub_periods.size(); ++t) {
        const auto& label = bundle.sub_periods[t];
        for (std::size_t a = 0; a < results.size(); ++a)
            for (std::size_t b = 0; b < results.size(); ++b) {
                if (a == b) continue;
                const auto table = contingency(results[a].periods[t].partition,
                                               results[b].periods[t].partition);
                if (a < b) bundle.cr.push_back({label, names[a], names[b], corrected_rand(table)});
                bundle.f.push_back({label, names[a], names[b], f_measure(table)});
            }
    }

    for (std::size_t a = 0; a < names.size(); ++a)
        for (std::size_t b = a + 1; b < names.size(); ++b) {
            std::vector<double> values;
            for (const auto& e : bundle.cr)
                if (e.first == names[a] && e.second == names[b]) values.push_back(e.value);
            if (!values.empty()) bundle.cr_summary.push_back({names[a], names[b], summarize(values)});
        }
    for (const auto& e : bundle.f) {
        std::vector<double> values;
        for (const auto& c : e.result.clusters) values.push_back(c.f);
        bundle.f_summary.push_back({e.sub_period, e.apriori, e.reached, summarize(values)});
    }
    return bundle;
}

namespace {

nlohmann::ordered_json to_json(const Summary& s) {
    return {{"count", s.count}, {"min", s.min},   {"q1", s.q1},    {"median", s.median},
            {"q3", s.q3},       {"max", s.max},   {"mean", s.mean}};
}

}  // namespace

void write_report(const std::filesystem::path& dir, const ReportBundle& bundle) {
    std::filesystem::create_directories(dir);
    using io::format_double;

    auto cr = io::open_output(dir / "cr.csv");
    cr << "sub_period,strategy_a,strategy_b,cr\n";
    for (const auto& e : bundle.cr)
        cr << e.sub_period << ',' << e.first << ',' << e.second << ',' << format_double(e.value) << '\n';

    auto matrix = io::open_output(dir / "cr_matrix.csv");
    matrix << "sub_period,strategy";
    for (const auto& name : bundle.strategies) matrix << ',' << name;
    matrix << '\n';
    for (const auto& label : bundle.sub_periods)
        for (const auto& row : bundle.strategies) {
            matrix << label << ',' << row;
            for (const auto& col : bundle.strategies)
                matrix << ',' << format_double(row == col ? 1.0 : bundle.cr_value(label, row, col));
            matrix << '\n';
        }

    auto fm = io::open_output(dir / "f_measure.csv");
    fm << "sub_period,apriori,reached,cluster,size,best_match,f\n";
    for (const auto& e : bundle.f)
        for (const auto& c : e.result.clusters)
            fm << e.sub_period << ',' << e.apriori << ',' << e.reached << ',' << c.cluster << ','
               << c.size << ',' << c.best_match << ',' << format_double(c.f) << '\n';

    nlohmann::ordered_json doc;
    doc["strategies"] = bundle.strategies;
    doc["sub_periods"] = bundle.sub_periods;
    doc["cr"] = nlohmann::ordered_json::array();
    for (const auto& s : bundle.cr_summary)
        doc["cr"].push_back({{"strategy_a", s.first}, {"strategy_b", s.second}, {"summary", to_json(s.summary)}});
    doc["f_measure"] = nlohmann::ordered_json::array();
    for (const auto& e : bundle.f) {
        const auto it = std::find_if(bundle.f_summary.begin(), bundle.f_summary.end(), [&](const FSummary& s) {
            return s.sub_period == e.sub_period && s.apriori == e.apriori && s.reached == e.reached;
        });
        doc["f_measure"].push_back({{"sub_period", e.sub_period},
                                    {"apriori", e.apriori},
                                    {"reached", e.reached},
                                    {"overall", e.result.overall},
                                    {"per_cluster", to_json(it->summary)}});
    }
    auto summary = io::open_output(dir / "summary.json");
    summary << doc.dump(2) << '\n';
    if (!cr || !matrix || !fm || !summary) throw Error("io", "failed writing report to " + dir.string());
}

}  // namespace wudrift
