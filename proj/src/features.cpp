#include "wudrift/features.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "wudrift/error.hpp"
#include "wudrift/table_io.hpp"

namespace wudrift {

SemanticPages SemanticPages::load(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    std::vector<std::string> patterns;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        patterns.push_back(line);
    }
    return SemanticPages(std::move(patterns));
}

bool SemanticPages::matches(std::string_view resource) const {
    const std::string subject(resource);
    return std::any_of(patterns_.begin(), patterns_.end(), [&](const std::string& pattern) {
        return fnmatch(pattern.c_str(), subject.c_str(), 0) == 0;
    });
}

std::optional<Granularity> parse_granularity(std::string_view name) {
    if (name == "month") return Granularity::Month;
    if (name == "week") return Granularity::Week;
    if (name == "day") return Granularity::Day;
    return std::nullopt;
}

std::string_view to_string(Granularity granularity) {
    switch (granularity) {
        case Granularity::Month: return "month";
        case Granularity::Week: return "week";
        case Granularity::Day: return "day";
    }
    return "month";
}

std::string sub_period_label(Timestamp ts, Granularity granularity) {
    using namespace std::chrono;
    const auto day_number = static_cast<int>(ts >= 0 ? ts / 86400 : (ts - 86399) / 86400);
    const sys_days day{days{day_number}};
    const year_month_day ymd{day};
    char buf[32];
    switch (granularity) {
        case Granularity::Month:
            std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()));
            break;
        case Granularity::Day:
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            break;
        case Granularity::Week: {
            // ISO 8601: the week belongs to the year holding its Thursday.
            const unsigned iso_weekday = weekday{day}.iso_encoding();
            const sys_days thursday = day - days{iso_weekday - 1} + days{3};
            const year iso_year = year_month_day{thursday}.year();
            const sys_days jan1{iso_year / January / 1};
            const int week = static_cast<int>((thursday - jan1).count() / 7 + 1);
            std::snprintf(buf, sizeof buf, "%04d-W%02d", static_cast<int>(iso_year), week);
            break;
        }
    }
    return buf;
}

FeatureVector compute_features(const Navigation& nav, const SemanticPages& semantic_pages,
                               Granularity granularity) {
    if (nav.requests.empty()) throw Error("invalid_argument", "navigation has no requests");

    const auto& reqs = nav.requests;
    const double count = static_cast<double>(reqs.size());
    double ok = 0, semantic = 0, total_size = 0, ok_duration = 0, max_ok_duration = 0;
    std::set<std::string_view> distinct;
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        const auto& req = reqs[i];
        const double duration =
            i + 1 < reqs.size() ? static_cast<double>(reqs[i + 1].timestamp - req.timestamp) : 0.0;
        if (req.status == 200) {
            ok += 1;
            ok_duration += duration;
            max_ok_duration = std::max(max_ok_duration, duration);
        }
        if (semantic_pages.matches(req.resource)) semantic += 1;
        total_size += static_cast<double>(req.bytes);
        distinct.insert(req.resource);
    }
    const double repetitions = count - static_cast<double>(distinct.size());
    const double total_duration = static_cast<double>(nav.duration());

    FeatureVector out;
    out.nav_id = nav.id;
    out.sub_period = assign_sub_period(nav, granularity);
    out.no_successful_requests = ok == 0;
    auto& v = out.values;
    v[kNbRequestsOk] = ok;
    v[kNbRequestsBad] = count - ok;
    v[kPRequestsOk] = ok / count;
    v[kNbRepetitions] = repetitions;
    v[kPRepetitions] = repetitions / count;
    v[kTotalDuration] = total_duration;
    v[kAvDuration] = total_duration / count;
    v[kAvDurationOk] = ok > 0 ? ok_duration / ok : 0.0;
    v[kNbRequestsSem] = semantic;
    v[kPRequestsSem] = semantic / count;
    v[kTotalSize] = total_size;
    v[kAvTotalSize] = ok > 0 ? total_size / ok : 0.0;
    v[kMaxDurationOk] = max_ok_duration;
    return out;
}

std::optional<StandardizationScope> parse_scope(std::string_view name) {
    if (name == "global") return StandardizationScope::Global;
    if (name == "per-sub-period" || name == "per-period") return StandardizationScope::PerSubPeriod;
    return std::nullopt;
}

std::string_view to_string(StandardizationScope scope) {
    return scope == StandardizationScope::Global ? "global" : "per-sub-period";
}

std::pair<std::vector<FeatureVector>, StandardizationStats> standardize(
    std::vector<FeatureVector> vectors, StandardizationScope scope) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        groups[scope == StandardizationScope::Global ? std::string("*") : vectors[i].sub_period]
            .push_back(i);
    if (groups.empty()) throw Error("undersized_group", "no vectors to standardize");

    StandardizationStats stats;
    stats.scope = scope;
    for (const auto& [label, members] : groups) {
        if (members.size() < 2)
            throw Error("undersized_group",
                        "standardization group '" + label + "' has fewer than 2 vectors");
        GroupStats g;
        g.label = label;
        g.count = members.size();
        const double n = static_cast<double>(members.size());
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const double first = vectors[members.front()].values[f];
            bool constant = true;
            double sum = 0.0;
            for (auto i : members) {
                sum += vectors[i].values[f];
                constant = constant && vectors[i].values[f] == first;
            }
            const double mean = sum / n;
            double squares = 0.0;
            for (auto i : members) {
                const double d = vectors[i].values[f] - mean;
                squares += d * d;
            }
            g.mean[f] = constant ? first : mean;
            g.stddev[f] = constant ? 0.0 : std::sqrt(squares / n);
            g.constant[f] = constant || g.stddev[f] == 0.0;
        }
        for (auto i : members)
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                auto& x = vectors[i].values[f];
                x = g.constant[f] ? 0.0 : (x - g.mean[f]) / g.stddev[f];
            }
        stats.groups.push_back(std::move(g));
    }
    return {std::move(vectors), std::move(stats)};
}

void write_feature_table(const std::filesystem::path& path, std::span<const FeatureVector> vectors) {
    auto out = io::open_output(path);
    out << "nav_id\tsub_period";
    for (auto name : kFeatureNames) out << '\t' << name;
    out << '\n';
    for (const auto& fv : vectors) {
        out << fv.nav_id << '\t' << fv.sub_period;
        for (double x : fv.values) out << '\t' << io::format_double(x);
        out << '\n';
    }
    if (!out) throw Error("io", "failed writing feature table " + path.string());
}

std::vector<FeatureVector> read_feature_table(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw Error("parse", "empty feature table " + path.string());
    auto header = io::split(line, '\t');
    if (header.size() != 2 + kFeatureCount || header[0] != "nav_id" || header[1] != "sub_period")
        throw Error("parse", "unexpected feature table header in " + path.string());

    std::vector<FeatureVector> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 2 + kFeatureCount)
            throw Error("parse", "feature row has " + std::to_string(fields.size()) + " columns");
        FeatureVector fv;
        fv.nav_id = io::parse_uint(fields[0]);
        fv.sub_period = std::string(fields[1]);
        for (std::size_t f = 0; f < kFeatureCount; ++f) fv.values[f] = io::parse_double(fields[2 + f]);
        out.push_back(std::move(fv));
    }
    return out;
}

void write_stats(const std::filesystem::path& path, const StandardizationStats& stats) {
    nlohmann::ordered_json doc;
    doc["scope"] = to_string(stats.scope);
    doc["variables"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
    doc["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : stats.groups) {
        nlohmann::ordered_json entry;
        entry["label"] = g.label;
        entry["count"] = g.count;
        entry["mean"] = g.mean;
        entry["stddev"] = g.stddev;
        entry["constant"] = g.constant;
        doc["groups"].push_back(std::move(entry));
    }
    auto out = io::open_output(path);
    out << doc.dump(2) << '\n';
}

}  // namespace wudrift
