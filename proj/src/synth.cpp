#include "wudrift/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include <json.hpp>

#include "wudrift/error.hpp"
#include "wudrift/table_io.hpp"

namespace wudrift {

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error("invalid_scenario", message); }

FeatureValues padded(const std::vector<double>& values) {
    FeatureValues out{};
    std::copy(values.begin(), values.end(), out.begin());
    return out;
}

std::pair<int, int> parse_month(const std::string& text) {
    int year = 0, month = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d%c", &year, &month, &tail) != 2 || month < 1 || month > 12)
        invalid("start_month must look like YYYY-MM, got '" + text + "'");
    return {year, month};
}

}  // namespace

void DriftScenario::validate() const {
    if (periods < 1) invalid("periods must be at least 1");
    if (points_per_period < 1) invalid("points_per_period must be at least 1");
    if (components.empty()) invalid("scenario has no components");
    parse_month(start_month);
    for (const auto& c : components) {
        const std::string who = "component '" + c.name + "'";
        if (c.mean.empty() || c.mean.size() > kFeatureCount)
            invalid(who + ": mean must have 1.." + std::to_string(kFeatureCount) + " values");
        if (c.spread.size() != 1 && c.spread.size() != kFeatureCount)
            invalid(who + ": spread must have 1 or " + std::to_string(kFeatureCount) + " values");
        for (double s : c.spread)
            if (!(s > 0.0)) invalid(who + ": spreads must be positive");
        if (!(c.weight > 0.0)) invalid(who + ": weight must be positive");
        if (c.birth && (*c.birth < 1 || *c.birth > periods)) invalid(who + ": birth outside periods");
        if (c.death && (*c.death < 1 || *c.death > periods + 1)) invalid(who + ": death outside periods");
        if (c.birth && c.death && *c.death <= *c.birth) invalid(who + ": death must follow birth");
    }
    for (const auto& m : moves) {
        if (m.component >= components.size()) invalid("move refers to unknown component");
        if (m.period < 1 || m.period > periods) invalid("move period outside periods");
        if (m.displacement.empty() || m.displacement.size() > kFeatureCount)
            invalid("move displacement must have 1.." + std::to_string(kFeatureCount) + " values");
    }
    for (std::size_t t = 1; t <= periods; ++t)
        if (mixture(t).empty()) invalid("period " + std::to_string(t) + " has no active component");
}

std::vector<DriftScenario::Active> DriftScenario::mixture(std::size_t period) const {
    std::vector<Active> out;
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (c.birth && period < *c.birth) continue;
        if (c.death && period >= *c.death) continue;
        Active a{i, padded(c.mean), {}, c.weight};
        if (c.spread.size() == 1)
            a.spread.fill(c.spread.front());
        else
            a.spread = padded(c.spread);
        for (const auto& m : moves)
            if (m.component == i && m.period <= period)
                for (std::size_t j = 0; j < m.displacement.size(); ++j) a.mean[j] += m.displacement[j];
        total += c.weight;
        out.push_back(a);
    }
    for (auto& a : out) a.weight /= total;
    return out;
}

std::string DriftScenario::period_label(std::size_t period) const {
    auto [year, month] = parse_month(start_month);
    const int index = year * 12 + (month - 1) + static_cast<int>(period) - 1;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", index / 12, index % 12 + 1);
    return buf;
}

DriftScenario parse_scenario(const std::string& json_text) {
    DriftScenario s;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        s.periods = doc.at("periods").get<std::size_t>();
        s.points_per_period = doc.at("points_per_period").get<std::size_t>();
        s.seed = doc.value("seed", std::uint64_t{1});
        s.start_month = doc.value("start_month", std::string("2002-07"));
        for (const auto& c : doc.at("components")) {
            GaussianComponent g;
            g.name = c.value("name", "c" + std::to_string(s.components.size()));
            g.mean = c.at("mean").get<std::vector<double>>();
            if (c.at("spread").is_array())
                g.spread = c.at("spread").get<std::vector<double>>();
            else
                g.spread = {c.at("spread").get<double>()};
            g.weight = c.value("weight", 1.0);
            if (c.contains("birth")) g.birth = c.at("birth").get<std::size_t>();
            if (c.contains("death")) g.death = c.at("death").get<std::size_t>();
            s.components.push_back(std::move(g));
        }
        if (doc.contains("moves"))
            for (const auto& m : doc.at("moves")) {
                MoveEvent e;
                const auto name = m.at("component").get<std::string>();
                auto it = std::find_if(s.components.begin(), s.components.end(),
                                       [&](const GaussianComponent& g) { return g.name == name; });
                if (it == s.components.end()) invalid("move refers to unknown component '" + name + "'");
                e.component = static_cast<std::size_t>(it - s.components.begin());
                e.period = m.at("period").get<std::size_t>();
                e.displacement = m.at("displacement").get<std::vector<double>>();
                s.moves.push_back(std::move(e));
            }
    } catch (const nlohmann::json::exception& e) {
        invalid(std::string("malformed scenario: ") + e.what());
    }
    s.validate();
    return s;
}

DriftScenario load_scenario(const std::filesystem::path& path) {
    auto in = io::open_input(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario(text);
}

DriftScenario birth_scenario(std::uint64_t seed) {
    DriftScenario s;
    s.periods = 6;
    s.points_per_period = 1000;
    s.seed = seed;
    s.components = {
        {"A", {0.0}, {1.0}, 1.0, std::nullopt, std::nullopt},
        {"B", {0.0, 8.0}, {1.0}, 1.0, std::nullopt, std::nullopt},
        {"C", {0.0, 8.0, 8.0}, {1.0}, 1.0, std::nullopt, std::nullopt},
        {"D", {0.0, 0.0, 0.0, 24.0}, {1.0}, 0.35, std::nullopt, std::nullopt},
        {"E", {0.0, 0.0, 0.0, 0.0, 24.0}, {1.0}, 0.35, std::nullopt, std::nullopt},
        {"N", {0.0, 0.0, 0.0, 0.0, 0.0, 8.96}, {1.0}, 1.0, 4, std::nullopt},
    };
    s.validate();
    return s;
}

SyntheticData generate(const DriftScenario& scenario) {
    scenario.validate();
    SyntheticData out;
    std::uint64_t next_id = 1;
    for (std::size_t t = 1; t <= scenario.periods; ++t) {
        const auto mix = scenario.mixture(t);
        const auto label = scenario.period_label(t);
        std::vector<double> weights;
        for (const auto& a : mix) weights.push_back(a.weight);
        std::mt19937_64 rng(initialization_seed(scenario.seed, t));
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t i = 0; i < scenario.points_per_period; ++i) {
            const auto& a = mix[pick(rng)];
            FeatureVector fv;
            fv.nav_id = next_id++;
            fv.sub_period = label;
            for (std::size_t j = 0; j < kFeatureCount; ++j) fv.values[j] = a.mean[j] + a.spread[j] * noise(rng);
            out.vectors.push_back(std::move(fv));
            out.truth.push_back(a.component);
        }
    }
    return out;
}

TemporalDataset SyntheticData::dataset() const { return TemporalDataset::from_features(vectors); }

Partition SyntheticData::truth_partition(const std::string& label) const {
    std::vector<std::size_t> labels;
    std::vector<std::uint64_t> items;
    std::size_t count = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].sub_period != label) continue;
        labels.push_back(truth[i]);
        items.push_back(vectors[i].nav_id);
        count = std::max(count, truth[i] + 1);
    }
    if (items.empty()) throw Error("invalid_argument", "no synthetic period labelled '" + label + "'");
    return make_partition(std::move(labels), count, std::move(items));
}

void write_truth(const std::filesystem::path& path, const SyntheticData& data) {
    auto out = io::open_output(path);
    out << "nav_id\tsub_period\tcomponent\n";
    for (std::size_t i = 0; i < data.vectors.size(); ++i)
        out << data.vectors[i].nav_id << '\t' << data.vectors[i].sub_period << '\t' << data.truth[i]
            << '\n';
    if (!out) throw Error("io", "failed writing truth file " + path.string());
}

}  // namespace wudrift
