#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "wudrift/error.hpp"
#include "wudrift/report.hpp"

using namespace wudrift;

namespace {

TemporalDataset small_dataset() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<SubPeriodData> periods;
    std::uint64_t id = 1;
    for (const char* label : {"2002-07", "2002-08", "2002-09"}) {
        SubPeriodData p;
        p.label = label;
        for (int i = 0; i < 60; ++i) {
            p.ids.push_back(id++);
            p.points.append_row(std::vector<double>{noise(rng) + (i % 3) * 4.0, noise(rng)});
        }
        periods.push_back(std::move(p));
    }
    return TemporalDataset(periods);
}

ClusteringConfig config() {
    ClusteringConfig cfg;
    cfg.k = 3;
    cfg.n_initializations = 5;
    return cfg;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("summarize: quartiles by interpolation") {
    const auto s = summarize({4, 1, 3, 2, 5});
    CHECK(s.count == 5);
    CHECK(s.min == 1);
    CHECK(s.q1 == 2);
    CHECK(s.median == 3);
    CHECK(s.q3 == 4);
    CHECK(s.max == 5);
    CHECK(s.mean == 3);
    const auto e = summarize({1, 2, 3, 4});
    CHECK(e.median == 2.5);
    CHECK(e.q1 == doctest::Approx(1.75));
    CHECK(summarize({7}).q3 == 7);
    CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("a strategy compared with itself") {
    const auto data = small_dataset();
    const auto r = run_strategy(Strategy::Dependent, data, config());
    const auto bundle = compare_strategies({r, r});
    CHECK(bundle.strategies == std::vector<std::string>{"dependent", "dependent#2"});
    CHECK(bundle.cr.size() == 3);
    for (const auto& label : bundle.sub_periods) {
        CHECK(bundle.cr_value(label, "dependent", "dependent#2") == 1.0);
        const auto* f = bundle.f_entry(label, "dependent", "dependent#2");
        REQUIRE(f != nullptr);
        CHECK(f->result.overall == 1.0);
    }
}

TEST_CASE("one strategy gives empty pairwise sections") {
    const auto r = run_strategy(Strategy::Global, small_dataset(), config());
    const auto bundle = compare_strategies({r});
    CHECK(bundle.cr.empty());
    CHECK(bundle.f.empty());
    CHECK(bundle.cr_summary.empty());
    const auto dir = test::scratch_dir("report_single");
    write_report(dir, bundle);
    CHECK(std::filesystem::exists(dir / "summary.json"));
}

TEST_CASE("all four strategies: pair counts and symmetry") {
    const auto data = small_dataset();
    std::vector<StrategyResult> results;
    for (auto s : kAllStrategies) results.push_back(run_strategy(s, data, config()));
    const auto bundle = compare_strategies(results);
    CHECK(bundle.cr.size() == 6 * 3);
    CHECK(bundle.f.size() == 12 * 3);
    CHECK(bundle.cr_summary.size() == 6);
    CHECK(bundle.cr_value("2002-08", "global", "dependent") == bundle.cr_value("2002-08", "dependent", "global"));
}

TEST_CASE("mismatched sub-periods are rejected") {
    const auto data = small_dataset();
    const auto full = run_strategy(Strategy::Independent, data, config());
    auto truncated = full;
    truncated.periods.pop_back();
    try {
        compare_strategies({full, truncated});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "period_mismatch");
    }
}

TEST_CASE("reports regenerate byte for byte") {
    const auto data = small_dataset();
    std::vector<StrategyResult> results;
    for (auto s : kAllStrategies) results.push_back(run_strategy(s, data, config()));
    const auto a = test::scratch_dir("report_a");
    const auto b = test::scratch_dir("report_b");
    write_report(a, compare_strategies(results));
    write_report(b, compare_strategies(results));
    for (const char* name : {"cr.csv", "cr_matrix.csv", "f_measure.csv", "summary.json"}) {
        CHECK(!slurp(a / name).empty());
        CHECK(slurp(a / name) == slurp(b / name));
    }
}
