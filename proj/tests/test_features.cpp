#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wudrift/error.hpp"
#include "wudrift/features.hpp"

using namespace wudrift;

namespace {

Navigation make_nav(std::vector<std::tuple<Timestamp, std::string, int, std::uint64_t>> rows) {
    Navigation nav;
    nav.id = 7;
    nav.user_key = "u";
    for (auto& [t, resource, status, bytes] : rows) {
        RawRequest r;
        r.timestamp = t;
        r.user_key = "u";
        r.resource = resource;
        r.status = status;
        r.bytes = bytes;
        nav.requests.push_back(r);
    }
    return nav;
}

constexpr Timestamp kJuly15 = 1026727200;  // 2002-07-15 10:00:00 UTC

}  // namespace

TEST_CASE("compute_features: success ratio") {
    std::vector<std::tuple<Timestamp, std::string, int, std::uint64_t>> rows;
    for (int i = 0; i < 10; ++i) rows.emplace_back(kJuly15 + i, "/p" + std::to_string(i), i < 8 ? 200 : 404, 100);
    const auto fv = compute_features(make_nav(rows), {});
    CHECK(fv.values[kNbRequestsOk] == 8);
    CHECK(fv.values[kNbRequestsBad] == 2);
    CHECK(fv.values[kPRequestsOk] == doctest::Approx(0.8));
    CHECK(fv.values[kNbRequestsOk] + fv.values[kNbRequestsBad] == 10);
    CHECK(fv.sub_period == "2002-07");
    CHECK(fv.nav_id == 7);
}

TEST_CASE("compute_features: repetitions count repeated resources") {
    std::vector<std::tuple<Timestamp, std::string, int, std::uint64_t>> rows;
    const char* resources[] = {"/a", "/b", "/c", "/a", "/d", "/e", "/b", "/f", "/g", "/a"};
    for (int i = 0; i < 10; ++i) rows.emplace_back(kJuly15 + i, resources[i], 200, 1);
    const auto fv = compute_features(make_nav(rows), {});
    CHECK(fv.values[kNbRepetitions] == 3);
    CHECK(fv.values[kPRepetitions] == doctest::Approx(0.3));
}

TEST_CASE("compute_features: durations from gaps, last request 0") {
    // gaps {30, 60, 0}
    const auto fv = compute_features(
        make_nav({{kJuly15, "/a", 200, 10}, {kJuly15 + 30, "/b", 200, 20}, {kJuly15 + 90, "/c", 200, 30}}), {});
    CHECK(fv.values[kTotalDuration] == 90);
    CHECK(fv.values[kAvDuration] == 30);
    CHECK(fv.values[kAvDurationOk] == 30);
    CHECK(fv.values[kMaxDurationOk] == 60);
    CHECK(fv.values[kTotalSize] == 60);
    CHECK(fv.values[kAvTotalSize] == 20);
    CHECK_FALSE(fv.no_successful_requests);
}

TEST_CASE("compute_features: durations only count successful requests") {
    // gaps {30 (OK), 60 (404), 0 (OK)}
    const auto fv = compute_features(
        make_nav({{kJuly15, "/a", 200, 10}, {kJuly15 + 30, "/b", 404, 20}, {kJuly15 + 90, "/c", 200, 30}}), {});
    CHECK(fv.values[kAvDurationOk] == 15);
    CHECK(fv.values[kMaxDurationOk] == 30);
    CHECK(fv.values[kAvTotalSize] == 30);  // 60 bytes over 2 successful requests
}

TEST_CASE("compute_features: no successful request is flagged") {
    const auto fv = compute_features(make_nav({{kJuly15, "/a", 500, 10}, {kJuly15 + 5, "/b", 404, 20}}), {});
    CHECK(fv.no_successful_requests);
    CHECK(fv.values[kAvDurationOk] == 0);
    CHECK(fv.values[kAvTotalSize] == 0);
    CHECK(fv.values[kPRequestsOk] == 0);
}

TEST_CASE("compute_features: semantic pages") {
    const SemanticPages pages({"/courses/*", "/staff/index.html"});
    CHECK(pages.matches("/courses/ai/intro.html"));
    CHECK_FALSE(pages.matches("/news/"));
    const auto fv = compute_features(make_nav({{kJuly15, "/courses/a", 200, 1},
                                               {kJuly15 + 1, "/staff/index.html", 200, 1},
                                               {kJuly15 + 2, "/news/", 200, 1},
                                               {kJuly15 + 3, "/courses/b", 200, 1}}),
                                     pages);
    CHECK(fv.values[kNbRequestsSem] == 3);
    CHECK(fv.values[kPRequestsSem] == doctest::Approx(0.75));
    CHECK(compute_features(make_nav({{kJuly15, "/courses/a", 200, 1}}), {}).values[kNbRequestsSem] == 0);
}

TEST_CASE("compute_features rejects an empty navigation") {
    CHECK_THROWS_AS(compute_features(Navigation{}, {}), Error);
}

TEST_CASE("compute_features invariants on random navigations") {
    std::mt19937_64 rng(11);
    const SemanticPages pages({"/s*"});
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::tuple<Timestamp, std::string, int, std::uint64_t>> rows;
        Timestamp t = kJuly15;
        const int n = std::uniform_int_distribution<int>(1, 40)(rng);
        for (int i = 0; i < n; ++i) {
            t += std::uniform_int_distribution<int>(0, 120)(rng);
            const int status = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? 404 : 200;
            rows.emplace_back(t, (rng() % 2 ? "/s" : "/p") + std::to_string(rng() % 6), status, rng() % 5000);
        }
        const auto fv = compute_features(make_nav(rows), pages);
        const auto& v = fv.values;
        const double count = n;
        CHECK(v[kNbRequestsOk] + v[kNbRequestsBad] == count);
        CHECK(v[kPRequestsOk] == v[kNbRequestsOk] / count);
        CHECK(v[kPRepetitions] == v[kNbRepetitions] / count);
        CHECK(v[kPRequestsSem] == v[kNbRequestsSem] / count);
        CHECK(v[kAvDuration] == v[kTotalDuration] / count);
        if (v[kNbRequestsOk] > 0) CHECK(v[kAvTotalSize] == v[kTotalSize] / v[kNbRequestsOk]);
        for (auto p : {kPRequestsOk, kPRepetitions, kPRequestsSem}) {
            CHECK(v[p] >= 0.0);
            CHECK(v[p] <= 1.0);
        }
        for (double x : v) CHECK(x >= 0.0);
        CHECK(v[kMaxDurationOk] <= v[kTotalDuration]);
        CHECK(v[kAvDurationOk] <= v[kMaxDurationOk]);
    }
}

TEST_CASE("sub_period_label") {
    CHECK(sub_period_label(kJuly15, Granularity::Month) == "2002-07");
    // 2002-07-31 23:59 UTC
    const Timestamp late = 1028159940;
    CHECK(sub_period_label(late, Granularity::Day) == "2002-07-31");
    CHECK(sub_period_label(late + 60, Granularity::Day) == "2002-08-01");
    CHECK(sub_period_label(kJuly15, Granularity::Week) == "2002-W29");
    // 2003-01-01 is a Wednesday: ISO week 1 of 2003; 2002-12-30 (Monday) too
    CHECK(sub_period_label(1041379200, Granularity::Week) == "2003-W01");
    CHECK(sub_period_label(1041206400, Granularity::Week) == "2003-W01");
    // 2005-01-01 (Saturday) belongs to 2004-W53
    CHECK(sub_period_label(1104537600, Granularity::Week) == "2004-W53");
    CHECK(sub_period_label(kJuly15, Granularity::Month) == sub_period_label(kJuly15 + 86400 * 10, Granularity::Month));
}

TEST_CASE("sub_period_label order is chronological") {
    for (auto g : {Granularity::Month, Granularity::Week, Granularity::Day}) {
        std::string previous;
        for (Timestamp t = 1025481600; t < 1054339200; t += 3600 * 7) {  // Jul 2002 .. May 2003
            const auto label = sub_period_label(t, g);
            CHECK(previous <= label);
            previous = label;
        }
    }
}

TEST_CASE("standardize: two-point z-score and constants") {
    std::vector<FeatureVector> vs(2);
    vs[0].sub_period = vs[1].sub_period = "2002-07";
    vs[0].values[0] = 0;
    vs[1].values[0] = 10;
    vs[0].values[1] = vs[1].values[1] = 5;
    const auto [out, stats] = standardize(vs);
    CHECK(out[0].values[0] == -1.0);
    CHECK(out[1].values[0] == 1.0);
    CHECK(out[0].values[1] == 0.0);
    REQUIRE(stats.groups.size() == 1);
    CHECK(stats.groups[0].label == "*");
    CHECK(stats.groups[0].stddev[0] == 5.0);
    CHECK(stats.groups[0].constant[1]);
    CHECK_FALSE(stats.groups[0].constant[0]);
}

TEST_CASE("standardize: per-scope moments and idempotence") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(50.0, 20.0);
    std::vector<FeatureVector> vs;
    for (int i = 0; i < 300; ++i) {
        FeatureVector fv;
        fv.nav_id = static_cast<std::uint64_t>(i);
        fv.sub_period = i % 3 == 0 ? "2002-07" : "2002-08";
        for (auto& x : fv.values) x = noise(rng);
        fv.values[kNbRequestsSem] = 0;  // constant column
        vs.push_back(fv);
    }
    for (auto scope : {StandardizationScope::Global, StandardizationScope::PerSubPeriod}) {
        const auto [out, stats] = standardize(vs, scope);
        CHECK(stats.groups.size() == (scope == StandardizationScope::Global ? 1u : 2u));
        for (const auto& g : stats.groups) {
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                double sum = 0, sq = 0;
                std::size_t n = 0;
                for (const auto& fv : out)
                    if (g.label == "*" || fv.sub_period == g.label) {
                        sum += fv.values[f];
                        ++n;
                    }
                const double mean = sum / n;
                for (const auto& fv : out)
                    if (g.label == "*" || fv.sub_period == g.label) sq += (fv.values[f] - mean) * (fv.values[f] - mean);
                CHECK(std::abs(mean) < 1e-9);
                if (f == kNbRequestsSem) {
                    CHECK(g.constant[f]);
                    CHECK(sq == 0.0);
                } else {
                    CHECK(std::abs(std::sqrt(sq / n) - 1.0) < 1e-9);
                }
            }
        }
        const auto again = standardize(out, scope).first;
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                CHECK(std::abs(again[i].values[f] - out[i].values[f]) <= 1e-12);
    }
}

TEST_CASE("standardize rejects undersized groups") {
    std::vector<FeatureVector> vs(3);
    vs[0].sub_period = vs[1].sub_period = "2002-07";
    vs[2].sub_period = "2002-08";
    CHECK_NOTHROW(standardize(vs, StandardizationScope::Global));
    try {
        standardize(vs, StandardizationScope::PerSubPeriod);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "undersized_group");
        CHECK(std::string(e.what()).find("2002-08") != std::string::npos);
    }
}

TEST_CASE("feature table round-trips bit-exactly") {
    std::mt19937_64 rng(9);
    std::vector<FeatureVector> vs;
    for (int i = 0; i < 20; ++i) {
        FeatureVector fv;
        fv.nav_id = 100 + static_cast<std::uint64_t>(i);
        fv.sub_period = "2003-0" + std::to_string(1 + i % 5);
        for (auto& x : fv.values) x = std::normal_distribution<double>(0, 1e3)(rng);
        vs.push_back(fv);
    }
    const auto dir = test::scratch_dir("features_rt");
    write_feature_table(dir / "f.tsv", vs);
    CHECK(read_feature_table(dir / "f.tsv") == vs);
}
