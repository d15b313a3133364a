#include <doctest.h>

#include <set>

#include "test_support.hpp"
#include "wudrift/error.hpp"
#include "wudrift/eval.hpp"
#include "wudrift/synth.hpp"

using namespace wudrift;

namespace {

DriftScenario three_blobs(std::size_t periods) {
    DriftScenario s;
    s.periods = periods;
    s.points_per_period = 300;
    s.seed = 5;
    s.components = {{"a", {0, 0}, {1.0}, 1.0, {}, {}},
                    {"b", {12, 0}, {1.0}, 1.0, {}, {}},
                    {"c", {0, 12}, {1.0}, 1.0, {}, {}}};
    return s;
}

std::set<std::size_t> components_in(const SyntheticData& data, const std::string& label) {
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < data.vectors.size(); ++i)
        if (data.vectors[i].sub_period == label) seen.insert(data.truth[i]);
    return seen;
}

}  // namespace

TEST_CASE("scenario labels are consecutive months") {
    auto s = three_blobs(8);
    s.start_month = "2002-11";
    CHECK(s.period_label(1) == "2002-11");
    CHECK(s.period_label(3) == "2003-01");
    CHECK(s.period_label(8) == "2003-06");
}

TEST_CASE("no drift events: every period draws from the same mixture") {
    const auto s = three_blobs(4);
    const auto data = generate(s);
    CHECK(data.vectors.size() == 4 * s.points_per_period);
    for (std::size_t t = 1; t <= s.periods; ++t) {
        const auto m = s.mixture(t);
        REQUIRE(m.size() == 3);
        CHECK(m[1].mean[0] == 12.0);
        CHECK(m[0].weight == doctest::Approx(1.0 / 3.0));
        CHECK(components_in(data, s.period_label(t)) == std::set<std::size_t>{0, 1, 2});
    }
}

TEST_CASE("births, deaths and moves change the mixture") {
    auto s = three_blobs(5);
    s.components.push_back({"d", {12, 12}, {1.0}, 1.0, std::size_t{3}, {}});
    s.components[0].death = 4;
    s.moves.push_back({1, 2, {0, 5}});
    const auto data = generate(s);
    CHECK(s.mixture(1).size() == 3);
    CHECK(s.mixture(3).size() == 4);
    CHECK(s.mixture(4).size() == 3);
    CHECK(components_in(data, s.period_label(2)) == std::set<std::size_t>{0, 1, 2});
    CHECK(components_in(data, s.period_label(3)) == std::set<std::size_t>{0, 1, 2, 3});
    CHECK(components_in(data, s.period_label(5)) == std::set<std::size_t>{1, 2, 3});
    CHECK(s.mixture(1)[1].mean[1] == 0.0);
    CHECK(s.mixture(2)[1].mean[1] == 5.0);
    CHECK(s.mixture(5)[0].mean[1] == 5.0);  // component b is first once a has died
}

TEST_CASE("same seed, same stream") {
    const auto s = birth_scenario(3);
    const auto a = generate(s);
    const auto b = generate(s);
    CHECK(a.vectors == b.vectors);
    CHECK(a.truth == b.truth);
    CHECK(generate(birth_scenario(4)).vectors != a.vectors);
}

TEST_CASE("invalid scenarios are rejected") {
    auto check_invalid = [](const DriftScenario& s) {
        try {
            s.validate();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == "invalid_scenario");
        }
    };
    auto s = three_blobs(3);
    CHECK_NOTHROW(s.validate());
    s.components[0].birth = 4;
    s.components[0].death = 2;
    check_invalid(s);
    s = three_blobs(3);
    s.components[1].spread = {-1.0};
    check_invalid(s);
    s = three_blobs(3);
    s.components[2].mean.assign(kFeatureCount + 1, 0.0);
    check_invalid(s);
    s = three_blobs(3);
    s.moves.push_back({7, 2, {1.0}});
    check_invalid(s);
    s = three_blobs(3);
    s.components[0].death = 1;
    s.components[1].death = 1;
    s.components[2].death = 1;
    check_invalid(s);
    s = three_blobs(3);
    s.periods = 0;
    check_invalid(s);
}

TEST_CASE("scenario JSON parsing") {
    const auto s = parse_scenario(R"({
        "periods": 3, "points_per_period": 50, "seed": 11, "start_month": "2003-01",
        "components": [
            {"name": "x", "mean": [0, 0], "spread": 1.5},
            {"name": "y", "mean": [9], "spread": [1,1,1,1,1,1,1,1,1,1,1,1,2], "weight": 0.5, "birth": 2}
        ],
        "moves": [{"component": "x", "period": 3, "displacement": [4]}]
    })");
    CHECK(s.periods == 3);
    CHECK(s.seed == 11);
    CHECK(s.period_label(1) == "2003-01");
    REQUIRE(s.components.size() == 2);
    CHECK(s.components[1].birth == std::size_t{2});
    REQUIRE(s.moves.size() == 1);
    CHECK(s.moves[0].component == 0);
    CHECK(s.mixture(3)[0].mean[0] == 4.0);
    CHECK(s.mixture(3)[1].spread[12] == 2.0);
    CHECK_THROWS_AS(parse_scenario(R"({"periods": 2, "components": [], "moves": [{"component": "nope"}]})"), Error);
    CHECK_THROWS_AS(parse_scenario("not json"), Error);
}

TEST_CASE("truth partitions align with the generated dataset") {
    const auto s = three_blobs(2);
    const auto data = generate(s);
    const auto dataset = data.dataset();
    REQUIRE(dataset.periods().size() == 2);
    for (const auto& period : dataset.periods()) {
        const auto truth = data.truth_partition(period.label);
        CHECK(truth.items == period.ids);
    }
    const auto dir = test::scratch_dir("truth");
    CHECK_NOTHROW(write_truth(dir / "truth.tsv", data));
}

TEST_CASE("independent clustering recovers well separated components") {
    auto s = three_blobs(3);
    s.components.push_back({"d", {12, 12}, {1.0}, 1.0, std::size_t{2}, {}});
    const auto data = generate(s);
    const auto dataset = data.dataset();
    ClusteringConfig cfg;
    cfg.n_initializations = 10;
    for (std::size_t t = 1; t <= s.periods; ++t) {
        const auto& period = dataset.periods()[t - 1];
        cfg.k = s.mixture(t).size();
        const auto result = independent_local_strategy(TemporalDataset({period}), cfg);
        CHECK(corrected_rand(data.truth_partition(period.label), result.periods[0].partition) >= 0.95);
    }
}
