#include "wudrift/eval.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "wudrift/error.hpp"

namespace wudrift {

namespace {

constexpr std::size_t kMismatchSample = 5;

std::string describe(const std::vector<std::uint64_t>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kMismatchSample; ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(ids[i]);
    }
    if (ids.size() > kMismatchSample) out += ", ...";
    return out;
}

std::unordered_map<std::uint64_t, std::size_t> index_items(const Partition& p, const char* role) {
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(p.items.size());
    std::vector<std::uint64_t> duplicates;
    for (std::size_t i = 0; i < p.items.size(); ++i)
        if (!index.emplace(p.items[i], i).second) duplicates.push_back(p.items[i]);
    if (!duplicates.empty())
        throw Error("item_mismatch", std::string(role) + " partition repeats item ids: " +
                                         describe(duplicates));
    return index;
}

// For every item of `a`, the position of the same item in `b`.
std::vector<std::size_t> align(const Partition& a, const Partition& b) {
    if (a.items.size() != b.items.size() || a.labels.size() != a.items.size() ||
        b.labels.size() != b.items.size() || a.items != b.items) {
        const auto a_index = index_items(a, "first");
        const auto b_index = index_items(b, "second");
        std::vector<std::uint64_t> only_a, only_b;
        for (auto id : a.items)
            if (!b_index.contains(id)) only_a.push_back(id);
        for (auto id : b.items)
            if (!a_index.contains(id)) only_b.push_back(id);
        if (!only_a.empty() || !only_b.empty()) {
            std::sort(only_a.begin(), only_a.end());
            std::sort(only_b.begin(), only_b.end());
            std::string message = "partitions cover different items";
            if (!only_a.empty()) message += "; only in first: " + describe(only_a);
            if (!only_b.empty()) message += "; only in second: " + describe(only_b);
            throw Error("item_mismatch", message);
        }
        std::vector<std::size_t> pos(a.items.size());
        for (std::size_t i = 0; i < a.items.size(); ++i) pos[i] = b_index.at(a.items[i]);
        return pos;
    }
    std::vector<std::size_t> pos(a.items.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
    return pos;
}

// Maps original cluster indices to dense 0..m-1 over the labels present.
std::map<std::size_t, std::size_t> compact(const std::vector<std::size_t>& labels) {
    std::map<std::size_t, std::size_t> dense;
    for (auto l : labels) dense.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [label, index] : dense) index = next++;
    return dense;
}

double choose2(double k) { return k * (k - 1.0) / 2.0; }

}  // namespace

ContingencyTable contingency(const Partition& rows, const Partition& cols) {
    const auto pos = align(rows, cols);
    const auto row_index = compact(rows.labels);
    const auto col_index = compact(cols.labels);

    ContingencyTable t;
    for (const auto& [label, _] : row_index) t.row_clusters.push_back(label);
    for (const auto& [label, _] : col_index) t.col_clusters.push_back(label);
    t.row_sizes.assign(row_index.size(), 0);
    t.col_sizes.assign(col_index.size(), 0);
    t.counts.assign(row_index.size() * col_index.size(), 0);
    t.total = rows.labels.size();
    for (std::size_t i = 0; i < rows.labels.size(); ++i) {
        const auto r = row_index.at(rows.labels[i]);
        const auto c = col_index.at(cols.labels[pos[i]]);
        ++t.counts[r * t.cols() + c];
        ++t.row_sizes[r];
        ++t.col_sizes[c];
    }
    return t;
}

FMeasureResult f_measure(const ContingencyTable& table) {
    if (table.total == 0) throw Error("empty_partition", "cannot compute F-measure of empty partitions");
    FMeasureResult result;
    const double n = static_cast<double>(table.total);
    double weighted = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        ClusterMatch match;
        match.cluster = table.row_clusters[i];
        match.size = table.row_sizes[i];
        std::size_t best = 0;
        double best_f = -1.0;
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double nij = static_cast<double>(table.at(i, j));
            double f = 0.0;
            if (nij > 0) {
                const double recall = nij / static_cast<double>(table.row_sizes[i]);
                const double precision = nij / static_cast<double>(table.col_sizes[j]);
                f = 2.0 * precision * recall / (precision + recall);
            }
            if (f > best_f) {
                best_f = f;
                best = j;
            }
        }
        match.best_match = table.col_clusters[best];
        match.f = best_f;
        weighted += static_cast<double>(match.size) * best_f;
        result.clusters.push_back(match);
    }
    // Dividing once keeps identical partitions at exactly 1.
    result.overall = weighted / n;
    return result;
}

FMeasureResult f_measure(const Partition& apriori, const Partition& reached) {
    return f_measure(contingency(apriori, reached));
}

double corrected_rand(const ContingencyTable& table) {
    if (table.total < 2) throw Error("too_few_items", "corrected Rand needs at least 2 items");
    double index = 0.0;
    for (auto nij : table.counts) index += choose2(static_cast<double>(nij));
    double rows = 0.0, cols = 0.0;
    for (auto ni : table.row_sizes) rows += choose2(static_cast<double>(ni));
    for (auto nj : table.col_sizes) cols += choose2(static_cast<double>(nj));
    const double pairs = choose2(static_cast<double>(table.total));
    const double expected = rows * cols / pairs;
    const double maximum = 0.5 * (rows + cols);
    const double denominator = maximum - expected;
    if (denominator == 0.0) {
        // Only reachable when both partitions are one cluster or both all
        // singletons; anything else is reported.
        if (table.rows() == table.cols() && index == rows && index == cols) return 1.0;
        throw Error("degenerate_index", "corrected Rand denominator is zero");
    }
    return (index - expected) / denominator;
}

double corrected_rand(const Partition& a, const Partition& b) {
    return corrected_rand(contingency(a, b));
}

double cr_pair_counting_oracle(const Partition& a, const Partition& b) {
    const std::size_t n = a.labels.size();
    if (n > kPairOracleLimit)
        throw Error("too_many_items", "pair-counting oracle is limited to " +
                                          std::to_string(kPairOracleLimit) + " items");
    if (n < 2) throw Error("too_few_items", "corrected Rand needs at least 2 items");
    if (b.labels.size() != n) throw Error("item_mismatch", "partitions have different sizes");

    std::unordered_map<std::uint64_t, std::size_t> b_label;
    for (std::size_t i = 0; i < n; ++i) b_label[b.items[i]] = b.labels[i];
    std::vector<std::size_t> other(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = b_label.find(a.items[i]);
        if (it == b_label.end())
            throw Error("item_mismatch", "item " + std::to_string(a.items[i]) + " missing from second");
        other[i] = it->second;
    }

    // Pair agreement counts: together in both, only in a, only in b, in neither.
    std::int64_t both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = a.labels[i] == a.labels[j];
            const bool same_b = other[i] == other[j];
            if (same_a && same_b)
                ++both;
            else if (same_a)
                ++only_a;
            else if (same_b)
                ++only_b;
            else
                ++neither;
        }
    const std::int64_t numerator = 2 * (both * neither - only_a * only_b);
    const std::int64_t denominator =
        (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    if (denominator == 0) {
        if (only_a == 0 && only_b == 0) return 1.0;
        throw Error("degenerate_index", "corrected Rand denominator is zero");
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace wudrift
