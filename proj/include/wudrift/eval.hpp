#pragma once

// External comparison of two partitions of the same items: contingency
// table, F-measure and corrected Rand index.

#include <cstdint>
#include <vector>

#include "wudrift/core.hpp"

namespace wudrift {

// Cross-tabulation of a row partition V (C non-empty clusters) against a
// column partition U (Q non-empty clusters). Empty clusters of either
// partition do not get a row or column.
struct ContingencyTable {
    std::vector<std::size_t> row_clusters;  // original cluster index of each row
    std::vector<std::size_t> col_clusters;  // original cluster index of each column
    std::vector<std::size_t> row_sizes;     // n_i.
    std::vector<std::size_t> col_sizes;     // n_.j
    std::vector<std::size_t> counts;        // n_ij, row-major C x Q
    std::size_t total = 0;                  // n

    std::size_t rows() const { return row_sizes.size(); }
    std::size_t cols() const { return col_sizes.size(); }
    std::size_t at(std::size_t i, std::size_t j) const { return counts[i * cols() + j]; }
};

// Items are matched by id. Throws Error("item_mismatch") with a sample of
// offending ids when the item sets differ, or when an id repeats.
ContingencyTable contingency(const Partition& rows, const Partition& cols);

struct ClusterMatch {
    std::size_t cluster = 0;  // a priori cluster index
    std::size_t size = 0;     // n_i
    std::size_t best_match = 0;  // reached cluster index maximizing F(i, j)
    double f = 0.0;              // max_j F(i, j)
};

struct FMeasureResult {
    double overall = 0.0;
    std::vector<ClusterMatch> clusters;  // one per non-empty a priori cluster
};

// Recall R(i,j) = n_ij / n_i, precision P(i,j) = n_ij / n_.j, F(i,j) their
// harmonic mean (0 when n_ij = 0); overall F = sum_i n_i / n * max_j F(i,j).
// `apriori` plays the row role. Throws Error("empty_partition") on no items.
FMeasureResult f_measure(const Partition& apriori, const Partition& reached);
FMeasureResult f_measure(const ContingencyTable& table);

// Hubert-Arabie corrected Rand index from the contingency table.
// Throws Error("degenerate_index") when the denominator vanishes and the
// partitions differ, Error("too_few_items") when n < 2.
double corrected_rand(const Partition& a, const Partition& b);
double corrected_rand(const ContingencyTable& table);

inline constexpr std::size_t kPairOracleLimit = 5000;

// Corrected Rand computed from explicit agreement counts over all item
// pairs. Quadratic; refuses more than kPairOracleLimit items.
double cr_pair_counting_oracle(const Partition& a, const Partition& b);

}  // namespace wudrift
