#pragma once

// Test-only reference computations, deliberately naive and independent of
// the library's code paths.

#include <limits>
#include <random>
#include <vector>

#include "wudrift/core.hpp"

namespace test {

// Minimum within-cluster sum of squares over every assignment of the rows
// to k labels (k^n labelings). Also reports how many labelings reach it.
struct BruteForceOptimum {
    double inertia = std::numeric_limits<double>::infinity();
    std::size_t optimal_labelings = 0;
    std::vector<std::size_t> labels;
};

inline BruteForceOptimum brute_force_kmeans(const wudrift::Matrix& points, std::size_t k) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    std::vector<std::size_t> labels(n, 0);
    BruteForceOptimum best;
    while (true) {
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        std::vector<double> counts(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[labels[i]] += 1;
            for (std::size_t j = 0; j < d; ++j) sums[labels[i]][j] += points(i, j);
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const double mean = sums[labels[i]][j] / counts[labels[i]];
                sse += (points(i, j) - mean) * (points(i, j) - mean);
            }
        if (sse < best.inertia - 1e-12) {
            best.inertia = sse;
            best.optimal_labelings = 1;
            best.labels = labels;
        } else if (sse <= best.inertia + 1e-12) {
            ++best.optimal_labelings;
        }
        std::size_t pos = 0;
        while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

inline std::vector<std::size_t> random_labels(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = pick(rng);
    return labels;
}

inline wudrift::Matrix random_points(std::mt19937_64& rng, std::size_t n, std::size_t d, double spread = 1.0) {
    std::normal_distribution<double> noise(0.0, spread);
    wudrift::Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = noise(rng);
    return m;
}

}  // namespace test
