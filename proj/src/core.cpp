#include "wudrift/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "wudrift/error.hpp"

namespace wudrift {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) m.append_row(r);
    return m;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty())
        cols_ = values.size();
    else if (values.size() != cols_)
        throw Error("dimension_mismatch", "row of size " + std::to_string(values.size()) +
                                              " appended to matrix with " + std::to_string(cols_) +
                                              " columns");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

Partition make_partition(std::vector<std::size_t> labels, std::size_t cluster_count,
                         std::vector<std::uint64_t> items) {
    Partition p;
    if (items.empty()) {
        items.resize(labels.size());
        std::iota(items.begin(), items.end(), std::uint64_t{0});
    }
    if (items.size() != labels.size())
        throw Error("invalid_argument", "item and label counts differ");
    p.sizes.assign(cluster_count, 0);
    for (auto l : labels) {
        if (l >= cluster_count) throw Error("invalid_argument", "label out of range");
        ++p.sizes[l];
    }
    p.items = std::move(items);
    p.labels = std::move(labels);
    p.cluster_count = cluster_count;
    return p;
}

void ClusteringConfig::validate() const {
    if (k < 1) throw Error("invalid_config", "k must be at least 1");
    if (max_iterations < 1) throw Error("invalid_config", "max_iterations must be at least 1");
    if (n_initializations < 1) throw Error("invalid_config", "n_initializations must be at least 1");
}

Partition allocate(const Matrix& points, const Prototypes& prototypes) {
    if (prototypes.k() == 0) throw Error("invalid_argument", "no prototypes");
    if (points.rows() > 0 && points.cols() != prototypes.dimension())
        throw Error("dimension_mismatch", "points have dimension " + std::to_string(points.cols()) +
                                              ", prototypes " +
                                              std::to_string(prototypes.dimension()));
    Partition p;
    p.cluster_count = prototypes.k();
    p.items.resize(points.rows());
    std::iota(p.items.begin(), p.items.end(), std::uint64_t{0});
    p.labels.resize(points.rows());
    p.sizes.assign(prototypes.k(), 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto x = points.row(i);
        std::size_t best = 0;
        double best_distance = squared_distance(x, prototypes.centers.row(0));
        for (std::size_t c = 1; c < prototypes.k(); ++c) {
            const double d = squared_distance(x, prototypes.centers.row(c));
            if (d < best_distance) {
                best_distance = d;
                best = c;
            }
        }
        p.labels[i] = best;
        ++p.sizes[best];
        p.inertia += best_distance;
    }
    return p;
}

Prototypes represent(const Matrix& points, const Partition& partition, const Prototypes& previous) {
    if (partition.size() != points.rows())
        throw Error("invalid_argument", "partition does not cover the points");
    Prototypes out;
    out.centers = Matrix(previous.k(), previous.dimension());
    out.empty.assign(previous.k(), false);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto center = out.centers.row(partition.labels[i]);
        const auto x = points.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) center[j] += x[j];
    }
    for (std::size_t c = 0; c < previous.k(); ++c) {
        auto center = out.centers.row(c);
        const auto size = partition.sizes[c];
        if (size == 0) {
            const auto old = previous.centers.row(c);
            std::copy(old.begin(), old.end(), center.begin());
            out.empty[c] = true;
        } else {
            for (double& v : center) v /= static_cast<double>(size);
        }
    }
    return out;
}

std::uint64_t initialization_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 finalizer over (seed, index)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Prototypes random_prototypes(const Matrix& points, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw Error("invalid_config", "k must be at least 1");
    if (points.rows() < k)
        throw Error("too_few_points", "need at least " + std::to_string(k) + " points, got " +
                                          std::to_string(points.rows()));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(points.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    Prototypes protos;
    protos.centers = Matrix(k, points.cols());
    protos.empty.assign(k, false);
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = points.row(order[c]);
        std::copy(src.begin(), src.end(), protos.centers.row(c).begin());
    }
    return protos;
}

RunResult run(const Matrix& points, const ClusteringConfig& config,
              const std::optional<Prototypes>& init) {
    config.validate();
    RunResult result;
    result.prototypes =
        init ? *init : random_prototypes(points, config.k, initialization_seed(config.seed, 0));
    result.partition = allocate(points, result.prototypes);
    result.inertia_trace.push_back(result.partition.inertia);

    while (result.iterations < config.max_iterations) {
        auto next_prototypes = represent(points, result.partition, result.prototypes);
        auto next = allocate(points, next_prototypes);
        ++result.iterations;
        result.inertia_trace.push_back(next.inertia);
        const bool unchanged = next.labels == result.partition.labels;
        result.partition = std::move(next);
        result.prototypes = std::move(next_prototypes);
        if (unchanged) {
            result.converged = true;
            break;
        }
    }
    return result;
}

RunResult best_of(const Matrix& points, const ClusteringConfig& config) {
    config.validate();
    const std::size_t n = config.n_initializations;
    std::vector<std::optional<RunResult>> runs(n);

    auto run_one = [&](std::size_t i) {
        const auto init = random_prototypes(points, config.k, initialization_seed(config.seed, i));
        runs[i] = run(points, config, init);
        runs[i]->initialization = i;
    };

    const std::size_t workers = std::min(std::max<std::size_t>(config.threads, 1), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) run_one(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (runs[i]->partition.inertia < runs[best]->partition.inertia) best = i;
    return std::move(*runs[best]);
}

}  // namespace wudrift
