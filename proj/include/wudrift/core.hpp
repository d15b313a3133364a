#pragma once

// Dynamic clustering (k-means family): allocation and representation phases
// alternated to a fixed point, best of several seeded random starts.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wudrift {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    void append_row(std::span<const double> values);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

struct Prototypes {
    Matrix centers;           // one row per cluster
    std::vector<bool> empty;  // cluster had no member at the last representation

    std::size_t k() const { return centers.rows(); }
    std::size_t dimension() const { return centers.cols(); }

    bool operator==(const Prototypes&) const = default;
};

struct Partition {
    std::vector<std::uint64_t> items;  // item ids, parallel to labels
    std::vector<std::size_t> labels;   // cluster index in [0, cluster_count)
    std::size_t cluster_count = 0;
    std::vector<std::size_t> sizes;
    double inertia = 0.0;  // sum of squared distances to the allocating prototypes

    std::size_t size() const { return labels.size(); }

    bool operator==(const Partition&) const = default;
};

// Builds a partition over items 0..n-1 (or `items` when given) from labels,
// filling sizes. Inertia is left at 0.
Partition make_partition(std::vector<std::size_t> labels, std::size_t cluster_count,
                         std::vector<std::uint64_t> items = {});

enum class Convergence { AssignmentsUnchanged };

struct ClusteringConfig {
    std::size_t k = 10;
    std::size_t max_iterations = 100;
    std::size_t n_initializations = 100;
    std::uint64_t seed = 42;
    Convergence convergence = Convergence::AssignmentsUnchanged;
    // Worker threads for independent initializations; results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

// Nearest prototype by Euclidean distance, ties to the lowest index.
// Throws Error("dimension_mismatch") when dimensions differ.
Partition allocate(const Matrix& points, const Prototypes& prototypes);

// Mean of each non-empty cluster; empty clusters keep `previous` and are flagged.
Prototypes represent(const Matrix& points, const Partition& partition, const Prototypes& previous);

// Seed for initialization `index` derived from the base seed.
std::uint64_t initialization_seed(std::uint64_t seed, std::size_t index);

// K rows sampled without replacement.
Prototypes random_prototypes(const Matrix& points, std::size_t k, std::uint64_t seed);

struct RunResult {
    Partition partition;
    Prototypes prototypes;  // the prototypes the final partition was allocated to
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> inertia_trace;  // inertia after every allocation, starting with the initial one
    std::size_t initialization = 0;     // index of the winning start in best_of
};

// Alternates represent/allocate until the assignment mapping no longer
// changes or max_iterations is reached. Without `init`, prototypes are drawn
// with random_prototypes(points, k, initialization_seed(seed, 0)).
RunResult run(const Matrix& points, const ClusteringConfig& config,
              const std::optional<Prototypes>& init = std::nullopt);

// Minimum-inertia run over n_initializations random starts; ties go to the
// lowest initialization index.
RunResult best_of(const Matrix& points, const ClusteringConfig& config);

}  // namespace wudrift
