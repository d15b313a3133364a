#pragma once

// The four temporal clustering strategies over ordered sub-periods:
//
//   global       one clustering of all periods, restricted to each period
//   independent  a fresh clustering per period
//   previous     period 1 clustered, later periods allocated to the
//                prototypes carried from the period before
//   dependent    period 1 clustered, later periods clustered to convergence
//                starting from the carried prototypes

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wudrift/core.hpp"
#include "wudrift/features.hpp"

namespace wudrift {

struct SubPeriodData {
    std::string label;
    std::vector<std::uint64_t> ids;
    Matrix points;

    std::size_t size() const { return ids.size(); }
};

class TemporalDataset {
public:
    TemporalDataset() = default;

    // Periods must have strictly increasing labels and disjoint, non-empty id sets.
    explicit TemporalDataset(std::vector<SubPeriodData> periods);

    // Groups vectors by sub_period (labels sorted); order within a period follows the input.
    static TemporalDataset from_features(std::span<const FeatureVector> vectors);

    const std::vector<SubPeriodData>& periods() const { return periods_; }
    std::vector<std::string> labels() const;
    std::size_t total_size() const;

private:
    std::vector<SubPeriodData> periods_;
};

enum class Strategy { Global, Independent, Previous, Dependent };

inline constexpr Strategy kAllStrategies[] = {Strategy::Global, Strategy::Independent,
                                              Strategy::Previous, Strategy::Dependent};

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

// Which prototypes the previous-local strategy carries into period t+1:
// the means of period t's allocation, or period 1's prototypes unchanged.
enum class CarryMode { Recomputed, FirstPeriod };

std::string_view to_string(CarryMode mode);
std::optional<CarryMode> parse_carry_mode(std::string_view name);

struct PeriodResult {
    std::string label;
    Partition partition;    // items are navigation ids; inertia w.r.t. the allocating prototypes
    Prototypes prototypes;  // the period's cluster centres, carried forward by previous/dependent
    std::size_t iterations = 0;       // optimization iterations spent on this period
    double allocation_inertia = 0.0;  // inertia of the first allocation in this period
};

struct StrategyResult {
    Strategy strategy = Strategy::Global;
    std::vector<PeriodResult> periods;

    const PeriodResult* find(std::string_view label) const;
};

StrategyResult global_strategy(const TemporalDataset& data, const ClusteringConfig& config);
StrategyResult independent_local_strategy(const TemporalDataset& data, const ClusteringConfig& config);
StrategyResult previous_local_strategy(const TemporalDataset& data, const ClusteringConfig& config,
                                       CarryMode carry = CarryMode::Recomputed);
StrategyResult dependent_local_strategy(const TemporalDataset& data, const ClusteringConfig& config);

StrategyResult run_strategy(Strategy strategy, const TemporalDataset& data,
                            const ClusteringConfig& config, CarryMode carry = CarryMode::Recomputed);

// Concatenates the per-period partitions in period order.
Partition concatenate(const StrategyResult& result);

// Results directory for one strategy:
//   <dir>/manifest.json
//   <dir>/<label>.partition.tsv    nav_id, sub_period, cluster
//   <dir>/<label>.prototypes.tsv   cluster, empty, then one column per variable
struct RunManifest {
    ClusteringConfig config;
    Granularity granularity = Granularity::Month;
    CarryMode carry = CarryMode::Recomputed;
    std::string input;  // description of the input table, recorded verbatim
};

void write_strategy_result(const std::filesystem::path& dir, const StrategyResult& result,
                           const RunManifest& manifest);

StrategyResult read_strategy_result(const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& dir);

}  // namespace wudrift
