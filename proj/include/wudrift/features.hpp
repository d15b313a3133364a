#pragma once

// Per-navigation descriptors, z-score standardization and sub-period labels.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wudrift/ingest.hpp"

namespace wudrift {

inline constexpr std::size_t kFeatureCount = 13;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "NbRequests_OK",  "NbRequests_BAD", "PRequests_OK",   "NbRepetitions", "PRepetitions",
    "TotalDuration",  "AvDuration",     "AvDuration_OK",  "NbRequests_SEM", "PRequests_SEM",
    "TotalSize",      "AvTotalSize",    "MaxDuration_OK"};

// Column positions inside FeatureVector::values.
enum Feature : std::size_t {
    kNbRequestsOk,
    kNbRequestsBad,
    kPRequestsOk,
    kNbRepetitions,
    kPRepetitions,
    kTotalDuration,
    kAvDuration,
    kAvDurationOk,
    kNbRequestsSem,
    kPRequestsSem,
    kTotalSize,
    kAvTotalSize,
    kMaxDurationOk,
};

using FeatureValues = std::array<double, kFeatureCount>;

struct FeatureVector {
    std::uint64_t nav_id = 0;
    std::string sub_period;
    FeatureValues values{};
    // Set when the navigation has no status-200 request; AvDuration_OK and
    // AvTotalSize are then 0.
    bool no_successful_requests = false;

    bool operator==(const FeatureVector&) const = default;
};

// Glob patterns (fnmatch syntax, '*' also crosses '/') identifying pages of
// the site's semantic structure.
class SemanticPages {
public:
    SemanticPages() = default;
    explicit SemanticPages(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {}

    // One pattern per line; blank lines and lines starting with '#' ignored.
    static SemanticPages load(const std::filesystem::path& path);

    bool matches(std::string_view resource) const;
    bool empty() const { return patterns_.empty(); }
    const std::vector<std::string>& patterns() const { return patterns_; }

private:
    std::vector<std::string> patterns_;
};

enum class Granularity { Month, Week, Day };

std::optional<Granularity> parse_granularity(std::string_view name);
std::string_view to_string(Granularity granularity);

// UTC calendar label: "2002-07" (month), "2002-W29" (ISO week), "2002-07-31" (day).
// Lexicographic order of labels of one granularity is chronological.
std::string sub_period_label(Timestamp ts, Granularity granularity);

inline std::string assign_sub_period(const Navigation& nav, Granularity granularity) {
    return sub_period_label(nav.start(), granularity);
}

// Per-request duration is the gap to the next request of the navigation; the
// last request has duration 0. Throws on an empty navigation.
FeatureVector compute_features(const Navigation& nav, const SemanticPages& semantic_pages,
                               Granularity granularity = Granularity::Month);

enum class StandardizationScope { Global, PerSubPeriod };

std::optional<StandardizationScope> parse_scope(std::string_view name);
std::string_view to_string(StandardizationScope scope);

struct GroupStats {
    std::string label;  // "*" for the global scope
    std::size_t count = 0;
    FeatureValues mean{};
    FeatureValues stddev{};  // population standard deviation
    std::array<bool, kFeatureCount> constant{};
};

struct StandardizationStats {
    StandardizationScope scope = StandardizationScope::Global;
    std::vector<GroupStats> groups;  // sorted by label
};

// z-score per variable within each scope group; constant variables map to 0.
// Throws Error("undersized_group") when a group has fewer than two vectors.
std::pair<std::vector<FeatureVector>, StandardizationStats> standardize(
    std::vector<FeatureVector> vectors,
    StandardizationScope scope = StandardizationScope::Global);

// Feature table: header "nav_id\tsub_period\t<13 variable names>", one row per
// vector, values in shortest round-trip form.
void write_feature_table(const std::filesystem::path& path, std::span<const FeatureVector> vectors);
std::vector<FeatureVector> read_feature_table(const std::filesystem::path& path);

void write_stats(const std::filesystem::path& path, const StandardizationStats& stats);

}  // namespace wudrift
