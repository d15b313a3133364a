#pragma once

// Strategy-versus-strategy comparison per sub-period. Corrected Rand is
// symmetric, so it is computed once per unordered pair; F-measure is not,
// so both orders are kept along with their boxplot summaries.

#include <filesystem>
#include <string>
#include <vector>

#include "wudrift/eval.hpp"
#include "wudrift/strategies.hpp"

namespace wudrift {

struct Summary {
    std::size_t count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

// Quartiles by linear interpolation between order statistics. Throws on empty input.
Summary summarize(std::vector<double> values);

struct CrEntry {
    std::string sub_period;
    std::string first, second;
    double value = 0.0;
};

struct FEntry {
    std::string sub_period;
    std::string apriori, reached;
    FMeasureResult result;
};

struct PairSummary {
    std::string first, second;
    Summary summary;
};

struct FSummary {
    std::string sub_period;
    std::string apriori, reached;
    Summary summary;  // over the per-cluster values
};

struct ReportBundle {
    std::vector<std::string> strategies;   // display names, in input order
    std::vector<std::string> sub_periods;
    std::vector<CrEntry> cr;               // unordered pairs, per sub-period
    std::vector<FEntry> f;                 // ordered pairs, per sub-period
    std::vector<PairSummary> cr_summary;   // per unordered pair, over sub-periods
    std::vector<FSummary> f_summary;       // per ordered pair and sub-period

    double cr_value(const std::string& sub_period, const std::string& a, const std::string& b) const;
    const FEntry* f_entry(const std::string& sub_period, const std::string& apriori,
                          const std::string& reached) const;
};

// Throws Error("period_mismatch") when results disagree on their sub-periods.
ReportBundle compare_strategies(const std::vector<StrategyResult>& results);

// Writes cr.csv, cr_matrix.csv, f_measure.csv and summary.json under `dir`.
void write_report(const std::filesystem::path& dir, const ReportBundle& bundle);

}  // namespace wudrift
