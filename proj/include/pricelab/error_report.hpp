#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pricelab {

/// Error thresholds (percent) of the empirical distribution block.
inline constexpr std::array<double, 7> kCdfThresholdsPct = {1, 5, 10, 20, 25, 30, 50};

/// Descriptive statistics of a sample of relative errors, in percent.
struct ErrorStats {
    double mean = 0.0;
    double std = 0.0;  // divisor n - 1; zero for a single error
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct ErrorReport {
    std::string label;
    std::string partition;
    std::size_t count = 0;
    std::optional<ErrorStats> stats;  // absent for an empty sample
    /// (threshold in percent, fraction of errors <= threshold)
    std::vector<std::pair<double, double>> cdf;

    double cdf_at(double threshold_pct) const;
};

/// Summarizes relative errors given as fractions (0.01 == 1%).
ErrorReport summarize_errors(std::span<const double> rel_errors, std::string label = {},
                             std::string partition = {});

/// Two-block CSV: `stat,value` then, after a blank line, `threshold_pct,cdf`.
std::string format_report_csv(const ErrorReport& report);

/// Aligned-text table: rows are statistics, columns are the given reports.
std::string render_report_table(std::span<const ErrorReport> reports, const std::string& title);

}  // namespace pricelab
