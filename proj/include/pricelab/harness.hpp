#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pricelab/error_report.hpp"
#include "pricelab/estimators.hpp"
#include "pricelab/market_data.hpp"

namespace pricelab {

inline constexpr std::uint64_t kDefaultMasterSeed = 20120103;
inline constexpr double kDefaultTrainFraction = 0.9;

struct DaySplit {
    Date date;
    std::vector<std::size_t> train_idx;  // ascending
    std::vector<std::size_t> test_idx;   // ascending
    std::uint64_t seed = 0;
};

/// Per-day seed derived from the master seed and the date.
std::uint64_t day_seed(std::uint64_t master_seed, Date date);

/// min(ceil(fraction N), N - 1) training quotes for N >= 2 (all of them for N = 1),
/// drawn uniformly.
std::size_t train_size(std::size_t n, double fraction);
DaySplit split_day(const DailyChain& chain, double fraction, std::uint64_t seed);

struct PricingError {
    Date date;
    EstimatorLabel label = EstimatorLabel::LI;
    double strike = 0.0;
    double tau = 0.0;
    double true_price = 0.0;
    std::optional<double> est_price;
    std::optional<double> rel_error;  // fraction
    PredictionStatus status = PredictionStatus::Failed;
    bool in_train_hull = false;  // (K / S, tau) inside the hull of the training quotes
};

/// Partitions of the error sample.
enum class Partition { All, Hull, NoHull, Gt1 };

std::string_view partition_name(Partition p);
Partition parse_partition(std::string_view text);
std::vector<Partition> parse_partitions(std::string_view csv);
inline constexpr std::array<Partition, 4> kAllPartitions = {Partition::All, Partition::Hull,
                                                            Partition::NoHull, Partition::Gt1};

bool in_partition(const PricingError& e, Partition p);

/// Fits `label` on the training quotes of a single-kind chain and prices its test quotes.
/// Fit failures mark every test quote Failed.
std::vector<PricingError> evaluate_day(EstimatorLabel label, const DailyChain& kind_chain,
                                       const DaySplit& split, const FitContext& ctx);

/// Statistics over the errors of `label` falling in the partition.
ErrorReport aggregate(std::span<const PricingError> errors, EstimatorLabel label, Partition p);

/// Record counts of one (day, label): every test quote is in exactly one of
/// in_hull, outside_hull (both excluding failures) and failed.
struct DayAccounting {
    Date date;
    EstimatorLabel label = EstimatorLabel::LI;
    std::size_t total = 0;
    std::size_t in_hull = 0;
    std::size_t outside_hull = 0;
    std::size_t failed = 0;
    std::size_t priced = 0;  // carrying a relative error
};

std::vector<DayAccounting> account(std::span<const PricingError> errors);

struct EvalConfig {
    std::uint64_t master_seed = kDefaultMasterSeed;
    double fraction = kDefaultTrainFraction;
    OptionKind kind = OptionKind::Put;
    bool liquidity = true;
    LiquidityFilter liquidity_filter;
    bool trim = false;
    TrimFilter trim_filter;
    std::vector<EstimatorLabel> labels = {EstimatorLabel::LI, EstimatorLabel::BS,
                                          EstimatorLabel::NW, EstimatorLabel::NWCV,
                                          EstimatorLabel::BSNW, EstimatorLabel::BSNWCV,
                                          EstimatorLabel::LIB};
    std::vector<Partition> partitions = {kAllPartitions.begin(), kAllPartitions.end()};
    unsigned threads = 0;  // 0: hardware concurrency
    VgInit vg_init;
};

/// key=value lines (`#` comments): master_seed, fraction, kind, liquidity, min_ttm_days,
/// min_volume, trim, max_iv, min_price, labels, partitions, threads.
EvalConfig parse_config(std::string_view text, EvalConfig base = {});
EvalConfig load_config(const std::filesystem::path& path, EvalConfig base = {});

struct DayPreparation {
    DailyChain chain;  // filtered, single kind
    FitContext context;
    std::size_t removed_liquidity = 0;
    std::size_t removed_trim = 0;
};

/// Liquidity filter, dividend curve from the full day, optional trim, then the kind.
DayPreparation prepare_day(const DailyChain& day, const EvalConfig& config);

struct Evaluation {
    std::vector<PricingError> errors;  // ordered by date, label, test index
    std::vector<DayAccounting> accounting;
    std::vector<ErrorReport> reports;  // label-major, then partition
};

Evaluation run_evaluation(std::span<const DailyChain> days, const EvalConfig& config);

/// Writes errors.csv, accounting.csv, report_<label>_<partition>.csv and summary.txt.
void write_evaluation(const Evaluation& ev, const std::filesystem::path& dir);

std::string format_errors_csv(std::span<const PricingError> errors);
std::vector<PricingError> parse_errors_csv(std::string_view text);
std::vector<PricingError> load_errors_csv(const std::filesystem::path& path);

std::vector<ErrorReport> build_reports(std::span<const PricingError> errors,
                                       std::span<const EstimatorLabel> labels,
                                       std::span<const Partition> partitions);
/// One aligned table per partition, one column per label.
std::string render_tables(std::span<const ErrorReport> reports);

struct CrossDatePair {
    Date date_a;
    Date date_b;
    OptionKind kind = OptionKind::Put;
    double strike = 0.0;
    int ttm_days = 0;
    double price_a = 0.0;
    double price_b = 0.0;
    double diff = 0.0;  // price_b - price_a
};

inline constexpr double kDefaultSpotTolerance = 0.05;

/// Quotes with equal (kind, strike, ttm_days) on two dates whose spots differ by at
/// most `spot_tolerance`.
std::vector<CrossDatePair> cross_date_report(std::span<const DailyChain> chains,
                                             double spot_tolerance = kDefaultSpotTolerance);
std::string format_cross_date_csv(std::span<const CrossDatePair> pairs);

}  // namespace pricelab
