#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pricelab {

enum class OptionKind { Call, Put };

char kind_code(OptionKind kind);             // 'C' or 'P'
OptionKind parse_kind(std::string_view text);  // accepts C/P/call/put, throws DomainError
std::string_view kind_name(OptionKind kind);   // "call" / "put"

/// Calendar date with day resolution.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses YYYY-MM-DD. Throws DomainError on malformed input.
    static Date parse(std::string_view iso);

    std::string iso() const;
    std::int64_t serial() const { return days_.time_since_epoch().count(); }
    std::chrono::sys_days days() const { return days_; }

    Date plus_days(int n) const { return Date(days_ + std::chrono::days(n)); }
    friend int operator-(const Date& a, const Date& b) {
        return static_cast<int>((a.days_ - b.days_).count());
    }
    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

/// Year fraction used wherever a maturity in years is needed.
inline constexpr double kDaysPerYear = 365.0;
inline double years_from_days(int days) { return static_cast<double>(days) / kDaysPerYear; }

struct OptionQuote {
    OptionKind kind = OptionKind::Put;
    double strike = 0.0;
    Date expiry;
    int ttm_days = 0;
    double bid = 0.0;
    double ask = 0.0;
    double mid = 0.0;
    long long volume = 0;
    std::optional<double> implied_vol;

    double tau() const { return years_from_days(ttm_days); }

    /// Builds a quote with mid = (bid + ask) / 2, validating the quote invariants.
    static OptionQuote make(OptionKind kind, double strike, Date expiry, int ttm_days, double bid,
                            double ask, long long volume);

    friend bool operator==(const OptionQuote&, const OptionQuote&) = default;
};

struct MarketEnv {
    Date date;
    double spot = 0.0;
    double rate = 0.0;
    double div_hist = 0.0;

    friend bool operator==(const MarketEnv&, const MarketEnv&) = default;
};

struct DailyChain {
    MarketEnv env;
    std::vector<OptionQuote> quotes;

    friend bool operator==(const DailyChain&, const DailyChain&) = default;
};

/// A (strike, maturity in years, price) observation, the input of every estimator.
struct PricePoint {
    double strike = 0.0;
    double tau = 0.0;
    double price = 0.0;
};

/// Price points of the quotes of `kind` (mid prices).
std::vector<PricePoint> price_points(std::span<const OptionQuote> quotes, OptionKind kind);

/// Sorts quotes by (kind, expiry, strike); calls before puts.
void sort_quotes(std::vector<OptionQuote>& quotes);

/// Reads the chain CSV (`date,kind,strike,expiry,bid,ask,volume,spot,rate,div_hist[,implied_vol]`).
/// Returns one chain per distinct date in ascending date order.
std::vector<DailyChain> load_chains(const std::filesystem::path& path);
std::vector<DailyChain> parse_chains(std::string_view csv_text);

/// Writes chains in the same schema; the implied_vol column is added when any quote carries one.
void save_chains(const std::filesystem::path& path, std::span<const DailyChain> chains);
std::string format_chains(std::span<const DailyChain> chains);

struct LiquidityFilter {
    int min_ttm_days = 1;
    long long min_volume = 100;
};

/// Keeps quotes with ttm_days >= min_ttm_days and volume >= min_volume.
DailyChain filter_liquidity(const DailyChain& chain, LiquidityFilter filter = {});

struct TrimFilter {
    double max_iv = 0.7;
    double min_price = 0.125;
};

struct TrimResult {
    DailyChain chain;
    std::size_t removed_price = 0;
    std::size_t removed_iv = 0;
    std::size_t removed_missing_iv = 0;
};

/// Keeps quotes with mid >= min_price and implied_vol <= max_iv. Quotes without an
/// implied volatility are discarded and counted.
TrimResult trim(const DailyChain& chain, TrimFilter filter = {});

/// Quotes of a single kind, keeping the environment.
DailyChain select_kind(const DailyChain& chain, OptionKind kind);

/// Smallest and largest strike across all quotes of the chain.
std::pair<double, double> strike_range(const DailyChain& chain);

}  // namespace pricelab
