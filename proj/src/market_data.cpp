#include "pricelab/market_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "csv.hpp"
#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

constexpr std::array<std::string_view, 10> kColumns = {
    "date", "kind", "strike", "expiry", "bid", "ask", "volume", "spot", "rate", "div_hist"};

}  // namespace

char kind_code(OptionKind kind) { return kind == OptionKind::Call ? 'C' : 'P'; }

std::string_view kind_name(OptionKind kind) { return kind == OptionKind::Call ? "call" : "put"; }

OptionKind parse_kind(std::string_view text) {
    if (text == "C" || text == "c" || text == "call" || text == "Call" || text == "CALL") {
        return OptionKind::Call;
    }
    if (text == "P" || text == "p" || text == "put" || text == "Put" || text == "PUT") {
        return OptionKind::Put;
    }
    throw DomainError("unknown option kind '" + std::string(text) + "'");
}

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) throw DomainError("invalid calendar date");
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view iso) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw DomainError("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [ptr, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len, out);
        if (ec != std::errc{} || ptr != iso.data() + pos + len) {
            throw DomainError("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
        }
    };
    num(0, 4, y);
    num(5, 2, m);
    num(8, 2, d);
    return Date(y, m, d);
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

OptionQuote OptionQuote::make(OptionKind kind, double strike, Date expiry, int ttm_days, double bid,
                              double ask, long long volume) {
    if (!(strike > 0.0)) throw DomainError("strike must be positive");
    if (ttm_days < 0) throw DomainError("time to maturity must be non-negative");
    if (!(bid >= 0.0)) throw DomainError("bid must be non-negative");
    if (!(ask >= bid)) throw DomainError("ask below bid");
    if (volume < 0) throw DomainError("volume must be non-negative");
    OptionQuote q;
    q.kind = kind;
    q.strike = strike;
    q.expiry = expiry;
    q.ttm_days = ttm_days;
    q.bid = bid;
    q.ask = ask;
    q.mid = (bid + ask) / 2.0;
    q.volume = volume;
    return q;
}

void sort_quotes(std::vector<OptionQuote>& quotes) {
    std::stable_sort(quotes.begin(), quotes.end(), [](const OptionQuote& a, const OptionQuote& b) {
        return std::tuple(a.kind, a.expiry, a.strike) < std::tuple(b.kind, b.expiry, b.strike);
    });
}

std::vector<DailyChain> parse_chains(std::string_view text) {
    std::map<Date, DailyChain> by_date;
    std::array<std::size_t, kColumns.size()> col{};
    std::optional<std::size_t> iv_col;
    std::size_t width = 0;
    bool have_header = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (nl == text.size()) break;
            continue;
        }
        auto fields = csv::split(line);

        if (!have_header) {
            if (fields[0].starts_with("\xEF\xBB\xBF")) fields[0].remove_prefix(3);  // BOM
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
                if (it == fields.end()) {
                    throw ParseError(line_no, "missing column '" + std::string(kColumns[c]) + "'");
                }
                col[c] = static_cast<std::size_t>(it - fields.begin());
            }
            if (auto it = std::find(fields.begin(), fields.end(), "implied_vol"); it != fields.end()) {
                iv_col = static_cast<std::size_t>(it - fields.begin());
            }
            width = fields.size();
            have_header = true;
            continue;
        }

        if (fields.size() != width) {
            throw ParseError(line_no, "expected " + std::to_string(width) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        Date date;
        Date expiry;
        OptionKind kind{};
        try {
            date = Date::parse(fields[col[0]]);
            expiry = Date::parse(fields[col[3]]);
            kind = parse_kind(fields[col[1]]);
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }
        const double strike = csv::parse_double(fields[col[2]], line_no, "strike");
        const double bid = csv::parse_double(fields[col[4]], line_no, "bid");
        const double ask = csv::parse_double(fields[col[5]], line_no, "ask");
        const long long volume = csv::parse_int(fields[col[6]], line_no, "volume");
        const double spot = csv::parse_double(fields[col[7]], line_no, "spot");
        const double rate = csv::parse_double(fields[col[8]], line_no, "rate");
        const double div_hist = csv::parse_double(fields[col[9]], line_no, "div_hist");

        if (!(spot > 0.0)) throw ParseError(line_no, "spot must be positive");
        if (bid > ask) throw ParseError(line_no, "bid exceeds ask");
        if (!(strike > 0.0)) throw ParseError(line_no, "strike must be positive");
        if (bid < 0.0) throw ParseError(line_no, "negative bid");
        if (volume < 0) throw ParseError(line_no, "negative volume");
        const int ttm = expiry - date;
        if (ttm < 0) throw ParseError(line_no, "expiry precedes quote date");

        auto [it, inserted] = by_date.try_emplace(date);
        DailyChain& chain = it->second;
        const MarketEnv env{date, spot, rate, div_hist};
        if (inserted) {
            chain.env = env;
        } else if (!(chain.env == env)) {
            throw ParseError(line_no, "market environment differs from earlier rows of " + date.iso());
        }
        OptionQuote q = OptionQuote::make(kind, strike, expiry, ttm, bid, ask, volume);
        if (iv_col && !fields[*iv_col].empty()) {
            q.implied_vol = csv::parse_double(fields[*iv_col], line_no, "implied_vol");
        }
        chain.quotes.push_back(q);
    }
    if (!have_header) throw ParseError(1, "missing header row");

    std::vector<DailyChain> out;
    out.reserve(by_date.size());
    for (auto& [date, chain] : by_date) {
        sort_quotes(chain.quotes);
        out.push_back(std::move(chain));
    }
    return out;
}

std::vector<DailyChain> load_chains(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_chains(ss.str());
}

std::string format_chains(std::span<const DailyChain> chains) {
    bool with_iv = false;
    for (const auto& c : chains) {
        for (const auto& q : c.quotes) with_iv = with_iv || q.implied_vol.has_value();
    }
    std::string out = "date,kind,strike,expiry,bid,ask,volume,spot,rate,div_hist";
    out += with_iv ? ",implied_vol\n" : "\n";
    for (const auto& c : chains) {
        const std::string date = c.env.date.iso();
        const std::string env_tail =
            csv::format_double(c.env.spot) + "," + csv::format_double(c.env.rate) + "," + csv::format_double(c.env.div_hist);
        for (const auto& q : c.quotes) {
            out += date;
            out += ',';
            out += kind_code(q.kind);
            out += ',' + csv::format_double(q.strike) + ',' + q.expiry.iso() + ',' + csv::format_double(q.bid) + ',' +
                   csv::format_double(q.ask) + ',' + std::to_string(q.volume) + ',' + env_tail;
            if (with_iv) {
                out += ',';
                if (q.implied_vol) out += csv::format_double(*q.implied_vol);
            }
            out += '\n';
        }
    }
    return out;
}

void save_chains(const std::filesystem::path& path, std::span<const DailyChain> chains) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << format_chains(chains);
}

DailyChain filter_liquidity(const DailyChain& chain, LiquidityFilter filter) {
    DailyChain out{chain.env, {}};
    for (const auto& q : chain.quotes) {
        if (q.ttm_days >= filter.min_ttm_days && q.volume >= filter.min_volume) out.quotes.push_back(q);
    }
    return out;
}

TrimResult trim(const DailyChain& chain, TrimFilter filter) {
    TrimResult res;
    res.chain.env = chain.env;
    for (const auto& q : chain.quotes) {
        if (!q.implied_vol) {
            ++res.removed_missing_iv;
        } else if (q.mid < filter.min_price) {
            ++res.removed_price;
        } else if (*q.implied_vol > filter.max_iv) {
            ++res.removed_iv;
        } else {
            res.chain.quotes.push_back(q);
        }
    }
    return res;
}

DailyChain select_kind(const DailyChain& chain, OptionKind kind) {
    DailyChain out{chain.env, {}};
    for (const auto& q : chain.quotes) {
        if (q.kind == kind) out.quotes.push_back(q);
    }
    return out;
}

std::vector<PricePoint> price_points(std::span<const OptionQuote> quotes, OptionKind kind) {
    std::vector<PricePoint> out;
    for (const auto& q : quotes) {
        if (q.kind == kind) out.push_back({q.strike, q.tau(), q.mid});
    }
    return out;
}

std::pair<double, double> strike_range(const DailyChain& chain) {
    if (chain.quotes.empty()) throw InsufficientData("empty chain has no strike range");
    auto [lo, hi] = std::minmax_element(
        chain.quotes.begin(), chain.quotes.end(),
        [](const OptionQuote& a, const OptionQuote& b) { return a.strike < b.strike; });
    return {lo->strike, hi->strike};
}

}  // namespace pricelab
