#include "pricelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

#include <boost/random/uniform_int_distribution.hpp>

#include "csv.hpp"
#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string trim_copy(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw DomainError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

double to_double(const std::string& v, const std::string& key) {
    try {
        return csv::parse_double(v, 0, key.c_str());
    } catch (const ParseError&) {
        throw DomainError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& v, const std::string& key) {
    try {
        return csv::parse_int(v, 0, key.c_str());
    } catch (const ParseError&) {
        throw DomainError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
}

ConvexHull normalized_hull(std::span<const OptionQuote> quotes, double spot) {
    std::vector<Point2> pts;
    pts.reserve(quotes.size());
    for (const auto& q : quotes) pts.push_back({q.strike / spot, q.tau()});
    return ConvexHull(pts);
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
}

}  // namespace

std::uint64_t day_seed(std::uint64_t master_seed, Date date) {
    return splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(date.serial())));
}

std::size_t train_size(std::size_t n, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("split: fraction must be in (0, 1)");
    if (n <= 1) return n;
    const auto want = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(want, 1, n - 1);
}

DaySplit split_day(const DailyChain& chain, double fraction, std::uint64_t seed) {
    const std::size_t n = chain.quotes.size();
    const std::size_t k = train_size(n, fraction);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 engine(seed);
    for (std::size_t i = 0; i < k; ++i) {
        boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(engine)]);
    }
    DaySplit s;
    s.date = chain.env.date;
    s.seed = seed;
    s.train_idx.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    s.test_idx.assign(idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    std::sort(s.train_idx.begin(), s.train_idx.end());
    std::sort(s.test_idx.begin(), s.test_idx.end());
    return s;
}

std::string_view partition_name(Partition p) {
    switch (p) {
        case Partition::All: return "all";
        case Partition::Hull: return "hull";
        case Partition::NoHull: return "nohull";
        case Partition::Gt1: return "gt1";
    }
    return "?";
}

Partition parse_partition(std::string_view text) {
    const std::string t = trim_copy(text);
    for (auto p : kAllPartitions) {
        if (t == partition_name(p)) return p;
    }
    throw DomainError("unknown partition '" + t + "'");
}

std::vector<Partition> parse_partitions(std::string_view csv_text) {
    std::vector<Partition> out;
    for (auto item : csv::split(csv_text)) {
        if (item.empty()) continue;
        const auto p = parse_partition(item);
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    if (out.empty()) throw DomainError("empty partition list");
    return out;
}

bool in_partition(const PricingError& e, Partition p) {
    switch (p) {
        case Partition::All: return true;
        case Partition::Hull: return e.in_train_hull;
        case Partition::NoHull: return !e.in_train_hull;
        case Partition::Gt1: return e.true_price > 1.0;
    }
    return false;
}

std::vector<PricingError> evaluate_day(EstimatorLabel label, const DailyChain& kind_chain,
                                       const DaySplit& split, const FitContext& ctx) {
    const auto& quotes = kind_chain.quotes;
    std::vector<OptionQuote> train;
    train.reserve(split.train_idx.size());
    for (auto i : split.train_idx) train.push_back(quotes.at(i));
    const ConvexHull hull = normalized_hull(train, ctx.env.spot);

    std::optional<PricingEstimator> est;
    std::string fit_error;
    if (!train.empty()) {
        try {
            est = PricingEstimator::fit(label, train.front().kind, train, ctx);
        } catch (const Error& e) {
            fit_error = e.what();
        }
    }

    std::vector<PricingError> out;
    out.reserve(split.test_idx.size());
    for (auto i : split.test_idx) {
        const auto& q = quotes.at(i);
        PricingError r;
        r.date = kind_chain.env.date;
        r.label = label;
        r.strike = q.strike;
        r.tau = q.tau();
        r.true_price = q.mid;
        r.in_train_hull = hull.contains({q.strike / ctx.env.spot, q.tau()});
        if (est && q.ttm_days > 0) {
            const auto p = est->predict(q.strike, r.tau);
            r.status = p.status;
            r.est_price = p.price;
            if (p.price && q.mid > 0.0) r.rel_error = std::abs(1.0 - *p.price / q.mid);
        } else {
            r.status = PredictionStatus::Failed;
        }
        out.push_back(r);
    }
    return out;
}

ErrorReport aggregate(std::span<const PricingError> errors, EstimatorLabel label, Partition p) {
    std::vector<double> sample;
    for (const auto& e : errors) {
        if (e.label == label && e.rel_error && in_partition(e, p)) sample.push_back(*e.rel_error);
    }
    return summarize_errors(sample, std::string(label_name(label)), std::string(partition_name(p)));
}

std::vector<DayAccounting> account(std::span<const PricingError> errors) {
    std::vector<DayAccounting> out;
    std::map<std::pair<std::int64_t, EstimatorLabel>, std::size_t> slot;
    for (const auto& e : errors) {
        const auto key = std::pair{e.date.serial(), e.label};
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, out.size()).first;
            out.push_back({e.date, e.label});
        }
        auto& a = out[it->second];
        ++a.total;
        if (e.status == PredictionStatus::Failed) {
            ++a.failed;
        } else if (e.in_train_hull) {
            ++a.in_hull;
        } else {
            ++a.outside_hull;
        }
        if (e.rel_error) ++a.priced;
    }
    return out;
}

EvalConfig parse_config(std::string_view text, EvalConfig cfg) {
    std::size_t line_no = 0;
    for (auto raw : csv::lines(text)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const std::string line = trim_copy(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
        const std::string key = trim_copy(std::string_view(line).substr(0, eq));
        const std::string value = trim_copy(std::string_view(line).substr(eq + 1));
        if (key == "master_seed" || key == "seed") {
            cfg.master_seed = static_cast<std::uint64_t>(to_int(value, key));
        } else if (key == "fraction") {
            cfg.fraction = to_double(value, key);
        } else if (key == "kind") {
            cfg.kind = parse_kind(value);
        } else if (key == "liquidity") {
            cfg.liquidity = parse_bool(value, key);
        } else if (key == "min_ttm_days") {
            cfg.liquidity_filter.min_ttm_days = static_cast<int>(to_int(value, key));
        } else if (key == "min_volume") {
            cfg.liquidity_filter.min_volume = to_int(value, key);
        } else if (key == "trim") {
            cfg.trim = parse_bool(value, key);
        } else if (key == "max_iv") {
            cfg.trim_filter.max_iv = to_double(value, key);
        } else if (key == "min_price") {
            cfg.trim_filter.min_price = to_double(value, key);
        } else if (key == "labels") {
            cfg.labels = parse_labels(value);
        } else if (key == "partitions") {
            cfg.partitions = parse_partitions(value);
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(to_int(value, key));
        } else {
            throw ParseError(line_no, "unknown config key '" + key + "'");
        }
    }
    train_size(2, cfg.fraction);  // validates the fraction
    return cfg;
}

EvalConfig load_config(const std::filesystem::path& path, EvalConfig base) {
    return parse_config(csv::read_file(path.string()), std::move(base));
}

DayPreparation prepare_day(const DailyChain& day, const EvalConfig& config) {
    DayPreparation prep;
    DailyChain chain = config.liquidity ? filter_liquidity(day, config.liquidity_filter) : day;
    prep.removed_liquidity = day.quotes.size() - chain.quotes.size();
    const auto before = chain.quotes.size();
    std::erase_if(chain.quotes, [](const OptionQuote& q) { return !(q.mid > 0.0); });
    prep.removed_liquidity += before - chain.quotes.size();

    prep.context.env = chain.env;
    try {
        prep.context.curve = estimate_dividend_curve(chain);
    } catch (const NoAtmPairs&) {
        prep.context.curve = DividendCurve();
    }
    if (config.trim) {
        const auto& ctx = prep.context;
        fill_implied_vols(chain, [&ctx](double tau) { return ctx.dividend(tau); });
        auto t = trim(chain, config.trim_filter);
        prep.removed_trim = t.removed_price + t.removed_iv + t.removed_missing_iv;
        chain = std::move(t.chain);
    }
    if (!chain.quotes.empty()) prep.context.augment_strikes = strike_range(chain);
    prep.context.vg_init = config.vg_init;
    prep.chain = select_kind(chain, config.kind);
    return prep;
}

Evaluation run_evaluation(std::span<const DailyChain> days, const EvalConfig& config) {
    std::vector<std::vector<PricingError>> per_day(days.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t d = next++; d < days.size(); d = next++) {
            const auto prep = prepare_day(days[d], config);
            const auto split = split_day(prep.chain, config.fraction,
                                         day_seed(config.master_seed, days[d].env.date));
            for (auto label : config.labels) {
                auto errs = evaluate_day(label, prep.chain, split, prep.context);
                per_day[d].insert(per_day[d].end(), errs.begin(), errs.end());
            }
        }
    };
    unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(std::max<std::size_t>(days.size(), 1)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    Evaluation ev;
    for (auto& v : per_day) ev.errors.insert(ev.errors.end(), v.begin(), v.end());
    ev.accounting = account(ev.errors);
    ev.reports = build_reports(ev.errors, config.labels, config.partitions);
    return ev;
}

std::vector<ErrorReport> build_reports(std::span<const PricingError> errors,
                                       std::span<const EstimatorLabel> labels,
                                       std::span<const Partition> partitions) {
    std::vector<ErrorReport> out;
    for (auto l : labels) {
        for (auto p : partitions) out.push_back(aggregate(errors, l, p));
    }
    return out;
}

std::string render_tables(std::span<const ErrorReport> reports) {
    std::vector<std::string> order;
    for (const auto& r : reports) {
        if (std::find(order.begin(), order.end(), r.partition) == order.end()) {
            order.push_back(r.partition);
        }
    }
    std::string out;
    for (const auto& part : order) {
        std::vector<ErrorReport> cols;
        for (const auto& r : reports) {
            if (r.partition == part) cols.push_back(r);
        }
        if (!out.empty()) out += "\n";
        out += render_report_table(cols, "Relative pricing errors (%), partition: " + part);
    }
    return out;
}

std::string format_errors_csv(std::span<const PricingError> errors) {
    std::string out = "date,label,strike,tau,true_price,est_price,rel_error,status,in_train_hull\n";
    for (const auto& e : errors) {
        out += e.date.iso() + ',' + std::string(label_name(e.label)) + ',' +
               csv::format_double(e.strike) + ',' + csv::format_double(e.tau) + ',' +
               csv::format_double(e.true_price) + ',' + fmt_opt(e.est_price) + ',' +
               fmt_opt(e.rel_error) + ',' + std::string(status_name(e.status)) + ',' +
               (e.in_train_hull ? "1" : "0") + '\n';
    }
    return out;
}

std::vector<PricingError> parse_errors_csv(std::string_view text) {
    std::vector<PricingError> out;
    std::size_t line_no = 0;
    for (auto line : csv::lines(text)) {
        ++line_no;
        if (line_no == 1 || csv::split(line).front().empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 9) throw ParseError(line_no, "expected 9 fields");
        PricingError e;
        try {
            e.date = Date::parse(f[0]);
            e.label = parse_label(f[1]);
            e.status = parse_status(f[7]);
        } catch (const DomainError& err) {
            throw ParseError(line_no, err.what());
        }
        e.strike = csv::parse_double(f[2], line_no, "strike");
        e.tau = csv::parse_double(f[3], line_no, "tau");
        e.true_price = csv::parse_double(f[4], line_no, "true_price");
        if (!f[5].empty()) e.est_price = csv::parse_double(f[5], line_no, "est_price");
        if (!f[6].empty()) e.rel_error = csv::parse_double(f[6], line_no, "rel_error");
        e.in_train_hull = f[8] == "1";
        out.push_back(e);
    }
    return out;
}

std::vector<PricingError> load_errors_csv(const std::filesystem::path& path) {
    return parse_errors_csv(csv::read_file(path.string()));
}

void write_evaluation(const Evaluation& ev, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    csv::write_file((dir / "errors.csv").string(), format_errors_csv(ev.errors));

    std::string acc = "date,label,total,in_hull,outside_hull,failed,priced\n";
    for (const auto& a : ev.accounting) {
        acc += a.date.iso() + ',' + std::string(label_name(a.label)) + ',' +
               std::to_string(a.total) + ',' + std::to_string(a.in_hull) + ',' +
               std::to_string(a.outside_hull) + ',' + std::to_string(a.failed) + ',' +
               std::to_string(a.priced) + '\n';
    }
    csv::write_file((dir / "accounting.csv").string(), acc);

    for (const auto& r : ev.reports) {
        csv::write_file((dir / ("report_" + r.label + "_" + r.partition + ".csv")).string(),
                        format_report_csv(r));
    }
    csv::write_file((dir / "summary.txt").string(), render_tables(ev.reports));
}

std::vector<CrossDatePair> cross_date_report(std::span<const DailyChain> chains,
                                             double spot_tolerance) {
    std::vector<CrossDatePair> out;
    using Key = std::tuple<int, double, int>;
    for (std::size_t a = 0; a < chains.size(); ++a) {
        std::map<Key, double> first;
        for (const auto& q : chains[a].quotes) {
            first.emplace(Key{static_cast<int>(q.kind), q.strike, q.ttm_days}, q.mid);
        }
        for (std::size_t b = a + 1; b < chains.size(); ++b) {
            if (!(std::abs(chains[a].env.spot - chains[b].env.spot) <= spot_tolerance)) continue;
            for (const auto& q : chains[b].quotes) {
                auto it = first.find(Key{static_cast<int>(q.kind), q.strike, q.ttm_days});
                if (it == first.end()) continue;
                out.push_back({chains[a].env.date, chains[b].env.date, q.kind, q.strike,
                               q.ttm_days, it->second, q.mid, q.mid - it->second});
            }
        }
    }
    return out;
}

std::string format_cross_date_csv(std::span<const CrossDatePair> pairs) {
    std::string out = "date_a,date_b,kind,strike,ttm_days,price_a,price_b,diff\n";
    for (const auto& p : pairs) {
        out += p.date_a.iso() + ',' + p.date_b.iso() + ',' + kind_code(p.kind) + ',' +
               csv::format_double(p.strike) + ',' + std::to_string(p.ttm_days) + ',' +
               csv::format_double(p.price_a) + ',' + csv::format_double(p.price_b) + ',' +
               csv::format_double(p.diff) + '\n';
    }
    return out;
}

}  // namespace pricelab
