#include "pricelab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "csv.hpp"
#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/harness.hpp"
#include "pricelab/parity.hpp"
#include "pricelab/synth.hpp"

namespace pricelab {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string input;
    std::string output_dir = ".";
    std::uint64_t seed = kDefaultMasterSeed;
    std::string labels;
    std::string kind = "put";
    bool trim = false;
    double fraction = kDefaultTrainFraction;
    std::string partitions;
    std::string config;
    unsigned threads = 0;

    // synth
    std::string model = "bs";
    SynthSpec synth;
    std::string start = "2012-01-03";

    // audit
    double spot_tolerance = kDefaultSpotTolerance;

    // calibrate-vg / price
    std::string date;
    std::string label = "LI";
    std::string queries;
    bool multi_start = false;
};

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw Error(std::string("missing ") + what);
    if (!fs::is_regular_file(path)) throw Error(std::string(what) + " '" + path + "' not found");
}

fs::path output_dir(const Options& o) {
    fs::create_directories(o.output_dir);
    return o.output_dir;
}

const DailyChain& pick_day(const std::vector<DailyChain>& chains, const std::string& date) {
    if (chains.empty()) throw InsufficientData("input holds no quotes");
    if (date.empty()) return chains.front();
    const Date d = Date::parse(date);
    for (const auto& c : chains) {
        if (c.env.date == d) return c;
    }
    throw Error("date " + date + " not present in the input");
}

EvalConfig eval_config(const Options& o, const CLI::App& sub) {
    EvalConfig cfg;
    if (!o.config.empty()) {
        require_file(o.config, "config file");
        cfg = load_config(o.config);
    }
    if (sub.count("--seed") || o.config.empty()) cfg.master_seed = o.seed;
    if (sub.count("--fraction")) cfg.fraction = o.fraction;
    if (sub.count("--kind")) cfg.kind = parse_kind(o.kind);
    if (o.trim) cfg.trim = true;
    if (!o.labels.empty()) cfg.labels = parse_labels(o.labels);
    if (!o.partitions.empty()) cfg.partitions = parse_partitions(o.partitions);
    if (sub.count("--threads")) cfg.threads = o.threads;
    if (const char* env = std::getenv("PRICELAB_SEED"); env && *env) {
        cfg.master_seed = static_cast<std::uint64_t>(csv::parse_int(env, 0, "PRICELAB_SEED"));
    }
    train_size(2, cfg.fraction);
    return cfg;
}

int cmd_ingest(const Options& o, std::ostream& out) {
    require_file(o.input, "input file");
    auto chains = load_chains(o.input);
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t no_iv = 0;
    for (auto& c : chains) {
        const auto before = c.quotes.size();
        c = filter_liquidity(c);
        dropped += before - c.quotes.size();
        DividendCurve curve;
        try {
            curve = estimate_dividend_curve(c);
        } catch (const NoAtmPairs&) {
        }
        const double hist = c.env.div_hist;
        no_iv += fill_implied_vols(c, [&](double tau) { return curve.empty() ? hist : curve(tau); });
        kept += c.quotes.size();
    }
    const auto path = output_dir(o) / "chains.csv";
    save_chains(path, chains);
    out << "days " << chains.size() << ", quotes kept " << kept << ", dropped by liquidity "
        << dropped << ", without implied vol " << no_iv << "\nwrote " << path.string() << "\n";
    return 0;
}

int cmd_synth(Options o, std::ostream& out) {
    if (o.model == "bs") {
        o.synth.model = SynthModel::BS;
    } else if (o.model == "vg") {
        o.synth.model = SynthModel::VG;
    } else {
        throw DomainError("unknown model '" + o.model + "' (bs or vg)");
    }
    o.synth.seed = o.seed;
    if (const char* env = std::getenv("PRICELAB_SEED"); env && *env) {
        o.synth.seed = static_cast<std::uint64_t>(csv::parse_int(env, 0, "PRICELAB_SEED"));
    }
    o.synth.start = Date::parse(o.start);
    const auto chains = synth_chains(o.synth);
    const auto path = output_dir(o) / "chains.csv";
    save_chains(path, chains);
    out << "wrote " << chains.size() << " days to " << path.string() << "\n";
    return 0;
}

int cmd_audit(const Options& o, std::ostream& out) {
    require_file(o.input, "input file");
    const auto chains = load_chains(o.input);
    std::string summary = "date,knots,audited,unmatched,mean_error_pct,median_error_pct\n";
    std::string knots = "date,tau,qbar\n";
    for (const auto& raw : chains) {
        const auto day = filter_liquidity(raw);
        DividendCurve curve;
        try {
            curve = estimate_dividend_curve(day);
        } catch (const NoAtmPairs&) {
            out << day.env.date.iso() << ": no ATM call/put pair, using the historical dividend\n";
        }
        const auto audit = itm_parity_audit(day, curve);
        for (const auto& k : curve.knots()) {
            knots += day.env.date.iso() + ',' + csv::format_double(k.tau) + ',' +
                     csv::format_double(k.qbar) + '\n';
        }
        const auto& st = audit.report.stats;
        summary += day.env.date.iso() + ',' + std::to_string(curve.knots().size()) + ',' +
                   std::to_string(audit.report.count) + ',' + std::to_string(audit.unmatched) +
                   ',' + (st ? csv::format_double(st->mean) : "") + ',' +
                   (st ? csv::format_double(st->median) : "") + '\n';
    }
    const auto dir = output_dir(o);
    csv::write_file((dir / "audit.csv").string(), summary);
    csv::write_file((dir / "dividend_curve.csv").string(), knots);
    const auto pairs = cross_date_report(chains, o.spot_tolerance);
    csv::write_file((dir / "cross_date.csv").string(), format_cross_date_csv(pairs));
    out << "audited " << chains.size() << " days, " << pairs.size()
        << " cross-date pairs\nwrote " << (dir / "audit.csv").string() << "\n";
    return 0;
}

int cmd_evaluate(const Options& o, const CLI::App& sub, std::ostream& out) {
    require_file(o.input, "input file");
    const auto cfg = eval_config(o, sub);
    const auto chains = load_chains(o.input);
    const auto ev = run_evaluation(chains, cfg);
    const auto dir = output_dir(o);
    write_evaluation(ev, dir);
    out << render_tables(ev.reports) << "\nwrote reports to " << dir.string() << "\n";
    return 0;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    require_file(o.input, "input file");
    const auto chains = load_chains(o.input);
    const auto day = filter_liquidity(pick_day(chains, o.date));
    const OptionKind kind = parse_kind(o.kind);
    DividendCurve curve;
    try {
        curve = estimate_dividend_curve(day);
    } catch (const NoAtmPairs&) {
    }
    std::vector<VgQuote> quotes;
    for (const auto& q : day.quotes) {
        if (q.kind != kind || !(q.mid > 0.0) || q.ttm_days <= 0) continue;
        quotes.push_back({q.strike, q.tau(), q.mid, curve.empty() ? day.env.div_hist : curve(q.tau())});
    }
    VgCalibrationOptions opts;
    opts.multi_start = o.multi_start;
    const auto fit = vg_calibrate(quotes, kind, day.env.spot, day.env.rate, {}, opts);
    const auto path = output_dir(o) / "vg_fit.csv";
    csv::write_file(path.string(),
                    "date,theta,sigma,alpha,eta,objective\n" + day.env.date.iso() + ',' +
                        csv::format_double(fit.params.theta()) + ',' +
                        csv::format_double(fit.params.sigma()) + ',' +
                        csv::format_double(fit.params.alpha()) + ',' +
                        csv::format_double(fit.params.eta()) + ',' +
                        csv::format_double(fit.objective) + '\n');
    out << "theta " << fit.params.theta() << " sigma " << fit.params.sigma() << " alpha "
        << fit.params.alpha() << " objective " << fit.objective << "\nwrote " << path.string()
        << "\n";
    return 0;
}

int cmd_price(const Options& o, std::ostream& out) {
    require_file(o.input, "input file");
    require_file(o.queries, "query file");
    const auto chains = load_chains(o.input);
    EvalConfig cfg;
    cfg.kind = parse_kind(o.kind);
    cfg.trim = o.trim;
    const auto prep = prepare_day(pick_day(chains, o.date), cfg);
    const auto est =
        PricingEstimator::fit(parse_label(o.label), cfg.kind, prep.chain.quotes, prep.context);

    const std::string text = csv::read_file(o.queries);
    std::string result = "K,tau,price,status\n";
    std::size_t line_no = 0;
    for (auto line : csv::lines(text)) {
        ++line_no;
        const auto f = csv::split(line);
        if (f.front().empty()) continue;
        if (line_no == 1 && (f.front() == "K" || f.front() == "strike")) continue;
        if (f.size() < 2) throw ParseError(line_no, "expected K,tau");
        const double k = csv::parse_double(f[0], line_no, "K");
        const double tau = csv::parse_double(f[1], line_no, "tau");
        const auto p = est.predict(k, tau);
        result += csv::format_double(k) + ',' + csv::format_double(tau) + ',' +
                  (p.price ? csv::format_double(*p.price) : std::string()) + ',' +
                  std::string(status_name(p.status)) + '\n';
    }
    const auto path = output_dir(o) / "prices.csv";
    csv::write_file(path.string(), result);
    out << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
    fs::path in = o.input;
    if (fs::is_directory(in)) in /= "errors.csv";
    require_file(in.string(), "error file");
    const auto errors = load_errors_csv(in);
    std::vector<EstimatorLabel> labels;
    if (!o.labels.empty()) {
        labels = parse_labels(o.labels);
    } else {
        for (const auto& e : errors) {
            if (std::find(labels.begin(), labels.end(), e.label) == labels.end()) {
                labels.push_back(e.label);
            }
        }
    }
    const auto partitions = o.partitions.empty()
                                ? std::vector<Partition>(kAllPartitions.begin(), kAllPartitions.end())
                                : parse_partitions(o.partitions);
    const auto reports = build_reports(errors, labels, partitions);
    const std::string tables = render_tables(reports);
    const auto dir = output_dir(o);
    csv::write_file((dir / "summary.txt").string(), tables);
    out << tables;
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonparametric option pricing: estimators, benchmarks and evaluation"};
    app.name("pricelab");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "input CSV");
        sub->add_option("--output-dir", o.output_dir, "directory for outputs");
        sub->add_option("--seed", o.seed, "master seed (PRICELAB_SEED overrides)");
        sub->add_option("--kind", o.kind, "put or call");
    };

    auto* ingest = app.add_subcommand("ingest", "filter a chain CSV and add implied volatilities");
    common(ingest);

    auto* synth = app.add_subcommand("synth", "write synthetic option chains");
    common(synth);
    synth->add_option("--model", o.model, "bs or vg");
    synth->add_option("--vol", o.synth.vol, "Black-Scholes volatility");
    synth->add_option("--theta", o.synth.vg_theta);
    synth->add_option("--sigma", o.synth.vg_sigma);
    synth->add_option("--alpha", o.synth.vg_alpha);
    synth->add_option("--spot", o.synth.spot);
    synth->add_option("--rate", o.synth.rate);
    synth->add_option("--dividend", o.synth.dividend);
    synth->add_option("--div-hist", o.synth.div_hist);
    synth->add_option("--days", o.synth.days, "number of trading days");
    synth->add_option("--start", o.start, "first date (YYYY-MM-DD)");
    synth->add_option("--noise", o.synth.noise, "lognormal price noise");
    synth->add_option("--strike-lo", o.synth.strike_lo, "lowest strike / spot");
    synth->add_option("--strike-hi", o.synth.strike_hi, "highest strike / spot");
    synth->add_option("--strike-step", o.synth.strike_step);
    synth->add_option("--maturities", o.synth.maturities_days, "maturities in days")
        ->delimiter(',');
    synth->add_option("--spot-vol", o.synth.daily_spot_vol, "daily spot volatility");

    auto* audit = app.add_subcommand("audit", "dividend curves, ITM parity audit, cross-date pairs");
    common(audit);
    audit->add_option("--spot-tolerance", o.spot_tolerance);

    auto* evaluate = app.add_subcommand("evaluate", "out-of-sample evaluation of the estimators");
    common(evaluate);
    evaluate->add_option("--labels", o.labels, "LI,BS,NW,NWCV,BSNW,BSNWCV,VG,LIB");
    evaluate->add_flag("--trim", o.trim, "drop quotes with price < 0.125 or implied vol > 0.7");
    evaluate->add_option("--fraction", o.fraction, "training fraction");
    evaluate->add_option("--partitions", o.partitions, "all,hull,nohull,gt1");
    evaluate->add_option("--config", o.config, "key=value configuration file");
    evaluate->add_option("--threads", o.threads);

    auto* calibrate = app.add_subcommand("calibrate-vg", "fit Variance-Gamma parameters to one day");
    common(calibrate);
    calibrate->add_option("--date", o.date, "day to fit (default: first)");
    calibrate->add_flag("--multi-start", o.multi_start);

    auto* price = app.add_subcommand("price", "fit one estimator on a day and price queries");
    common(price);
    price->add_option("--label", o.label);
    price->add_option("--queries", o.queries, "CSV with K,tau rows");
    price->add_option("--date", o.date);
    price->add_flag("--trim", o.trim);

    auto* report = app.add_subcommand("report", "render tables from an errors CSV");
    common(report);
    report->add_option("--labels", o.labels);
    report->add_option("--partitions", o.partitions);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (sub == ingest) return cmd_ingest(o, out);
        if (sub == synth) return cmd_synth(o, out);
        if (sub == audit) return cmd_audit(o, out);
        if (sub == evaluate) return cmd_evaluate(o, *evaluate, out);
        if (sub == calibrate) return cmd_calibrate(o, out);
        if (sub == price) return cmd_price(o, out);
        if (sub == report) return cmd_report(o, out);
    } catch (const std::exception& e) {
        err << "pricelab " << sub->get_name() << ": " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace pricelab
