#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pricelab/black_scholes.hpp"
#include "pricelab/cli.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/estimators.hpp"
#include "pricelab/harness.hpp"
#include "pricelab/parity.hpp"
#include "pricelab/synth.hpp"
#include "pricelab/variance_gamma.hpp"

namespace py = pybind11;
using namespace pricelab;

namespace {

OptionKind kind_of(const std::string& s) { return parse_kind(s); }

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["label"] = r.label;
    d["partition"] = r.partition;
    d["count"] = r.count;
    if (r.stats) {
        d["mean"] = r.stats->mean;
        d["std"] = r.stats->std;
        d["median"] = r.stats->median;
        d["min"] = r.stats->min;
        d["max"] = r.stats->max;
    }
    d["cdf"] = r.cdf;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pricelab, m) {
    m.doc() = "Option pricing estimators and their evaluation";

    auto base = py::register_exception<Error>(m, "PricelabError");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    m.attr("DEFAULT_SEED") = kDefaultMasterSeed;

    m.def(
        "bs_price",
        [](const std::string& kind, double spot, double strike, double rate, double dividend,
           double vol, double tau) {
            return bs_price({kind_of(kind), spot, strike, rate, dividend, vol, tau});
        },
        py::arg("kind"), py::arg("spot"), py::arg("strike"), py::arg("rate"), py::arg("dividend"),
        py::arg("vol"), py::arg("tau"));
    m.def(
        "implied_vol",
        [](const std::string& kind, double price, double spot, double strike, double rate,
           double dividend, double tau) {
            return implied_vol(kind_of(kind), price, spot, strike, rate, dividend, tau);
        },
        py::arg("kind"), py::arg("price"), py::arg("spot"), py::arg("strike"), py::arg("rate"),
        py::arg("dividend"), py::arg("tau"));
    m.def(
        "iv_dividend_sensitivity",
        [](const std::string& kind, double spot, double strike, double rate, double dividend,
           double vol, double tau) {
            return iv_dividend_sensitivity({kind_of(kind), spot, strike, rate, dividend, vol, tau});
        },
        py::arg("kind"), py::arg("spot"), py::arg("strike"), py::arg("rate"), py::arg("dividend"),
        py::arg("vol"), py::arg("tau"));
    m.def("implied_dividend",
          [](double call, double put, double strike, double tau, double spot, double rate) {
              return implied_dividend({call, put, strike, tau}, spot, rate);
          },
          py::arg("call"), py::arg("put"), py::arg("strike"), py::arg("tau"), py::arg("spot"),
          py::arg("rate"));

    py::class_<VgParams>(m, "VgParams")
        .def(py::init<double, double, double>(), py::arg("theta"), py::arg("sigma"), py::arg("alpha"))
        .def_property_readonly("theta", &VgParams::theta)
        .def_property_readonly("sigma", &VgParams::sigma)
        .def_property_readonly("alpha", &VgParams::alpha)
        .def_property_readonly("eta", &VgParams::eta)
        .def_property_readonly("square_integrable", &VgParams::square_integrable)
        .def("__repr__", [](const VgParams& p) {
            std::ostringstream os;
            os << "VgParams(theta=" << p.theta() << ", sigma=" << p.sigma() << ", alpha=" << p.alpha()
               << ")";
            return os.str();
        });

    m.def("gamma_expectation", &gamma_expectation, py::arg("f"), py::arg("shape"), py::arg("rate"));
    m.def(
        "vg_price",
        [](const std::string& kind, double spot, double strike, double rate, double dividend,
           double tau, const VgParams& p) {
            return vg_price_quadrature({kind_of(kind), spot, strike, rate, dividend, tau}, p);
        },
        py::arg("kind"), py::arg("spot"), py::arg("strike"), py::arg("rate"), py::arg("dividend"),
        py::arg("tau"), py::arg("params"));
    m.def(
        "vg_price_mc",
        [](const std::string& kind, double spot, double strike, double rate, double dividend,
           double tau, const VgParams& p, long long n, std::uint64_t seed) {
            const auto r = vg_price_mc({kind_of(kind), spot, strike, rate, dividend, tau}, p, n, seed);
            return py::make_tuple(r.price, r.std_error);
        },
        py::arg("kind"), py::arg("spot"), py::arg("strike"), py::arg("rate"), py::arg("dividend"),
        py::arg("tau"), py::arg("params"), py::arg("n") = kDefaultMcPaths,
        py::arg("seed") = kDefaultMasterSeed);
    m.def(
        "vg_calibrate",
        [](const std::vector<std::tuple<double, double, double, double>>& quotes,
           const std::string& kind, double spot, double rate, std::tuple<double, double, double> init) {
            std::vector<VgQuote> qs;
            for (const auto& [k, t, p, q] : quotes) qs.push_back({k, t, p, q});
            const auto [theta, sigma, alpha] = init;
            const auto fit = vg_calibrate(qs, kind_of(kind), spot, rate, {theta, sigma, alpha});
            return py::make_tuple(fit.params, fit.objective, fit.iterations);
        },
        py::arg("quotes"), py::arg("kind"), py::arg("spot"), py::arg("rate"),
        py::arg("init") = std::make_tuple(0.0, 0.3, 2.0),
        "quotes are (strike, tau, price, dividend); returns (params, objective, iterations)");

    py::class_<DailyChain>(m, "DailyChain")
        .def_property_readonly("date", [](const DailyChain& c) { return c.env.date.iso(); })
        .def_property_readonly("spot", [](const DailyChain& c) { return c.env.spot; })
        .def_property_readonly("rate", [](const DailyChain& c) { return c.env.rate; })
        .def("__len__", [](const DailyChain& c) { return c.quotes.size(); })
        .def("quotes", [](const DailyChain& c) {
            py::list out;
            for (const auto& q : c.quotes) {
                py::dict d;
                d["kind"] = std::string(kind_name(q.kind));
                d["strike"] = q.strike;
                d["expiry"] = q.expiry.iso();
                d["ttm_days"] = q.ttm_days;
                d["bid"] = q.bid;
                d["ask"] = q.ask;
                d["mid"] = q.mid;
                d["volume"] = q.volume;
                d["implied_vol"] = q.implied_vol;
                out.append(d);
            }
            return out;
        });

    m.def(
        "synth",
        [](int days, const std::string& model, double noise, std::uint64_t seed, double dividend) {
            SynthSpec spec;
            spec.days = days;
            spec.model = model == "vg" || model == "VG" ? SynthModel::VG : SynthModel::BS;
            spec.noise = noise;
            spec.seed = seed;
            spec.dividend = dividend;
            return synth_chains(spec);
        },
        py::arg("days") = 1, py::arg("model") = "bs", py::arg("noise") = 0.0,
        py::arg("seed") = kDefaultMasterSeed, py::arg("dividend") = 0.02);
    m.def("load_chains", [](const std::string& path) { return load_chains(path); }, py::arg("path"));
    m.def("format_chains", [](const std::vector<DailyChain>& c) { return format_chains(c); });
    m.def("parse_chains", [](const std::string& text) { return parse_chains(text); });
    m.def(
        "dividend_curve",
        [](const DailyChain& day) {
            const auto curve = estimate_dividend_curve(day);
            std::vector<std::pair<double, double>> out;
            for (const auto& k : curve.knots()) out.emplace_back(k.tau, k.qbar);
            return out;
        },
        py::arg("day"), "(tau, qbar) knots of the parity-implied dividend curve");

    py::class_<PricingEstimator>(m, "Estimator")
        .def_static(
            "fit",
            [](const std::string& label, const DailyChain& day, const std::string& kind) {
                FitContext ctx;
                ctx.env = day.env;
                ctx.curve = estimate_dividend_curve(day);
                ctx.augment_strikes = strike_range(day);
                const auto k = kind_of(kind);
                const auto quotes = select_kind(day, k).quotes;
                return PricingEstimator::fit(parse_label(label), k, quotes, ctx);
            },
            py::arg("label"), py::arg("day"), py::arg("kind") = "put")
        .def_property_readonly("label",
                               [](const PricingEstimator& e) { return std::string(label_name(e.label())); })
        .def(
            "predict",
            [](const PricingEstimator& e, double strike, double tau) {
                const auto p = e.predict(strike, tau);
                return py::make_tuple(std::string(status_name(p.status)), p.price);
            },
            py::arg("strike"), py::arg("tau"), "returns (status, price or None)");

    m.def(
        "evaluate",
        [](const std::vector<DailyChain>& days, const std::string& labels, std::uint64_t seed,
           double fraction, unsigned threads) {
            EvalConfig cfg;
            cfg.labels = parse_labels(labels);
            cfg.master_seed = seed;
            cfg.fraction = fraction;
            cfg.threads = threads;
            const auto ev = [&] {
                py::gil_scoped_release release;
                return run_evaluation(days, cfg);
            }();
            py::list out;
            for (const auto& r : ev.reports) out.append(report_dict(r));
            return out;
        },
        py::arg("days"), py::arg("labels") = "LI,BS,NW,NWCV,BSNW,BSNWCV,LIB",
        py::arg("seed") = kDefaultMasterSeed, py::arg("fraction") = kDefaultTrainFraction,
        py::arg("threads") = 0u);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"pricelab"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "returns (exit code, stdout, stderr)");
}
