#include "pricelab/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pricelab/black_scholes.hpp"
#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

std::string normalize_label(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) continue;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

bool uses_cv(EstimatorLabel l) { return l == EstimatorLabel::NWCV || l == EstimatorLabel::BSNWCV; }

bool uses_vols(EstimatorLabel l) {
    return l == EstimatorLabel::BS || l == EstimatorLabel::BSNW || l == EstimatorLabel::BSNWCV;
}

Bandwidths kernel_bandwidths(EstimatorLabel label, const ScatterSample& s, double spot) {
    if (s.points.size() == 1) return {spot, 1.0};  // any width reproduces the single value
    return uses_cv(label) ? loo_cv_bandwidths(s) : silverman_bandwidths(s);
}

}  // namespace

std::string_view label_name(EstimatorLabel label) {
    switch (label) {
        case EstimatorLabel::LI: return "LI";
        case EstimatorLabel::BS: return "BS";
        case EstimatorLabel::NW: return "NW";
        case EstimatorLabel::NWCV: return "NWCV";
        case EstimatorLabel::BSNW: return "BSNW";
        case EstimatorLabel::BSNWCV: return "BSNWCV";
        case EstimatorLabel::VG: return "VG";
        case EstimatorLabel::LIB: return "LIB";
    }
    return "?";
}

EstimatorLabel parse_label(std::string_view text) {
    const std::string key = normalize_label(text);
    for (auto l : kAllLabels) {
        if (key == label_name(l)) return l;
    }
    throw DomainError("unknown estimator label '" + std::string(text) + "'");
}

std::vector<EstimatorLabel> parse_labels(std::string_view csv) {
    std::vector<EstimatorLabel> out;
    while (!csv.empty()) {
        const auto comma = csv.find(',');
        const auto item = csv.substr(0, comma);
        if (!normalize_label(item).empty()) {
            const auto l = parse_label(item);
            if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
        }
        if (comma == std::string_view::npos) break;
        csv.remove_prefix(comma + 1);
    }
    if (out.empty()) throw DomainError("empty estimator label list");
    return out;
}

bool hull_restricted(EstimatorLabel label) {
    return label == EstimatorLabel::LI || label == EstimatorLabel::BS ||
           label == EstimatorLabel::LIB;
}

std::string_view status_name(PredictionStatus s) {
    switch (s) {
        case PredictionStatus::Priced: return "priced";
        case PredictionStatus::OutsideHull: return "outside_hull";
        case PredictionStatus::Extrapolated: return "extrapolated";
        case PredictionStatus::Failed: return "failed";
    }
    return "?";
}

PredictionStatus parse_status(std::string_view text) {
    for (auto s : {PredictionStatus::Priced, PredictionStatus::OutsideHull,
                   PredictionStatus::Extrapolated, PredictionStatus::Failed}) {
        if (text == status_name(s)) return s;
    }
    throw DomainError("unknown prediction status '" + std::string(text) + "'");
}

PricingEstimator PricingEstimator::fit(EstimatorLabel label, OptionKind kind,
                                       std::span<const OptionQuote> training,
                                       const FitContext& ctx) {
    PricingEstimator e;
    e.label_ = label;
    e.kind_ = kind;
    e.env_ = ctx.env;
    e.curve_ = ctx.curve;
    const double spot = ctx.env.spot;
    if (!(spot > 0.0)) throw DomainError("estimator: spot must be positive");

    auto points = price_points(training, kind);
    e.info_.training = points.size();
    if (points.empty()) throw InsufficientData("estimator: no training quotes of the requested kind");
    {
        std::vector<Point2> normalized;
        for (const auto& p : points) normalized.push_back({p.strike / spot, p.tau});
        e.training_hull_ = ConvexHull(normalized);
    }
    if (hull_restricted(label) && points.size() < 3) {
        throw InsufficientData("estimator: fewer than 3 training quotes");
    }

    // Implied volatilities, dropping quotes where none exists.
    std::vector<PricePoint> vols;
    if (uses_vols(label)) {
        for (const auto& p : points) {
            try {
                vols.push_back({p.strike, p.tau,
                                implied_vol(kind, p.price, spot, p.strike, ctx.env.rate,
                                            ctx.dividend(p.tau), p.tau)});
            } catch (const Error&) {
                ++e.info_.dropped_iv;
            }
        }
        if (vols.empty()) throw InsufficientData("estimator: no invertible training quote");
        if (hull_restricted(label) && vols.size() < 3) {
            throw InsufficientData("estimator: fewer than 3 invertible training quotes");
        }
    }

    switch (label) {
        case EstimatorLabel::LI:
            e.price_li_.emplace(points, spot);
            break;
        case EstimatorLabel::LIB: {
            const auto [lo, hi] = ctx.augment_strikes.value_or([&] {
                auto [mn, mx] = std::minmax_element(
                    points.begin(), points.end(),
                    [](const PricePoint& a, const PricePoint& b) { return a.strike < b.strike; });
                return std::pair{mn->strike, mx->strike};
            }());
            const auto augmented =
                augment_zero_maturity(points, kind, spot, lo, hi, ctx.augment_points);
            e.price_li_.emplace(augmented, spot);
            break;
        }
        case EstimatorLabel::BS: {
            ScatterSample s;
            for (const auto& v : vols) {
                s.points.push_back({v.strike / spot, v.tau});
                s.values.push_back(v.price);
            }
            e.vol_li_ = Interpolant::build(s);
            break;
        }
        case EstimatorLabel::NW:
        case EstimatorLabel::NWCV:
        case EstimatorLabel::BSNW:
        case EstimatorLabel::BSNWCV: {
            const auto& src = uses_vols(label) ? vols : points;
            ScatterSample s;
            for (const auto& p : src) {
                s.points.push_back({p.strike, p.tau});
                s.values.push_back(p.price);
            }
            const Bandwidths bw = kernel_bandwidths(label, s, spot);
            e.info_.bandwidths = bw;
            e.nw_.emplace(std::move(s), bw);
            break;
        }
        case EstimatorLabel::VG: {
            std::vector<VgQuote> quotes;
            for (const auto& p : points) {
                if (p.price > 0.0) quotes.push_back({p.strike, p.tau, p.price, ctx.dividend(p.tau)});
            }
            if (quotes.empty()) throw InsufficientData("estimator: no positive training price");
            auto cal = vg_calibrate(quotes, kind, spot, ctx.env.rate, ctx.vg_init);
            e.vg_ = cal.params;
            e.info_.vg = std::move(cal);
            break;
        }
    }
    return e;
}

bool PricingEstimator::in_training_hull(double strike, double tau) const {
    return training_hull_.contains({strike / env_.spot, tau});
}

double PricingEstimator::bs_with_vol(double strike, double tau, double vol) const {
    const double q = curve_.empty() ? env_.div_hist : curve_(tau);
    return bs_price({kind_, env_.spot, strike, env_.rate, q, vol, tau});
}

Prediction PricingEstimator::predict(double strike, double tau) const {
    if (!(tau > 0.0) || !(strike > 0.0)) {
        throw DomainError("predict: strike and maturity must be positive");
    }
    Prediction out;
    try {
        std::optional<double> price;
        switch (label_) {
            case EstimatorLabel::LI:
            case EstimatorLabel::LIB:
                price = (*price_li_)(strike, tau);
                break;
            case EstimatorLabel::BS:
                if (auto vol = (*vol_li_)(Point2{strike / env_.spot, tau})) {
                    price = bs_with_vol(strike, tau, *vol);
                }
                break;
            case EstimatorLabel::NW:
            case EstimatorLabel::NWCV:
                price = nw_estimate(*nw_, strike, tau);
                break;
            case EstimatorLabel::BSNW:
            case EstimatorLabel::BSNWCV:
                price = bs_with_vol(strike, tau, nw_estimate(*nw_, strike, tau));
                break;
            case EstimatorLabel::VG:
                price = vg_price_quadrature(
                    {kind_, env_.spot, strike, env_.rate,
                     curve_.empty() ? env_.div_hist : curve_(tau), tau},
                    *vg_);
                break;
        }
        if (!price) {
            out.status = PredictionStatus::OutsideHull;
            return out;
        }
        if (!std::isfinite(*price) || *price < 0.0) {
            out.status = PredictionStatus::Failed;
            out.message = "non-finite price";
            return out;
        }
        out.price = price;
        out.status = hull_restricted(label_) || in_training_hull(strike, tau)
                         ? PredictionStatus::Priced
                         : PredictionStatus::Extrapolated;
    } catch (const Error& err) {
        out.status = PredictionStatus::Failed;
        out.price.reset();
        out.message = err.what();
    }
    return out;
}

}  // namespace pricelab
