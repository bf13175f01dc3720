#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pricelab/kernel.hpp"
#include "pricelab/market_data.hpp"
#include "pricelab/parity.hpp"
#include "pricelab/surface.hpp"
#include "pricelab/variance_gamma.hpp"

namespace pricelab {

enum class EstimatorLabel { LI, BS, NW, NWCV, BSNW, BSNWCV, VG, LIB };

inline constexpr std::array<EstimatorLabel, 8> kAllLabels = {
    EstimatorLabel::LI,   EstimatorLabel::BS,     EstimatorLabel::NW, EstimatorLabel::NWCV,
    EstimatorLabel::BSNW, EstimatorLabel::BSNWCV, EstimatorLabel::VG, EstimatorLabel::LIB};

std::string_view label_name(EstimatorLabel label);
/// Case-insensitive; accepts "NW-CV" style spellings. Throws DomainError for unknown labels.
EstimatorLabel parse_label(std::string_view text);
/// Comma-separated list.
std::vector<EstimatorLabel> parse_labels(std::string_view csv);

/// LI, BS and LIB are defined only on the convex hull of their data.
bool hull_restricted(EstimatorLabel label);

enum class PredictionStatus { Priced, OutsideHull, Extrapolated, Failed };

std::string_view status_name(PredictionStatus s);
PredictionStatus parse_status(std::string_view text);

struct Prediction {
    PredictionStatus status = PredictionStatus::Failed;
    std::optional<double> price;
    std::string message;  // set for failures
};

struct FitContext {
    MarketEnv env;
    DividendCurve curve;  // empty: env.div_hist is used
    /// Strike span of the zero-maturity points of LIB; defaults to the training strikes.
    std::optional<std::pair<double, double>> augment_strikes;
    int augment_points = 30;
    VgInit vg_init;

    double dividend(double tau) const { return curve.empty() ? env.div_hist : curve(tau); }
};

struct FitInfo {
    std::size_t training = 0;
    std::size_t dropped_iv = 0;  // quotes without an implied volatility
    std::optional<Bandwidths> bandwidths;
    std::optional<VgCalibration> vg;
    /// Coordinates of kernel regressions: always raw (strike, tau).
    std::string kernel_coordinates = "raw";
};

class PricingEstimator {
public:
    /// Fits `label` on the training quotes of `kind`. Errors of the underlying methods
    /// propagate; hull-restricted labels need 3 usable quotes (InsufficientData).
    static PricingEstimator fit(EstimatorLabel label, OptionKind kind,
                                std::span<const OptionQuote> training, const FitContext& ctx);

    Prediction predict(double strike, double tau) const;

    EstimatorLabel label() const { return label_; }
    OptionKind kind() const { return kind_; }
    const MarketEnv& env() const { return env_; }
    const FitInfo& info() const { return info_; }
    /// Whether (K / S, tau) lies in the hull of the training quotes.
    bool in_training_hull(double strike, double tau) const;

private:
    PricingEstimator() = default;

    double bs_with_vol(double strike, double tau, double vol) const;

    EstimatorLabel label_ = EstimatorLabel::LI;
    OptionKind kind_ = OptionKind::Put;
    MarketEnv env_;
    DividendCurve curve_;
    FitInfo info_;
    ConvexHull training_hull_;  // normalized coordinates

    std::optional<NormalizedPriceInterpolator> price_li_;  // LI, LIB
    std::optional<Interpolant> vol_li_;                   // BS
    std::optional<NwModel> nw_;                           // NW*, BSNW*
    std::optional<VgParams> vg_;                          // VG
};

}  // namespace pricelab
