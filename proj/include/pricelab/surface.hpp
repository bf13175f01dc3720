#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pricelab/market_data.hpp"

namespace pricelab {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. Exact for all finite inputs.
int orient2d(Point2 a, Point2 b, Point2 c);

/// +1 if d lies strictly inside the circumcircle of the counter-clockwise triangle
/// (a, b, c), -1 if strictly outside, 0 if cocircular. Exact.
int incircle(Point2 a, Point2 b, Point2 c, Point2 d);

/// Points with values; the support of an interpolator.
struct ScatterSample {
    std::vector<Point2> points;
    std::vector<double> values;
};

/// Points closer than this in both coordinates are treated as one sample.
inline constexpr double kDuplicateTolerance = 1e-12;

/// Merges duplicate points, averaging their values. Output is sorted lexicographically.
ScatterSample merge_duplicates(const ScatterSample& sample, double tol = kDuplicateTolerance);

/// Closed convex hull of a point set. Degenerate sets (one point, a segment) are
/// supported and contain only the points of the segment.
class ConvexHull {
public:
    ConvexHull() = default;
    explicit ConvexHull(std::span<const Point2> points);

    bool contains(Point2 p) const;
    /// Counter-clockwise, without collinear vertices.
    const std::vector<Point2>& vertices() const { return vertices_; }
    bool empty() const { return vertices_.empty(); }

private:
    std::vector<Point2> vertices_;
};

/// Piecewise-linear interpolation on the Delaunay triangulation of the sample.
class LinearInterpolator {
public:
    /// Throws InsufficientData for an empty sample and DegenerateGeometry when the
    /// distinct points are fewer than 3 or collinear.
    static LinearInterpolator build(const ScatterSample& sample);

    /// Barycentric value inside the (closed) hull, nullopt outside.
    std::optional<double> operator()(Point2 q) const;
    bool contains(Point2 q) const { return hull_.contains(q); }

    const std::vector<Point2>& points() const { return points_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const ConvexHull& hull() const { return hull_; }

private:
    std::vector<Point2> points_;
    std::vector<double> values_;
    std::vector<std::array<int, 3>> triangles_;  // counter-clockwise
    ConvexHull hull_;
};

/// 1-D piecewise-linear interpolation along a line, for collinear samples.
class SegmentInterpolator {
public:
    static SegmentInterpolator build(const ScatterSample& sample);

    std::optional<double> operator()(Point2 q) const;
    bool contains(Point2 q) const;

private:
    Point2 origin_;
    Point2 direction_;
    std::vector<double> params_;  // ascending
    std::vector<double> values_;
};

/// A LinearInterpolator, or a SegmentInterpolator when the sample is collinear.
class Interpolant {
public:
    static Interpolant build(const ScatterSample& sample);

    std::optional<double> operator()(Point2 q) const;
    bool contains(Point2 q) const;
    bool degenerate() const { return std::holds_alternative<SegmentInterpolator>(impl_); }

private:
    std::variant<LinearInterpolator, SegmentInterpolator> impl_;
};

/// Interpolates option prices on normalized coordinates (K / S, tau):
/// price(K, tau) = S * phi(K / S, tau) with phi interpolating p_k / S.
class NormalizedPriceInterpolator {
public:
    NormalizedPriceInterpolator(std::span<const PricePoint> points, double spot);

    std::optional<double> operator()(double strike, double tau) const;
    bool contains(double strike, double tau) const;
    double spot() const { return spot_; }
    bool degenerate() const { return interp_.degenerate(); }

private:
    double spot_;
    Interpolant interp_;
};

/// Normalized linear interpolator of the quotes of one kind.
NormalizedPriceInterpolator normalized_li_price(std::span<const OptionQuote> quotes,
                                                OptionKind kind, double spot);

/// Appends `n` zero-maturity points whose strikes are equally spaced over
/// [strike_lo, strike_hi] (both ends included) and whose values are the payoff.
std::vector<PricePoint> augment_zero_maturity(std::vector<PricePoint> points, OptionKind kind,
                                              double spot, double strike_lo, double strike_hi,
                                              int n = 30);

/// Quotes of `kind` plus zero-maturity points spanning the strikes of every quote of the day.
std::vector<PricePoint> augment_zero_maturity(std::span<const OptionQuote> day_quotes,
                                              OptionKind kind, double spot, int n = 30);

}  // namespace pricelab
