#include "pricelab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "pricelab/errors.hpp"

namespace pricelab {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

template <typename T>
int sign_of(const T& v) {
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient2d_exact(Point2 a, Point2 b, Point2 c) {
    const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    return sign_of(Rational((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)));
}

int incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Rational adx = Rational(a.x) - Rational(d.x), ady = Rational(a.y) - Rational(d.y);
    const Rational bdx = Rational(b.x) - Rational(d.x), bdy = Rational(b.y) - Rational(d.y);
    const Rational cdx = Rational(c.x) - Rational(d.x), cdy = Rational(c.y) - Rational(d.y);
    const Rational alift = adx * adx + ady * ady;
    const Rational blift = bdx * bdx + bdy * bdy;
    const Rational clift = cdx * cdx + cdy * cdy;
    const Rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                         clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

// Twice the signed area; floating point, used for barycentric weights only.
double area2(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

std::uint64_t edge_key(int u, int v) {
    const auto lo = static_cast<std::uint32_t>(std::min(u, v));
    const auto hi = static_cast<std::uint32_t>(std::max(u, v));
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

// Sweep triangulation of lexicographically sorted, distinct points followed by Lawson
// flips to the Delaunay triangulation. Requires at least one non-collinear triple.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& p) {
    const int n = static_cast<int>(p.size());
    int m = 2;
    while (m < n && orient2d(p[0], p[1], p[m]) == 0) ++m;
    if (m >= n) throw DegenerateGeometry("all sample points are collinear");

    std::vector<std::array<int, 3>> tris;
    std::vector<int> hull;  // counter-clockwise
    const bool left = orient2d(p[0], p[m - 1], p[m]) > 0;
    for (int i = 0; i + 1 < m; ++i) {
        if (left) {
            tris.push_back({i, i + 1, m});
        } else {
            tris.push_back({i + 1, i, m});
        }
    }
    if (left) {
        for (int i = 0; i <= m; ++i) hull.push_back(i);
    } else {
        hull.push_back(0);
        hull.push_back(m);
        for (int i = m - 1; i >= 1; --i) hull.push_back(i);
    }

    for (int k = m + 1; k < n; ++k) {
        const int h = static_cast<int>(hull.size());
        std::vector<char> visible(static_cast<std::size_t>(h), 0);
        for (int e = 0; e < h; ++e) {
            visible[e] = orient2d(p[hull[e]], p[hull[(e + 1) % h]], p[k]) < 0;
        }
        // The visible edges form one contiguous run; find where it starts.
        int start = -1;
        for (int e = 0; e < h; ++e) {
            if (visible[e] && !visible[(e + h - 1) % h]) {
                start = e;
                break;
            }
        }
        if (start < 0) throw DegenerateGeometry("triangulation sweep found no visible hull edge");
        int count = 0;
        while (visible[(start + count) % h]) {
            const int a = hull[(start + count) % h];
            const int b = hull[(start + count + 1) % h];
            tris.push_back({a, k, b});
            ++count;
        }
        // Hull vertices strictly inside the visible run are replaced by k.
        std::vector<int> next;
        next.reserve(static_cast<std::size_t>(h - count + 2));
        const int first = start;
        const int last = (start + count) % h;
        for (int i = 0; i < h; ++i) {
            const int idx = (last + i) % h;
            next.push_back(hull[idx]);
            if (idx == first) break;
        }
        next.push_back(k);
        hull = std::move(next);
    }

    // Lawson flips.
    std::unordered_map<std::uint64_t, std::array<int, 2>> edges;
    auto attach = [&](int u, int v, int t) {
        auto [it, inserted] = edges.try_emplace(edge_key(u, v), std::array<int, 2>{t, -1});
        if (!inserted) it->second[1] = t;
    };
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        for (int i = 0; i < 3; ++i) attach(tris[t][i], tris[t][(i + 1) % 3], t);
    }
    auto replace = [&](int u, int v, int from, int to) {
        auto& pair = edges.at(edge_key(u, v));
        if (pair[0] == from) {
            pair[0] = to;
        } else if (pair[1] == from) {
            pair[1] = to;
        }
    };
    // Third vertex of triangle t opposite the directed edge u->v, or -1.
    auto apex = [&](int t, int u, int v) {
        const auto& tr = tris[t];
        for (int i = 0; i < 3; ++i) {
            if (tr[i] == u && tr[(i + 1) % 3] == v) return tr[(i + 2) % 3];
        }
        return -1;
    };

    std::vector<std::pair<int, int>> stack;
    for (const auto& [key, pair] : edges) {
        if (pair[1] >= 0) {
            stack.emplace_back(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu));
        }
    }
    std::sort(stack.begin(), stack.end());
    while (!stack.empty()) {
        auto [u, v] = stack.back();
        stack.pop_back();
        auto it = edges.find(edge_key(u, v));
        if (it == edges.end() || it->second[1] < 0) continue;
        int t1 = it->second[0];
        int t2 = it->second[1];
        int w = apex(t1, u, v);
        if (w < 0) {
            std::swap(t1, t2);
            w = apex(t1, u, v);
        }
        const int x = apex(t2, v, u);
        if (w < 0 || x < 0) continue;
        if (incircle(p[u], p[v], p[w], p[x]) <= 0) continue;

        tris[t1] = {u, x, w};
        tris[t2] = {x, v, w};
        edges.erase(it);
        edges[edge_key(w, x)] = {t1, t2};
        replace(u, x, t2, t1);
        replace(v, w, t1, t2);
        stack.emplace_back(u, x);
        stack.emplace_back(x, v);
        stack.emplace_back(v, w);
        stack.emplace_back(w, u);
    }
    return tris;
}

}  // namespace

int orient2d(Point2 a, Point2 b, Point2 c) {
    const double left = (b.x - a.x) * (c.y - a.y);
    const double right = (b.y - a.y) * (c.x - a.x);
    const double det = left - right;
    const double bound = kOrientBound * (std::abs(left) + std::abs(right));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient2d_exact(a, b, c);
}

int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det =
        alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kIncircleBound * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return incircle_exact(a, b, c, d);
}

ScatterSample merge_duplicates(const ScatterSample& sample, double tol) {
    if (sample.points.size() != sample.values.size()) {
        throw DomainError("scatter sample: points and values differ in length");
    }
    std::vector<std::size_t> order(sample.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lex_less(sample.points[a], sample.points[b]) ||
               (sample.points[a] == sample.points[b] && a < b);
    });

    ScatterSample out;
    std::vector<char> used(order.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (used[i]) continue;
        const Point2 head = sample.points[order[i]];
        double sum = sample.values[order[i]];
        std::size_t count = 1;
        used[i] = 1;
        for (std::size_t j = i + 1; j < order.size() && sample.points[order[j]].x - head.x <= tol;
             ++j) {
            const Point2 pj = sample.points[order[j]];
            if (!used[j] && std::abs(pj.y - head.y) <= tol) {
                sum += sample.values[order[j]];
                ++count;
                used[j] = 1;
            }
        }
        out.points.push_back(head);
        out.values.push_back(sum / static_cast<double>(count));
    }
    return out;
}

ConvexHull::ConvexHull(std::span<const Point2> points) {
    std::vector<Point2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) {
        vertices_ = pts;
        return;
    }
    // Andrew's monotone chain, dropping collinear vertices.
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient2d(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient2d(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    if (h.size() == 2 || h.size() < 2) {
        // collinear input collapses to its two extreme points
        vertices_ = {pts.front(), pts.back()};
        return;
    }
    vertices_ = std::move(h);
}

bool ConvexHull::contains(Point2 p) const {
    const std::size_t n = vertices_.size();
    if (n == 0) return false;
    if (n == 1) return p == vertices_[0];
    if (n == 2) {
        const Point2 a = vertices_[0];
        const Point2 b = vertices_[1];
        return orient2d(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (orient2d(vertices_[i], vertices_[(i + 1) % n], p) < 0) return false;
    }
    return true;
}

LinearInterpolator LinearInterpolator::build(const ScatterSample& sample) {
    ScatterSample merged = merge_duplicates(sample);
    if (merged.points.size() < 3) {
        if (merged.points.empty()) throw InsufficientData("interpolation needs at least one point");
        throw DegenerateGeometry("fewer than 3 distinct points");
    }
    LinearInterpolator li;
    li.triangles_ = delaunay(merged.points);
    li.hull_ = ConvexHull(merged.points);
    li.points_ = std::move(merged.points);
    li.values_ = std::move(merged.values);
    return li;
}

std::optional<double> LinearInterpolator::operator()(Point2 q) const {
    if (!hull_.contains(q)) return std::nullopt;
    for (const auto& t : triangles_) {
        const Point2 a = points_[t[0]];
        const Point2 b = points_[t[1]];
        const Point2 c = points_[t[2]];
        if (orient2d(a, b, q) < 0 || orient2d(b, c, q) < 0 || orient2d(c, a, q) < 0) continue;
        const double area = area2(a, b, c);
        const double la = area2(q, b, c) / area;
        const double lb = area2(a, q, c) / area;
        const double lc = area2(a, b, q) / area;
        return la * values_[t[0]] + lb * values_[t[1]] + lc * values_[t[2]];
    }
    return std::nullopt;
}

SegmentInterpolator SegmentInterpolator::build(const ScatterSample& sample) {
    ScatterSample merged = merge_duplicates(sample);
    if (merged.points.empty()) throw InsufficientData("interpolation needs at least one point");
    SegmentInterpolator s;
    s.origin_ = merged.points.front();
    const Point2 end = merged.points.back();
    s.direction_ = {end.x - s.origin_.x, end.y - s.origin_.y};
    const double norm2 = s.direction_.x * s.direction_.x + s.direction_.y * s.direction_.y;
    for (std::size_t i = 0; i < merged.points.size(); ++i) {
        const Point2 p = merged.points[i];
        if (i > 0 && i + 1 < merged.points.size() && orient2d(s.origin_, end, p) != 0) {
            throw DegenerateGeometry("segment interpolation requires collinear points");
        }
        const double t = norm2 > 0.0 ? ((p.x - s.origin_.x) * s.direction_.x +
                                        (p.y - s.origin_.y) * s.direction_.y) /
                                           norm2
                                     : 0.0;
        s.params_.push_back(t);
        s.values_.push_back(merged.values[i]);
    }
    // Lexicographic order is monotone along a line.
    return s;
}

bool SegmentInterpolator::contains(Point2 q) const {
    const Point2 end{origin_.x + direction_.x, origin_.y + direction_.y};
    if (params_.size() == 1) return q == origin_;
    if (orient2d(origin_, end, q) != 0) return false;
    return std::min(origin_.x, end.x) <= q.x && q.x <= std::max(origin_.x, end.x) &&
           std::min(origin_.y, end.y) <= q.y && q.y <= std::max(origin_.y, end.y);
}

std::optional<double> SegmentInterpolator::operator()(Point2 q) const {
    if (!contains(q)) return std::nullopt;
    if (params_.size() == 1) return values_[0];
    const double norm2 = direction_.x * direction_.x + direction_.y * direction_.y;
    const double t = std::clamp(
        ((q.x - origin_.x) * direction_.x + (q.y - origin_.y) * direction_.y) / norm2, 0.0, 1.0);
    auto hi = std::upper_bound(params_.begin(), params_.end(), t);
    if (hi == params_.end()) return values_.back();
    if (hi == params_.begin()) return values_.front();
    const std::size_t j = static_cast<std::size_t>(hi - params_.begin());
    if (params_[j - 1] == t) return values_[j - 1];
    const double w = (t - params_[j - 1]) / (params_[j] - params_[j - 1]);
    return (1.0 - w) * values_[j - 1] + w * values_[j];
}

Interpolant Interpolant::build(const ScatterSample& sample) {
    Interpolant out;
    try {
        out.impl_ = LinearInterpolator::build(sample);
    } catch (const DegenerateGeometry&) {
        out.impl_ = SegmentInterpolator::build(sample);
    }
    return out;
}

std::optional<double> Interpolant::operator()(Point2 q) const {
    return std::visit([&](const auto& impl) { return impl(q); }, impl_);
}

bool Interpolant::contains(Point2 q) const {
    return std::visit([&](const auto& impl) { return impl.contains(q); }, impl_);
}

NormalizedPriceInterpolator::NormalizedPriceInterpolator(std::span<const PricePoint> points,
                                                         double spot)
    : spot_(spot) {
    if (!(spot > 0.0)) throw DomainError("normalized interpolator: spot must be positive");
    ScatterSample sample;
    for (const auto& p : points) {
        sample.points.push_back({p.strike / spot, p.tau});
        // S * interp(p / S) == interp(p): interpolation is linear in the values.
        sample.values.push_back(p.price);
    }
    interp_ = Interpolant::build(sample);
}

std::optional<double> NormalizedPriceInterpolator::operator()(double strike, double tau) const {
    return interp_(Point2{strike / spot_, tau});
}

bool NormalizedPriceInterpolator::contains(double strike, double tau) const {
    return interp_.contains(Point2{strike / spot_, tau});
}

NormalizedPriceInterpolator normalized_li_price(std::span<const OptionQuote> quotes,
                                                OptionKind kind, double spot) {
    const auto points = price_points(quotes, kind);
    if (points.size() < 3) throw InsufficientData("linear interpolation needs at least 3 quotes");
    return NormalizedPriceInterpolator(points, spot);
}

std::vector<PricePoint> augment_zero_maturity(std::vector<PricePoint> points, OptionKind kind,
                                              double spot, double strike_lo, double strike_hi,
                                              int n) {
    if (n < 2) throw DomainError("augmentation needs at least 2 fictitious strikes");
    for (int j = 0; j < n; ++j) {
        const double k = j == n - 1 ? strike_hi
                                    : strike_lo + (strike_hi - strike_lo) * j / (n - 1.0);
        const double payoff = kind == OptionKind::Put ? std::max(k - spot, 0.0)
                                                      : std::max(spot - k, 0.0);
        points.push_back({k, 0.0, payoff});
    }
    return points;
}

std::vector<PricePoint> augment_zero_maturity(std::span<const OptionQuote> day_quotes,
                                              OptionKind kind, double spot, int n) {
    if (day_quotes.empty()) throw InsufficientData("augmentation needs at least one quote");
    double lo = day_quotes.front().strike;
    double hi = lo;
    for (const auto& q : day_quotes) {
        lo = std::min(lo, q.strike);
        hi = std::max(hi, q.strike);
    }
    return augment_zero_maturity(price_points(day_quotes, kind), kind, spot, lo, hi, n);
}

}  // namespace pricelab
