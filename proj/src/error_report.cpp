#include "pricelab/error_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace pricelab {

namespace {

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

double ErrorReport::cdf_at(double threshold_pct) const {
    for (const auto& [t, f] : cdf) {
        if (t == threshold_pct) return f;
    }
    return std::nan("");
}

ErrorReport summarize_errors(std::span<const double> rel_errors, std::string label,
                             std::string partition) {
    ErrorReport r;
    r.label = std::move(label);
    r.partition = std::move(partition);
    r.count = rel_errors.size();

    std::vector<double> pct(rel_errors.begin(), rel_errors.end());
    for (auto& e : pct) e *= 100.0;
    std::sort(pct.begin(), pct.end());

    for (double t : kCdfThresholdsPct) {
        double frac = 0.0;
        if (!pct.empty()) {
            const auto n_le = std::upper_bound(pct.begin(), pct.end(), t) - pct.begin();
            frac = static_cast<double>(n_le) / static_cast<double>(pct.size());
        }
        r.cdf.emplace_back(t, frac);
    }
    if (pct.empty()) return r;

    ErrorStats s;
    const auto n = static_cast<double>(pct.size());
    s.mean = std::accumulate(pct.begin(), pct.end(), 0.0) / n;
    if (pct.size() > 1) {
        double ss = 0.0;
        for (double e : pct) ss += (e - s.mean) * (e - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    const std::size_t mid = pct.size() / 2;
    s.median = pct.size() % 2 == 1 ? pct[mid] : 0.5 * (pct[mid - 1] + pct[mid]);
    s.min = pct.front();
    s.max = pct.back();
    r.stats = s;
    return r;
}

std::string format_report_csv(const ErrorReport& report) {
    std::string out = "stat,value\n";
    out += "count," + std::to_string(report.count) + "\n";
    if (report.stats) {
        const auto& s = *report.stats;
        out += "mean_pct," + fmt(s.mean, "%.10g") + "\n";
        out += "std_pct," + fmt(s.std, "%.10g") + "\n";
        out += "median_pct," + fmt(s.median, "%.10g") + "\n";
        out += "min_pct," + fmt(s.min, "%.10g") + "\n";
        out += "max_pct," + fmt(s.max, "%.10g") + "\n";
    }
    out += "\nthreshold_pct,cdf\n";
    for (const auto& [t, f] : report.cdf) out += fmt(t, "%g") + "," + fmt(f, "%.10g") + "\n";
    return out;
}

std::string render_report_table(std::span<const ErrorReport> reports, const std::string& title) {
    constexpr std::size_t kFirst = 16;
    constexpr std::size_t kCol = 10;
    std::string out;
    if (!title.empty()) out += title + "\n";

    out += pad_right("Error", kFirst);
    for (const auto& r : reports) out += pad_left(r.label, kCol);
    out += "\n";

    auto stat_row = [&](const char* name, double ErrorStats::*field) {
        out += pad_right(name, kFirst);
        for (const auto& r : reports) {
            out += pad_left(r.stats ? fmt((*r.stats).*field, "%.1f") : "-", kCol);
        }
        out += "\n";
    };
    stat_row("Mean", &ErrorStats::mean);
    stat_row("St. Dev.", &ErrorStats::std);
    stat_row("Median", &ErrorStats::median);
    stat_row("Min", &ErrorStats::min);
    stat_row("Max", &ErrorStats::max);
    out += pad_right("Count", kFirst);
    for (const auto& r : reports) out += pad_left(std::to_string(r.count), kCol);
    out += "\n\nEmpirical Distribution\n";
    for (std::size_t i = 0; i < kCdfThresholdsPct.size(); ++i) {
        out += pad_right(fmt(kCdfThresholdsPct[i], "%g") + "%", kFirst);
        for (const auto& r : reports) {
            out += pad_left(r.count > 0 ? fmt(100.0 * r.cdf[i].second, "%.1f") : "-", kCol);
        }
        out += "\n";
    }
    return out;
}

}  // namespace pricelab
