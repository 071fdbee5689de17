#include "ultrawalk/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "ultrawalk/error.hpp"

namespace ultrawalk {

bool is_power_of_two(std::int64_t t) { return t > 0 && (t & (t - 1)) == 0; }

std::vector<std::int64_t> dyadic_times(std::int64_t t_max, std::int64_t t_min) {
    if (t_max < 1) throw ConfigError("t_max must be positive");
    std::vector<std::int64_t> out;
    for (std::int64_t t = 1; t <= t_max; t *= 2) {
        if (t >= t_min) out.push_back(t);
        if (t > t_max / 2) break;
    }
    return out;
}

ExponentFit fit_msd_exponent(const std::vector<PdfSnapshot>& snapshots, TimeWindow window) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : snapshots) {
        if (s.t < window.t_min || s.t > window.t_max || !is_power_of_two(s.t)) continue;
        if (!(s.msd > 0.0))
            throw NumericError(fmt::format("non-positive msd at t={}", s.t));
        xs.push_back(std::log2(static_cast<double>(s.t)));
        ys.push_back(std::log2(s.msd));
    }
    const auto n = static_cast<int>(xs.size());
    if (n < 4)
        throw ConfigError(fmt::format("exponent fit needs at least 4 dyadic times in [{}, {}], got {}",
                                      window.t_min, window.t_max, n));
    double mx = 0.0;
    double my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    ExponentFit f;
    f.slope = sxy / sxx;
    const double intercept = my - f.slope * mx;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - intercept - f.slope * xs[i];
        rss += r * r;
    }
    f.std_error = std::sqrt(rss / (n - 2) / sxx);
    f.window = window;
    f.points = n;
    f.dw_estimate = 2.0 / f.slope;
    return f;
}

CollapseSeries rescale_collapse(const PdfSnapshot& s, double dw, bool half) {
    if (!(dw > 0.0)) throw ConfigError("dw must be positive");
    if (s.t < 1) throw ConfigError("collapse needs t >= 1");
    const double scale = std::pow(static_cast<double>(s.t), 1.0 / dw);
    CollapseSeries c;
    c.t = s.t;
    c.dw = dw;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        const std::int64_t x = s.x_min + static_cast<std::int64_t>(i);
        if (half && x < s.x0) continue;
        c.x.push_back(x);
        c.points.push_back({static_cast<double>(x - s.x0) / scale, scale * s.rho[i]});
    }
    return c;
}

std::vector<std::pair<double, double>> invert_collapse(const CollapseSeries& c) {
    const double scale = std::pow(static_cast<double>(c.t), 1.0 / c.dw);
    std::vector<std::pair<double, double>> out;
    out.reserve(c.points.size());
    for (const auto& p : c.points) out.emplace_back(p.u * scale, p.g / scale);
    return out;
}

double collapse_mass(const CollapseSeries& c) {
    const double du = 1.0 / std::pow(static_cast<double>(c.t), 1.0 / c.dw);
    double m = 0.0;
    for (const auto& p : c.points) m += p.g * du;
    return m;
}

double collapse_distance(const std::vector<CollapseSeries>& series, int bins) {
    if (series.size() < 2) throw ConfigError("collapse distance needs at least two series");
    if (bins < 1) throw ConfigError("bin count must be positive");

    // Common support: intersection of the ranges where each series has weight.
    double lo = -INFINITY;
    double hi = INFINITY;
    for (const auto& c : series) {
        double clo = INFINITY;
        double chi = -INFINITY;
        for (const auto& p : c.points) {
            if (p.g > 0.0) {
                clo = std::min(clo, p.u);
                chi = std::max(chi, p.u);
            }
        }
        if (!(chi >= clo)) throw NumericError(fmt::format("series at t={} carries no weight", c.t));
        lo = std::max(lo, clo);
        hi = std::min(hi, chi);
    }
    if (!(hi > lo)) throw NumericError("series have no common support");

    // Bin content is the weight sum g du, i.e. the probability in the bin.
    const double width = (hi - lo) / bins;
    std::vector<std::vector<double>> binned;
    for (const auto& c : series) {
        const double du = 1.0 / std::pow(static_cast<double>(c.t), 1.0 / c.dw);
        std::vector<double> b(static_cast<std::size_t>(bins), 0.0);
        for (const auto& p : c.points) {
            if (p.u < lo || p.u > hi) continue;
            const int k = std::min(bins - 1, static_cast<int>((p.u - lo) / width));
            b[static_cast<std::size_t>(k)] += p.g * du;
        }
        binned.push_back(std::move(b));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < binned.size(); ++i) {
        for (std::size_t j = i + 1; j < binned.size(); ++j) {
            double d = 0.0;
            for (int k = 0; k < bins; ++k) d += std::abs(binned[i][k] - binned[j][k]);
            worst = std::max(worst, d);
        }
    }
    return worst;
}

} // namespace ultrawalk
