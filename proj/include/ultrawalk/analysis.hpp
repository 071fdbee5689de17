#pragma once

// Spreading exponents and scaling collapse from PDF snapshots.

#include <cstdint>
#include <vector>

#include "ultrawalk/evolve.hpp"

namespace ultrawalk {

// Dimension of the underlying lattice.
inline constexpr double kLatticeDimension = 1.0;

struct TimeWindow {
    std::int64_t t_min = 0;
    std::int64_t t_max = 0;
};

struct ExponentFit {
    double slope = 0.0;
    double std_error = 0.0;
    TimeWindow window;
    int points = 0;
    double dw_estimate = 0.0; // 2 / slope
};

bool is_power_of_two(std::int64_t t);
// 2, 4, ..., up to t_max.
std::vector<std::int64_t> dyadic_times(std::int64_t t_max, std::int64_t t_min = 2);

// Unweighted least squares of log2 msd against log2 t over the snapshots
// whose time is a power of two inside the window.
ExponentFit fit_msd_exponent(const std::vector<PdfSnapshot>& snapshots, TimeWindow window);

struct CollapsePoint {
    double u = 0.0; // (x - x0) / t^(1/dw)
    double g = 0.0; // t^(1/dw) rho
};

struct CollapseSeries {
    std::int64_t t = 0;
    double dw = 0.0;
    std::vector<std::int64_t> x;
    std::vector<CollapsePoint> points;
};

// Every site of the snapshot in increasing x; `half` keeps x >= x0 only.
CollapseSeries rescale_collapse(const PdfSnapshot& s, double dw, bool half = false);
// Recovers (x - x0, rho) pairs from a series.
std::vector<std::pair<double, double>> invert_collapse(const CollapseSeries& c);

// Sum of g du over the series, with du the lattice spacing in u.
double collapse_mass(const CollapseSeries& c);

// Coarse-grains each series into `bins` equal-width bins over the common
// u-support and returns the largest pairwise L1 distance between them.
double collapse_distance(const std::vector<CollapseSeries>& series, int bins = 32);

} // namespace ultrawalk
