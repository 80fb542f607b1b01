#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qkla::bench {

class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Point = std::pair<double, double>;  // (budget, error)

/// OLS slope of log10(error) on log10(budget) over every point.
double fit_loglog_slope_all(std::span<const Point> points);

/// Geometric midpoint sqrt(min * max) of the budget grid; the tail is every
/// budget at or above it (the log-median for log-spaced grids).
double tail_cutoff(std::span<const Point> points);

/// OLS slope over the asymptotic tail (budget >= tail_cutoff). Needs at least
/// three tail points, all coordinates positive.
double fit_loglog_slope(std::span<const Point> points);

/// Linear-interpolation sample quantile (the "type 7" definition).
double quantile_linear(std::vector<double> values, double q);

/// Smallest value v with sum_{values <= v} weight >= q (weights sum to 1).
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

}  // namespace qkla::bench
