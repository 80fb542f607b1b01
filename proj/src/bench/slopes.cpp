#include "qkla/bench/slopes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qkla::bench {

namespace {

void check_positive(std::span<const Point> points) {
  for (const auto& [b, e] : points) {
    if (!(b > 0.0) || !(e > 0.0)) throw FitError("log-log fit needs positive budgets and errors");
  }
}

double ols_slope(std::span<const Point> points) {
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [b, e] : points) {
    sx += std::log10(b);
    sy += std::log10(e);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [b, e] : points) {
    const double dx = std::log10(b) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log10(e) - my);
  }
  if (sxx == 0.0) throw FitError("log-log fit needs at least two distinct budgets");
  return sxy / sxx;
}

}  // namespace

double fit_loglog_slope_all(std::span<const Point> points) {
  if (points.size() < 2) throw FitError("log-log fit needs at least two points");
  check_positive(points);
  return ols_slope(points);
}

double tail_cutoff(std::span<const Point> points) {
  if (points.empty()) throw FitError("empty budget grid");
  check_positive(points);
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const Point& a, const Point& b) { return a.first < b.first; });
  return std::sqrt(lo->first * hi->first);
}

double fit_loglog_slope(std::span<const Point> points) {
  const double cut = tail_cutoff(points);
  std::vector<Point> tail;
  // Relative slack so a grid point equal to the cutoff survives the sqrt.
  for (const auto& pt : points) {
    if (pt.first >= cut * (1.0 - 1e-12)) tail.push_back(pt);
  }
  if (tail.size() < 3) throw FitError("fewer than three points in the asymptotic tail");
  return ols_slope(tail);
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw FitError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw FitError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  if (values.empty() || values.size() != weights.size()) throw FitError("bad weighted sample");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    // Tolerance for weights that sum to 1 only up to rounding.
    if (cumulative >= q - 1e-12) return values[i];
  }
  return values[order.back()];
}

}  // namespace qkla::bench
