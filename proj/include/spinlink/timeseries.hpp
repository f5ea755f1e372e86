#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "spinlink/types.hpp"

namespace spinlink {

/// A metric sampled on an ascending time grid.
struct TimeSeries {
  std::string name;
  std::vector<double> t;
  std::vector<double> value;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return t.size(); }
};

/// 0, dt, 2 dt, ..., up to t_max (inclusive within rounding).
inline std::vector<double> make_time_grid(double t_max, double dt) {
  require(dt > 0.0, "time step must be positive");
  require(t_max >= 0.0, "time window must be non-negative");
  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) * dt;
  return grid;
}

struct OptimalTime {
  double t_star;
  double peak;
  std::size_t index;
  /// The discrete maximum sits on the window edge; the window should be widened.
  bool on_boundary;
};

namespace detail {

/// Parabola through samples best-1, best, best+1; boundary samples are flagged, not refined.
inline OptimalTime refine_peak(const TimeSeries& s, std::size_t best, std::size_t lo, std::size_t hi) {
  OptimalTime out{s.t[best], s.value[best], best, best == lo || best == hi};
  if (out.on_boundary) return out;

  const double x0 = s.t[best - 1], x1 = s.t[best], x2 = s.t[best + 1];
  const double y0 = s.value[best - 1], y1 = s.value[best], y2 = s.value[best + 1];
  // Newton form of the interpolating parabola.
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a < 0.0) {
    const double tv = 0.5 * (x0 + x1) - d01 / (2.0 * a);
    if (tv >= x0 && tv <= x2) {
      out.t_star = tv;
      out.peak = y0 + d01 * (tv - x0) + a * (tv - x0) * (tv - x1);
    }
  }
  return out;
}

}  // namespace detail

/// Discrete argmax over [t_min, t_max] (earliest on ties), refined by the
/// parabola through the maximum and its two neighbours.
inline OptimalTime find_optimal_time(const TimeSeries& s, double t_min, double t_max) {
  require(s.t.size() == s.value.size(), "time series has mismatched columns");
  const double eps = 1e-12 * std::max(1.0, std::abs(t_max));
  std::size_t lo = s.t.size(), hi = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t_min - eps || s.t[i] > t_max + eps) continue;
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  require(lo < s.t.size(), "optimal-time window contains no samples");

  std::size_t best = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i)
    if (s.value[i] > s.value[best]) best = i;
  return detail::refine_peak(s, best, lo, hi);
}

inline OptimalTime find_optimal_time(const TimeSeries& s) {
  require(!s.t.empty(), "empty time series");
  return find_optimal_time(s, s.t.front(), s.t.back());
}

/// First interior local maximum above `threshold` (the first arrival of a
/// transfer signal). Falls back to the global maximum, flagged as a boundary
/// peak, when no sample qualifies.
inline OptimalTime find_first_peak(const TimeSeries& s, double threshold) {
  require(s.t.size() == s.value.size(), "time series has mismatched columns");
  require(!s.t.empty(), "empty time series");
  const std::size_t hi = s.t.size() - 1;
  for (std::size_t i = 1; i < hi; ++i)
    if (s.value[i] > threshold && s.value[i] >= s.value[i - 1] && s.value[i] > s.value[i + 1])
      return detail::refine_peak(s, i, 0, hi);
  auto out = find_optimal_time(s);
  out.on_boundary = true;
  return out;
}

}  // namespace spinlink
