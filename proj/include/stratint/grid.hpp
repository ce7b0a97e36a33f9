#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stratint {

// Time points closer than this are treated as one grid node.
inline constexpr double kTimeMergeTol = 1e-12;

// Piecewise-linear function sampled on a strictly increasing time grid.
struct GridFunction {
  std::vector<double> times;
  std::vector<double> values;

  // Linear interpolation; exact at grid nodes. Tiny overshoot past the ends
  // (rounding in grid arithmetic) is clamped, anything larger is a domain error.
  double value_at(double t) const {
    if (times.empty() || times.size() != values.size())
      throw std::invalid_argument("GridFunction::value_at: malformed grid");
    const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
    if (t < times.front() - slack || t > times.back() + slack)
      throw std::domain_error("GridFunction::value_at: t outside grid range");
    t = std::clamp(t, times.front(), times.back());
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    if (it == times.end()) return values.back();
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    if (t == times[lo]) return values[lo];
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  }

  double sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline GridFunction grid_constant(std::vector<double> times, double c) {
  GridFunction g;
  g.values.assign(times.size(), c);
  g.times = std::move(times);
  return g;
}

// Running trapezoid integral of `integrand` sampled on `times`; output starts
// at zero and lives on the same grid.
inline GridFunction cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& integrand) {
  if (times.size() != integrand.size() || times.empty())
    throw std::invalid_argument("cumulative_trapezoid: size mismatch");
  GridFunction out;
  out.times = times;
  out.values.resize(times.size());
  out.values[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    acc += 0.5 * (integrand[i - 1] + integrand[i]) * (times[i] - times[i - 1]);
    out.values[i] = acc;
  }
  return out;
}

// Sorted union of two increasing time grids, merging nodes within kTimeMergeTol.
inline std::vector<double> merge_times(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto push = [&out](double t) {
    if (out.empty() || t - out.back() > kTimeMergeTol) out.push_back(t);
  };
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      push(a[i++]);
    else
      push(b[j++]);
  }
  while (i < a.size()) push(a[i++]);
  while (j < b.size()) push(b[j++]);
  return out;
}

// Max absolute gap over the union of both grids, interpolating linearly in
// between nodes. Both functions must cover the same interval.
inline double sup_error(const GridFunction& a, const GridFunction& b) {
  if (a.times.empty() || b.times.empty())
    throw std::invalid_argument("sup_error: empty grid");
  if (std::abs(a.times.front() - b.times.front()) > kTimeMergeTol ||
      std::abs(a.times.back() - b.times.back()) > kTimeMergeTol)
    throw std::invalid_argument("sup_error: grids cover different intervals");
  const std::vector<double> grid = merge_times(a.times, b.times);
  double m = 0.0;
  for (double t : grid) m = std::max(m, std::abs(a.value_at(t) - b.value_at(t)));
  return m;
}

}  // namespace stratint
