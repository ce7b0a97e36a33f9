#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stratint/grid.hpp"
#include "stratint/rng.hpp"

namespace stratint {

// Continuous piecewise-linear path on [0, horizon]. Slopes are stored, not
// re-derived from values, so a path built from exact slopes (e.g. +-sqrt(m))
// reports them exactly.
class PiecewiseLinearPath {
 public:
  static PiecewiseLinearPath from_knots_values(std::vector<double> knots,
                                               std::vector<double> values) {
    check_knots(knots, values.size());
    std::vector<double> slopes(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      slopes[i] = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
    return PiecewiseLinearPath(std::move(knots), std::move(values), std::move(slopes));
  }

  static PiecewiseLinearPath from_knots_slopes(std::vector<double> knots,
                                               double start_value,
                                               std::vector<double> slopes) {
    if (knots.size() < 2 || slopes.size() + 1 != knots.size())
      throw std::invalid_argument("PiecewiseLinearPath: slope count must be knots-1");
    std::vector<double> values(knots.size());
    values[0] = start_value;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      values[i + 1] = values[i] + slopes[i] * (knots[i + 1] - knots[i]);
    check_knots(knots, values.size());
    return PiecewiseLinearPath(std::move(knots), std::move(values), std::move(slopes));
  }

  double horizon() const { return knots_.back(); }
  std::size_t knot_count() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& knot_values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }

  // Linear interpolation; exact at knots.
  double value(double t) const {
    const double slack = 1e-9 * std::max(1.0, horizon());
    if (t < -slack || t > horizon() + slack)
      throw std::domain_error("PiecewiseLinearPath::value: t outside [0, horizon]");
    t = std::clamp(t, 0.0, horizon());
    const std::size_t seg = segment_index(t);
    if (t == knots_[seg]) return values_[seg];
    return values_[seg] + slopes_[seg] * (t - knots_[seg]);
  }

  // Index i with knots[i] <= t < knots[i+1] (last segment for t = horizon).
  std::size_t segment_index(double t) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
    if (hi <= 1) return 0;
    if (hi >= knots_.size()) return knots_.size() - 2;
    return hi - 1;
  }

  double total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
      tv += std::abs(values_[i + 1] - values_[i]);
    return tv;
  }

 private:
  PiecewiseLinearPath(std::vector<double> knots, std::vector<double> values,
                      std::vector<double> slopes)
      : knots_(std::move(knots)),
        values_(std::move(values)),
        slopes_(std::move(slopes)) {}

  static void check_knots(const std::vector<double>& knots, std::size_t n_values) {
    if (knots.size() < 2)
      throw std::invalid_argument("PiecewiseLinearPath: needs at least two knots");
    if (knots.size() != n_values)
      throw std::invalid_argument("PiecewiseLinearPath: knot/value count mismatch");
    if (knots.front() != 0.0)
      throw std::invalid_argument("PiecewiseLinearPath: first knot must be 0");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      if (!(knots[i + 1] > knots[i]))
        throw std::invalid_argument("PiecewiseLinearPath: knots must be strictly increasing");
  }

  std::vector<double> knots_;
  std::vector<double> values_;  // values_[i] = path(knots_[i])
  std::vector<double> slopes_;  // slopes_[i] on [knots_[i], knots_[i+1])
};

// Brownian samples W(t_j) on the uniform grid t_j = j T / N, W(0) = 0.
class DiscreteBrownianPath {
 public:
  DiscreteBrownianPath(double horizon, std::vector<double> values)
      : horizon_(horizon), values_(std::move(values)) {
    if (values_.size() < 2)
      throw std::invalid_argument("DiscreteBrownianPath: needs at least one step");
    if (!(horizon_ > 0.0))
      throw std::invalid_argument("DiscreteBrownianPath: horizon must be positive");
    if (values_.front() != 0.0)
      throw std::invalid_argument("DiscreteBrownianPath: W(0) must be 0");
    const std::size_t n = values_.size() - 1;
    const double dt = horizon_ / static_cast<double>(n);
    times_.resize(n + 1);
    for (std::size_t j = 0; j < n; ++j) times_[j] = dt * static_cast<double>(j);
    times_[n] = horizon_;
  }

  std::size_t grid_size() const { return values_.size() - 1; }  // N
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / static_cast<double>(grid_size()); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  double horizon_;
  std::vector<double> values_;
  std::vector<double> times_;
};

// Brownian motion on N uniform steps: W_{j+1} = W_j + sqrt(dt) Z_j.
inline DiscreteBrownianPath gen_brownian(std::size_t steps, double horizon,
                                         RngSeed seed) {
  if (steps < 1) throw std::invalid_argument("gen_brownian: steps must be >= 1");
  if (!(horizon > 0.0))
    throw std::invalid_argument("gen_brownian: horizon must be positive");
  RandomStream rs(seed);
  const double sqrt_dt = std::sqrt(horizon / static_cast<double>(steps));
  std::vector<double> w(steps + 1);
  w[0] = 0.0;
  for (std::size_t j = 0; j < steps; ++j) w[j + 1] = w[j] + sqrt_dt * rs.gauss();
  return DiscreteBrownianPath(horizon, std::move(w));
}

// Same Brownian draw on a coarser grid: keeps every (N / coarse_steps)-th sample.
inline DiscreteBrownianPath restrict_grid(const DiscreteBrownianPath& path,
                                          std::size_t coarse_steps) {
  const std::size_t n = path.grid_size();
  if (coarse_steps < 1 || n % coarse_steps != 0)
    throw std::invalid_argument("restrict_grid: coarse grid must divide the fine grid");
  const std::size_t stride = n / coarse_steps;
  std::vector<double> w(coarse_steps + 1);
  for (std::size_t j = 0; j <= coarse_steps; ++j) w[j] = path.values()[j * stride];
  return DiscreteBrownianPath(path.horizon(), std::move(w));
}

// Polygonal interpolation of the Brownian samples on m segments, m | N: knots
// at j T / m with the Brownian values at those grid points.
inline PiecewiseLinearPath polygonal(const DiscreteBrownianPath& path,
                                     std::size_t segments) {
  const std::size_t n = path.grid_size();
  if (segments < 1 || n % segments != 0)
    throw std::invalid_argument("polygonal: segment count must divide the grid");
  const std::size_t stride = n / segments;
  std::vector<double> knots(segments + 1);
  std::vector<double> values(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    knots[i] = path.times()[i * stride];
    values[i] = path.values()[i * stride];
  }
  return PiecewiseLinearPath::from_knots_values(std::move(knots), std::move(values));
}

// Uniform transport approximation with rate m:
//   W(t) = sqrt(m) (-1)^A integral_0^t (-1)^{N(m u)} du,
// A a fair coin, N a unit-rate Poisson process. Slopes are exactly +-sqrt(m)
// and flip at each Poisson event; inter-event gaps are Exp(m). Events closer
// than kTimeMergeTol to the previous knot are absorbed (the two flips cancel
// up to an O(sqrt(m) * tol) value shift).
inline PiecewiseLinearPath gen_transport(double rate, double horizon, RngSeed seed) {
  if (!(rate > 0.0)) throw std::invalid_argument("gen_transport: rate must be positive");
  if (!(horizon > 0.0))
    throw std::invalid_argument("gen_transport: horizon must be positive");
  RandomStream rs(seed);
  const double root_m = std::sqrt(rate);
  const int start_sign = rs.coin_flip() ? -1 : 1;  // (-1)^A

  std::vector<double> knots{0.0};
  std::vector<double> slopes;
  int sign = start_sign;
  double t = 0.0;
  for (;;) {
    const double jump = t + rs.exponential(rate);
    if (jump >= horizon) {
      knots.push_back(horizon);
      slopes.push_back(sign * root_m);
      break;
    }
    if (jump - knots.back() > kTimeMergeTol) {
      knots.push_back(jump);
      slopes.push_back(sign * root_m);
    }
    sign = -sign;
    t = jump;
  }
  return PiecewiseLinearPath::from_knots_slopes(std::move(knots), 0.0,
                                                std::move(slopes));
}

// Knots of `path` united with the uniform mesh {j delta}. Knots appear exactly
// once; mesh points within kTimeMergeTol of a knot are dropped, so no interval
// of the output straddles a knot and all gaps are <= delta (+tol).
inline std::vector<double> refine_grid(const PiecewiseLinearPath& path, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("refine_grid: delta must be positive");
  const std::vector<double>& knots = path.knots();
  std::vector<double> out;
  out.reserve(knots.size() + static_cast<std::size_t>(path.horizon() / delta) + 2);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    out.push_back(a);
    long k = static_cast<long>(std::floor(a / delta)) + 1;
    while (static_cast<double>(k) * delta <= a + kTimeMergeTol) ++k;
    for (double tm = static_cast<double>(k) * delta; tm < b - kTimeMergeTol;
         tm = static_cast<double>(++k) * delta)
      out.push_back(tm);
  }
  out.push_back(knots.back());
  return out;
}

// Slope of the path segment covering (times[i-1], times[i]), assuming `times`
// never straddles a knot (the refine_grid contract). Entry 0 is unused.
inline std::vector<double> interval_slopes(const PiecewiseLinearPath& path,
                                           const std::vector<double>& times) {
  if (times.size() < 2)
    throw std::invalid_argument("interval_slopes: needs at least one interval");
  std::vector<double> s(times.size(), 0.0);
  const std::vector<double>& knots = path.knots();
  std::size_t seg = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double mid = 0.5 * (times[i - 1] + times[i]);
    while (seg + 2 < knots.size() && knots[seg + 1] <= mid) ++seg;
    s[i] = path.slopes()[seg];
  }
  return s;
}

// Path values at an increasing sequence of times (single monotone sweep).
inline std::vector<double> values_at(const PiecewiseLinearPath& path,
                                     const std::vector<double>& times) {
  std::vector<double> out(times.size());
  const std::vector<double>& knots = path.knots();
  std::size_t seg = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = std::clamp(times[i], 0.0, path.horizon());
    if (t >= knots.back()) {
      out[i] = path.knot_values().back();
      continue;
    }
    while (seg + 2 < knots.size() && knots[seg + 1] <= t) ++seg;
    out[i] = path.knot_values()[seg] + path.slopes()[seg] * (t - knots[seg]);
  }
  return out;
}

// CSV dump, one knot per row, 17 significant digits.
inline void write_path_csv(std::ostream& os, const PiecewiseLinearPath& path) {
  os << "t,w\n";
  char buf[128];
  for (std::size_t i = 0; i < path.knot_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.knots()[i],
                  path.knot_values()[i]);
    os << buf;
  }
}

}  // namespace stratint
