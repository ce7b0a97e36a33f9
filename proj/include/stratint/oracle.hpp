#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stratint/funcs.hpp"
#include "stratint/grid.hpp"
#include "stratint/paths.hpp"

// Independent reference implementations used only by tests and the check
// suites. Nothing here is allowed to call into strat.hpp or ordinary.hpp;
// agreement between the two sides is the point of the comparison.

namespace stratint {

struct SimplexQuadSpec {
  int order = 2;   // n, capped at 3 (cost grows like mesh^1 per level but the
                   // value of a brute check above n=3 does not)
  int mesh = 256;  // uniform quadrature mesh laid over the path knots
};

// J_n(T) transcribed directly from the nested-simplex definition
// {0 <= s_1 <= ... <= s_n <= T}: iterated one-dimensional trapezoid passes
// over this oracle's own mesh (uniform M subdivision merged with the path
// knots). Mesh construction, path sampling and increment recovery are all
// local, so agreement with the production evaluators compares two separate
// implementations rather than one code path. Error O(mesh^-2).
inline double brute_force_J(const FunctionTuple& tuple, const PiecewiseLinearPath& path,
                            const SimplexQuadSpec& spec) {
  if (spec.order < 1 || spec.order > 3)
    throw std::invalid_argument("brute_force_J: order must be in 1..3");
  if (spec.mesh < 2) throw std::invalid_argument("brute_force_J: mesh must be >= 2");
  if (static_cast<int>(tuple.order()) != spec.order)
    throw std::invalid_argument("brute_force_J: tuple order != spec order");

  const double T = path.horizon();
  const double tol = 1e-12 * std::max(1.0, T);
  std::vector<double> t;
  t.reserve(path.knot_count() + static_cast<std::size_t>(spec.mesh) + 1);
  for (int i = 0; i <= spec.mesh; ++i)
    t.push_back(T * static_cast<double>(i) / static_cast<double>(spec.mesh));
  t.insert(t.end(), path.knots().begin(), path.knots().end());
  std::sort(t.begin(), t.end());
  std::size_t kept = 1;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] - t[kept - 1] > tol) t[kept++] = t[i];
  t.resize(kept);
  t.back() = T;  // dedup must not round away the right endpoint

  const std::size_t sz = t.size();
  std::vector<double> w(sz);
  for (std::size_t i = 0; i < sz; ++i) w[i] = path.value(t[i]);

  // level k holds s -> integral over the k-dim corner simplex below s
  std::vector<double> level(sz, 1.0);
  std::vector<double> next(sz);
  for (int k = 0; k < spec.order; ++k) {
    const FunctionSpec& f = tuple.func(static_cast<std::size_t>(k));
    next[0] = 0.0;
    for (std::size_t i = 1; i < sz; ++i) {
      const double dw = w[i] - w[i - 1];  // slope * dt, one linear piece per cell
      const double lo = f.value(t[i - 1]) * level[i - 1];
      const double hi = f.value(t[i]) * level[i];
      next[i] = next[i - 1] + dw * 0.5 * (lo + hi);
    }
    level.swap(next);
  }
  return level.back();
}

// Closed form of the order-n multiple Stratonovich integral with all f == 1:
// p_n(w, t) with p_0 = 1, p_1 = w, (k+1) p_{k+1} = w p_k - t p_{k-1}.
// E.g. p_2 = (w^2 - t)/2, p_3 = (w^3 - 3 t w)/6.
inline double hermite_ito_closed_form(int n, double w, double t) {
  if (n < 0) throw std::invalid_argument("hermite_ito_closed_form: n must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = w;
  for (int k = 1; k < n; ++k) {
    const double nxt = (w * cur - t * prev) / static_cast<double>(k + 1);
    prev = cur;
    cur = nxt;
  }
  return cur;
}

// Midpoint-rule discretization of the order-n Stratonovich integral: every
// level uses the midpoint value of integrand and inner integral against the
// Brownian increment. Converges to the same limit as the production methods
// but shares no code path with them.
inline GridFunction midpoint_strat(const FunctionTuple& tuple,
                                   const DiscreteBrownianPath& path) {
  const std::vector<double>& t = path.times();
  const std::vector<double>& w = path.values();
  const std::size_t sz = t.size();
  std::vector<double> level(sz, 1.0);
  std::vector<double> next(sz);
  for (std::size_t k = 0; k < tuple.order(); ++k) {
    const FunctionSpec& f = tuple.func(k);
    next[0] = 0.0;
    for (std::size_t j = 1; j < sz; ++j) {
      const double tm = 0.5 * (t[j - 1] + t[j]);
      const double inner_mid = 0.5 * (level[j - 1] + level[j]);
      next[j] = next[j - 1] + f.value(tm) * inner_mid * (w[j] - w[j - 1]);
    }
    level.swap(next);
  }
  GridFunction out;
  out.times = t;
  out.values = std::move(level);
  return out;
}

// Var W^(m)(t) = t - (1 - e^{-2 m t}) / (2 m) for the uniform transport
// approximation (from E[(-1)^{N(mu)} (-1)^{N(mv)}] = e^{-2 m |u - v|}).
inline double transport_variance(double rate, double t) {
  if (!(rate > 0.0))
    throw std::invalid_argument("transport_variance: rate must be positive");
  if (t < 0.0) throw std::invalid_argument("transport_variance: t must be >= 0");
  return t - (1.0 - std::exp(-2.0 * rate * t)) / (2.0 * rate);
}

}  // namespace stratint
