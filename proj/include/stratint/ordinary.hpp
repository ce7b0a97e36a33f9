#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stratint/funcs.hpp"
#include "stratint/grid.hpp"
#include "stratint/paths.hpp"

namespace stratint {

// Grid holding both the path knots and a quadrature mesh; see refine_grid.
using RefinedGridFunction = GridFunction;

namespace detail {

// dW = slope ds on each segment, so the Stieltjes step is a weighted trapezoid:
//   out(t_i) = sum_{j<=i} slope_j (t_j - t_{j-1}) (f inner)(t_{j-1}) + (f inner)(t_j)) / 2.
// `slopes[i]` is the path slope on (times[i-1], times[i]).
inline RefinedGridFunction stieltjes_step_on(const FunctionSpec& f,
                                             const RefinedGridFunction& inner,
                                             const std::vector<double>& slopes) {
  const std::vector<double>& t = inner.times;
  if (t.size() < 2 || t.size() != inner.values.size() || slopes.size() != t.size())
    throw std::invalid_argument("stieltjes_step: grid mismatch");
  RefinedGridFunction out;
  out.times = t;
  out.values.resize(t.size());
  out.values[0] = 0.0;
  double acc = 0.0;
  double prev = f.value(t[0]) * inner.values[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double cur = f.value(t[i]) * inner.values[i];
    acc += slopes[i] * (t[i] - t[i - 1]) * 0.5 * (prev + cur);
    out.values[i] = acc;
    prev = cur;
  }
  return out;
}

}  // namespace detail

// One level of the ordinary iterated integral against a bounded-variation
// piecewise-linear path: integral_0^t f(s) inner(s) dW(s).
inline RefinedGridFunction stieltjes_step(const FunctionSpec& f,
                                          const RefinedGridFunction& inner,
                                          const PiecewiseLinearPath& path) {
  if (inner.times.empty())
    throw std::invalid_argument("stieltjes_step: empty grid");
  if (std::abs(inner.times.front()) > kTimeMergeTol ||
      std::abs(inner.times.back() - path.horizon()) > kTimeMergeTol)
    throw std::invalid_argument("stieltjes_step: grid does not cover [0, horizon]");
  return detail::stieltjes_step_on(f, inner, interval_slopes(path, inner.times));
}

// Ordinary multiple integrals J_1, ..., J_n of (f_1, ..., f_n) against the
// path, each as a running function on the delta-refined grid. J_k nests J_{k-1}
// through one Stieltjes step.
inline std::vector<RefinedGridFunction> ordinary_multiple(const FunctionTuple& tuple,
                                                          const PiecewiseLinearPath& path,
                                                          double delta) {
  std::vector<double> times = refine_grid(path, delta);
  const std::vector<double> slopes = interval_slopes(path, times);
  std::vector<RefinedGridFunction> levels;
  levels.reserve(tuple.order());
  RefinedGridFunction cur = grid_constant(std::move(times), 1.0);
  for (std::size_t k = 0; k < tuple.order(); ++k) {
    cur = detail::stieltjes_step_on(tuple.func(k), cur, slopes);
    levels.push_back(cur);
  }
  return levels;
}

// Top level J_n rebuilt through the same pathwise expansion used on the
// stochastic side, with W replaced by the piecewise-linear path:
//   J_n(t) = sum_{k=1}^n (-1)^{k+1} J_{n-k}(t) W(t)^k / k! g_k(t)
//          + sum_{k=1}^n (-1)^k  integral_0^t J_{n-k}(s) W(s)^k / k! g_k'(s) ds,
// g_k = f_{n-k+1} ... f_n. Evaluated by exact summation by parts on the grid:
// with P_k = W^k/k!, v_k = g_k J_{n-k} and bar denoting the endpoint average
// over one grid interval,
//   sum (v_k)~ dP_k = v_k(t) P_k(t) - sum (P_k)~ (g_k)~ dJ_{n-k}
//                                   - sum (P_k)~ (J_{n-k})~ dg_k,
// then dJ_{n-k} = (f_{n-k} J_{n-k-1})~ dW (the trapezoid recursion step) feeds
// the first sum back into the same form at order k+1 up to two computable
// residuals, the product-of-averages defect 1/4 dg_k d(f_{n-k} J_{n-k-1}) dW
// and the power defect (P_k)~ dW - dP_{k+1}. Every step is an identity, so the
// result matches ordinary_multiple to rounding whenever `lower` came from it;
// the time-integral terms are the Stieltjes sums against dg_k above.
// `lower` must hold J_1, ..., J_{n-1} on exactly the grid `times` (J_0 == 1 is
// implicit). Agreement with ordinary_multiple is a built-in consistency check
// of the whole ordinary-side machinery.
inline RefinedGridFunction ordinary_via_decomposition(
    const FunctionTuple& tuple, const PiecewiseLinearPath& path,
    std::span<const RefinedGridFunction> lower, const std::vector<double>& times) {
  const std::size_t n = tuple.order();
  if (lower.size() + 1 < n)
    throw std::invalid_argument("ordinary_via_decomposition: needs J_1..J_{n-1}");
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (lower[k].times != times)
      throw std::invalid_argument("ordinary_via_decomposition: grid mismatch");
  const std::size_t sz = times.size();
  const std::vector<double> w = values_at(path, times);

  std::vector<std::vector<double>> fv(n, std::vector<double>(sz));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < sz; ++j) fv[i][j] = tuple.func(i).value(times[j]);

  const std::vector<double> ones(sz, 1.0);
  // levels are J_1.. so J_q sits at lower[q-1]; J_0 is the constant 1
  auto level = [&](std::size_t q) -> const std::vector<double>& {
    return q == 0 ? ones : lower[q - 1].values;
  };

  RefinedGridFunction out = grid_constant(times, 0.0);
  std::vector<double> gk = fv[n - 1];  // g_1 = f_n
  std::vector<double> pk(w);           // P_1 = W
  std::vector<double> g_next(sz), p_next(sz), x_next(sz);
  for (std::size_t k = 1; k <= n; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    const std::vector<double>& low = level(n - k);
    const bool has_next = k < n;
    const std::vector<double>& low_next = level(has_next ? n - k - 1 : 0);
    if (has_next) {
      for (std::size_t j = 0; j < sz; ++j) {
        g_next[j] = gk[j] * fv[n - k - 1][j];
        p_next[j] = pk[j] * w[j] / static_cast<double>(k + 1);
        x_next[j] = fv[n - k - 1][j] * low_next[j];
      }
    }
    out.values[0] += sign * gk[0] * low[0] * pk[0];
    double bsum = 0.0, csum = 0.0, rsum = 0.0;
    for (std::size_t j = 1; j < sz; ++j) {
      const double dw = w[j] - w[j - 1];
      const double pbar = 0.5 * (pk[j] + pk[j - 1]);
      const double dg = gk[j] - gk[j - 1];
      bsum += pbar * 0.5 * (low[j] + low[j - 1]) * dg;
      if (has_next) {
        const double vbar = 0.5 * (g_next[j] * low_next[j] +
                                   g_next[j - 1] * low_next[j - 1]);
        csum += vbar * (pbar * dw - (p_next[j] - p_next[j - 1]));
        rsum += 0.25 * pbar * dg * (x_next[j] - x_next[j - 1]) * dw;
      }
      out.values[j] += sign * (gk[j] * low[j] * pk[j] - bsum) - sign * (csum - rsum);
    }
    if (has_next) {
      gk.swap(g_next);
      pk.swap(p_next);
    }
  }
  return out;
}

}  // namespace stratint
