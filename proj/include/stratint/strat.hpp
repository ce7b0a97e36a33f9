#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stratint/funcs.hpp"
#include "stratint/grid.hpp"
#include "stratint/multi_index.hpp"
#include "stratint/paths.hpp"

namespace stratint {

// Left-point stochastic step: out(t_j) = sum_{i<=j} f(t_{i-1}) inner(t_{i-1}) dW_i.
// The left-point rule is what makes the iterated integral a stochastic
// (non-anticipating) one; do not replace it with a trapezoid.
inline GridFunction ito_step_integral(const FunctionSpec& f, const GridFunction& inner,
                                      const DiscreteBrownianPath& path) {
  const std::vector<double>& t = path.times();
  const std::vector<double>& w = path.values();
  if (inner.values.size() != t.size())
    throw std::invalid_argument("ito_step_integral: inner grid mismatch");
  GridFunction out;
  out.times = t;
  out.values.resize(t.size());
  out.values[0] = 0.0;
  double acc = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    acc += f.value(t[j - 1]) * inner.values[j - 1] * (w[j] - w[j - 1]);
    out.values[j] = acc;
  }
  return out;
}

// Time-integral step: out(t_j) = trapezoid of f(s) g(s) inner(s) up to t_j.
inline GridFunction lebesgue_step_integral(const FunctionSpec& f, const FunctionSpec& g,
                                           const GridFunction& inner,
                                           const DiscreteBrownianPath& path) {
  const std::vector<double>& t = path.times();
  if (inner.values.size() != t.size())
    throw std::invalid_argument("lebesgue_step_integral: inner grid mismatch");
  std::vector<double> integrand(t.size());
  for (std::size_t j = 0; j < t.size(); ++j)
    integrand[j] = f.value(t[j]) * g.value(t[j]) * inner.values[j];
  return cumulative_trapezoid(t, integrand);
}

// Iterated integral I_alpha attached to one multi-index: entries are folded
// left to right (alpha_1 innermost), an entry 1 consuming one function through
// a stochastic step and an entry 2 consuming two functions through a
// time-integral step. The last entry is the outermost integral, so peeling it
// recovers the recursive definition
//   alpha_q = 1:  integral f_n I_{(alpha_1..alpha_{q-1})} dW,
//   alpha_q = 2:  integral f_n f_{n-1} I_{(alpha_1..alpha_{q-1})} ds.
inline GridFunction eval_I_alpha(const MultiIndex& alpha, const FunctionTuple& tuple,
                                 const DiscreteBrownianPath& path) {
  if (alpha.order() != static_cast<int>(tuple.order()))
    throw std::invalid_argument("eval_I_alpha: multi-index order != tuple order");
  GridFunction acc = grid_constant(path.times(), 1.0);
  std::size_t consumed = 0;  // functions already used, counting from f_1
  for (int entry : alpha.entries()) {
    if (entry == 1) {
      acc = ito_step_integral(tuple.func(consumed), acc, path);
      consumed += 1;
    } else {
      acc = lebesgue_step_integral(tuple.func(consumed + 1), tuple.func(consumed),
                                   acc, path);
      consumed += 2;
    }
  }
  return acc;
}

// All levels I^S_0, ..., I^S_n of the Stratonovich recursion
//   I^S_k = ito(f_k, I^S_{k-1}) + 1/2 leb(f_k, f_{k-1}, I^S_{k-2}),  I^S_0 = 1,
// with the k = 1 correction term absent.
inline std::vector<GridFunction> strat_levels(const FunctionTuple& tuple,
                                              const DiscreteBrownianPath& path) {
  const std::size_t n = tuple.order();
  std::vector<GridFunction> levels;
  levels.reserve(n + 1);
  levels.push_back(grid_constant(path.times(), 1.0));
  for (std::size_t k = 1; k <= n; ++k) {
    GridFunction next = ito_step_integral(tuple.func(k - 1), levels[k - 1], path);
    if (k >= 2) {
      const GridFunction corr = lebesgue_step_integral(
          tuple.func(k - 1), tuple.func(k - 2), levels[k - 2], path);
      for (std::size_t j = 0; j < next.values.size(); ++j)
        next.values[j] += 0.5 * corr.values[j];
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

enum class StratMethod { GnSum, Recursion, Expansion };

namespace detail {

// Sum over G_n with weights 2^{q-n}.
inline GridFunction strat_gn_sum(const FunctionTuple& tuple,
                                 const DiscreteBrownianPath& path) {
  GridFunction total = grid_constant(path.times(), 0.0);
  for (const MultiIndex& alpha : enumerate_gn(static_cast<int>(tuple.order()))) {
    const GridFunction term = eval_I_alpha(alpha, tuple, path);
    const double w = weight(alpha);
    for (std::size_t j = 0; j < total.values.size(); ++j)
      total.values[j] += w * term.values[j];
  }
  return total;
}

// Pathwise expansion in powers of W(t):
//   I^S_n(t) = sum_{k=1}^n (-1)^{k+1} I^S_{n-k}(t) W(t)^k / k! g_k(t)
//            + sum_{k=1}^n (-1)^k  integral_0^t I^S_{n-k}(s) W(s)^k / k! g_k'(s) ds
// with g_k the product of the last k tuple functions. Lower levels come from
// the two-term recursion; only the top level is rebuilt through this identity.
inline GridFunction strat_expansion(const FunctionTuple& tuple,
                                    const DiscreteBrownianPath& path) {
  const std::size_t n = tuple.order();
  const std::vector<GridFunction> levels = strat_levels(tuple, path);
  const std::vector<double>& t = path.times();
  const std::vector<double>& w = path.values();
  const std::size_t sz = t.size();

  GridFunction out = grid_constant(t, 0.0);
  std::vector<double> wpow(sz, 1.0);  // W(t)^k / k!, built incrementally
  std::vector<double> integrand(sz);
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t j = 0; j < sz; ++j) wpow[j] *= w[j] / static_cast<double>(k);
    const double boundary_sign = (k % 2 == 1) ? 1.0 : -1.0;
    const std::vector<double>& lower = levels[n - k].values;
    for (std::size_t j = 0; j < sz; ++j) {
      const auto [gv, gd] = tuple.suffix_product(k, t[j]);
      out.values[j] += boundary_sign * lower[j] * wpow[j] * gv;
      integrand[j] = lower[j] * wpow[j] * gd;
    }
    const GridFunction time_term = cumulative_trapezoid(t, integrand);
    for (std::size_t j = 0; j < sz; ++j)
      out.values[j] -= boundary_sign * time_term.values[j];
  }
  return out;
}

}  // namespace detail

// Order-n multiple Stratonovich integral of (f_1, ..., f_n) on the grid of
// `path`, as a running function of the upper limit. The three methods are
// independent representations of the same object and must agree up to the
// discretization tolerance.
inline GridFunction strat_integral(const FunctionTuple& tuple,
                                   const DiscreteBrownianPath& path,
                                   StratMethod method) {
  switch (method) {
    case StratMethod::GnSum:
      return detail::strat_gn_sum(tuple, path);
    case StratMethod::Recursion: {
      std::vector<GridFunction> levels = strat_levels(tuple, path);
      return std::move(levels.back());
    }
    case StratMethod::Expansion:
      return detail::strat_expansion(tuple, path);
  }
  throw std::invalid_argument("strat_integral: unknown method");
}

}  // namespace stratint
