#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stratint/config.hpp"
#include "stratint/funcs.hpp"
#include "stratint/grid.hpp"
#include "stratint/oracle.hpp"
#include "stratint/ordinary.hpp"
#include "stratint/paths.hpp"
#include "stratint/report.hpp"
#include "stratint/stats.hpp"
#include "stratint/strat.hpp"

namespace stratint {

inline constexpr std::uint64_t kDefaultMasterSeed = 314159;
inline constexpr std::uint64_t kOracleMasterSeed = 271828;

// The ordinary-side decomposition is an exact rearrangement of the recursion
// on the shared grid, so the two evaluators agree to rounding (~1e-13). The
// contract bound is far above that but far below any algebra bug.
inline constexpr double kDecompositionRelTol = 1e-6;

inline FunctionTuple unit_tuple(std::size_t n, double horizon) {
  return FunctionTuple(std::vector<FunctionSpec>(n, FunctionSpec::constant(1.0)),
                       horizon);
}

// Fixed rotation through the three function families; every entry is O(1) on
// [0, 1] with a non-vanishing derivative, so derivative terms are exercised.
inline FunctionTuple mixed_tuple(std::size_t n, double horizon) {
  static const std::vector<FunctionSpec> pool = {
      FunctionSpec::poly({1.0, 0.5}),
      FunctionSpec::sin(1.3, 0.5),
      FunctionSpec::exp(0.7),
      FunctionSpec::poly({0.5, 0.0, 0.25}),
  };
  std::vector<FunctionSpec> fs;
  fs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) fs.push_back(pool[i % pool.size()]);
  return FunctionTuple(std::move(fs), horizon);
}

// Work-stealing loop over [0, count). Each index writes only its own output
// slot, so results do not depend on the thread count. The first exception is
// re-thrown on the calling thread.
template <typename Body>
inline void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t extra = std::min<std::size_t>(threads, count) - 1;
  pool.reserve(extra);
  for (std::size_t k = 0; k < extra; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double max_grid_gap(const GridFunction& a, const GridFunction& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("max_grid_gap: grid mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j)
    m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

// ---------------------------------------------------------------------------
// Three-way agreement suite: the two closed-form representations and the
// direct recursion must track each other (and an independent midpoint
// discretization) within the calibrated tolerance, on a fine and on a 4x
// coarser grid of the same Brownian draw.

struct AgreementOptions {
  std::size_t grid = 1 << 14;
  std::size_t num_seeds = 20;
  std::uint64_t master_seed = kDefaultMasterSeed;
  double horizon = 1.0;
  std::size_t max_order = 4;
  std::size_t coarse_factor = 4;
  unsigned threads = 1;
};

struct AgreementRow {
  std::string label;
  std::size_t order = 0;
  std::size_t seed_index = 0;
  double fine_all = 0.0;    // max over all six method pairs, max over the grid
  double coarse_all = 0.0;
  double fine_production = 0.0;  // max over the three production-method pairs
  double coarse_production = 0.0;
};

struct AgreementReport {
  std::size_t grid = 0;
  std::size_t coarse_grid = 0;
  double tol_fine = 0.0;
  double tol_coarse = 0.0;
  std::vector<AgreementRow> rows;
  double median_fine = 0.0;    // production pairs, all rows
  double median_coarse = 0.0;
  double refinement_ratio = 0.0;
  std::size_t violations = 0;
  bool tol_pass = false;
  bool ratio_pass = false;
  bool pass() const { return tol_pass && ratio_pass; }
};

namespace detail {

struct MethodGaps {
  double all = 0.0;
  double production = 0.0;
};

inline MethodGaps method_gaps(const FunctionTuple& tuple,
                              const DiscreteBrownianPath& path) {
  const GridFunction gn = strat_integral(tuple, path, StratMethod::GnSum);
  const GridFunction rec = strat_integral(tuple, path, StratMethod::Recursion);
  const GridFunction exp = strat_integral(tuple, path, StratMethod::Expansion);
  const GridFunction mid = midpoint_strat(tuple, path);
  MethodGaps g;
  g.production = std::max({max_grid_gap(gn, rec), max_grid_gap(gn, exp),
                           max_grid_gap(rec, exp)});
  g.all = std::max({g.production, max_grid_gap(gn, mid), max_grid_gap(rec, mid),
                    max_grid_gap(exp, mid)});
  return g;
}

}  // namespace detail

inline AgreementReport run_agreement_suite(const AgreementOptions& opt,
                                           const ToleranceSchedule& tol) {
  if (opt.num_seeds < 1)
    throw std::invalid_argument("run_agreement_suite: needs at least one seed");
  if (opt.coarse_factor < 2 || opt.grid % opt.coarse_factor != 0)
    throw std::invalid_argument("run_agreement_suite: coarse factor must divide grid");

  AgreementReport report;
  report.grid = opt.grid;
  report.coarse_grid = opt.grid / opt.coarse_factor;
  report.tol_fine = tol.tol(report.grid);
  report.tol_coarse = tol.tol(report.coarse_grid);

  const std::size_t cases = 2 * opt.max_order;  // (unit, mixed) x order
  report.rows.resize(opt.num_seeds * cases);
  parallel_for(opt.num_seeds, opt.threads, [&](std::size_t s) {
    const DiscreteBrownianPath fine =
        gen_brownian(opt.grid, opt.horizon, {opt.master_seed, s});
    const DiscreteBrownianPath coarse = restrict_grid(fine, report.coarse_grid);
    std::size_t slot = s * cases;
    for (std::size_t n = 1; n <= opt.max_order; ++n) {
      for (int which = 0; which < 2; ++which) {
        const FunctionTuple tuple = (which == 0) ? unit_tuple(n, opt.horizon)
                                                 : mixed_tuple(n, opt.horizon);
        const detail::MethodGaps gf = detail::method_gaps(tuple, fine);
        const detail::MethodGaps gc = detail::method_gaps(tuple, coarse);
        AgreementRow& row = report.rows[slot++];
        row.label = (which == 0) ? "unit" : "mixed";
        row.order = n;
        row.seed_index = s;
        row.fine_all = gf.all;
        row.coarse_all = gc.all;
        row.fine_production = gf.production;
        row.coarse_production = gc.production;
      }
    }
  });

  std::vector<double> fine_prod, coarse_prod;
  fine_prod.reserve(report.rows.size());
  coarse_prod.reserve(report.rows.size());
  for (const AgreementRow& row : report.rows) {
    fine_prod.push_back(row.fine_production);
    coarse_prod.push_back(row.coarse_production);
    if (row.fine_all > report.tol_fine || row.coarse_all > report.tol_coarse)
      ++report.violations;
  }
  report.median_fine = median(fine_prod);
  report.median_coarse = median(coarse_prod);
  report.refinement_ratio =
      report.median_fine > 0.0 ? report.median_coarse / report.median_fine : 0.0;
  report.tol_pass = report.violations == 0;
  report.ratio_pass = report.refinement_ratio >= 1.5;
  return report;
}

// ---------------------------------------------------------------------------
// Polygonal convergence: per Brownian path, the ordinary integrals against the
// m-segment polygonal approximation are compared with the Stratonovich
// integral on the underlying fine grid; sup and terminal errors per (m, path).

inline ConvergenceReport run_polygonal_convergence(const ExperimentConfig& cfg,
                                                   unsigned threads,
                                                   bool measure_runtime = false) {
  if (cfg.family != PathFamily::Polygonal)
    throw ConfigError("family", "run_polygonal_convergence needs the polygonal family");
  const FunctionTuple tuple(cfg.functions, cfg.horizon);
  const double delta = cfg.effective_delta();
  const std::size_t nm = cfg.m_values.size();
  const std::size_t np = cfg.num_paths;

  ConvergenceReport report;
  report.rows.resize(nm * np);
  parallel_for(np, threads, [&](std::size_t p) {
    const DiscreteBrownianPath brownian =
        gen_brownian(cfg.grid, cfg.horizon, {cfg.master_seed, p});
    const GridFunction strat =
        strat_integral(tuple, brownian, StratMethod::Recursion);
    for (std::size_t mi = 0; mi < nm; ++mi) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::size_t m = static_cast<std::size_t>(cfg.m_values[mi]);
      const PiecewiseLinearPath approx = polygonal(brownian, m);
      const std::vector<RefinedGridFunction> levels =
          ordinary_multiple(tuple, approx, delta);
      const RefinedGridFunction& top = levels.back();
      const RefinedGridFunction decomposed = ordinary_via_decomposition(
          tuple, approx, {levels.data(), levels.size() - 1}, top.times);
      const double rel_gap =
          max_grid_gap(top, decomposed) / std::max(top.sup_abs(), 1e-9);
      if (rel_gap > kDecompositionRelTol)
        throw std::runtime_error(
            "ordinary decomposition identity violated (rel gap " +
            format_sig17(rel_gap) + " at m=" + format_sig17(cfg.m_values[mi]) +
            ", path " + std::to_string(p) + ")");

      ConvergenceRow& row = report.rows[mi * np + p];
      row.m = cfg.m_values[mi];
      row.path_index = p;
      row.sup_error = sup_error(top, strat);
      row.terminal_error = std::abs(top.values.back() - strat.values.back());
      if (measure_runtime) {
        const auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
      }
    }
  });

  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t mi = 0; mi < nm; ++mi) {
    std::vector<double> sup(np);
    double total = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      sup[p] = report.rows[mi * np + p].sup_error;
      total += sup[p];
    }
    LevelSummary s;
    s.m = cfg.m_values[mi];
    s.median_sup_error = median(sup);
    s.mean_sup_error = total / static_cast<double>(np);
    report.summary.push_back(s);
    fit_points.emplace_back(s.m, s.median_sup_error);
  }
  const RateFit fit = fit_rate(fit_points);
  report.fitted_rate = fit.slope;
  report.fit_points_excluded = fit.excluded;
  return report;
}

// ---------------------------------------------------------------------------
// Transport suite: sanity of the transport approximation itself. (a) empirical
// Var W^(m)(t) against the closed form, (b) moments of J_n(T) for f == 1
// against the moments of W(T)^n / n!.

struct TransportCheckRow {
  double m = 0.0;
  std::string check;  // "var_w", "mean_J", "var_J"
  double t = 0.0;
  double observed = 0.0;
  double expected = 0.0;
  double se = 0.0;
  double z = 0.0;  // (observed - expected) / se
};

struct TransportReport {
  std::vector<TransportCheckRow> rows;
  std::vector<double> mean_distances;  // |z| of mean_J per m, ascending m
  bool variance_pass = false;
  bool distance_decreasing = false;
  bool pass() const { return variance_pass && distance_decreasing; }
};

namespace detail {

inline double odd_double_factorial(int k) {  // 1 * 3 * 5 * ... * k for odd k
  double r = 1.0;
  for (int i = 3; i <= k; i += 2) r *= static_cast<double>(i);
  return r;
}

inline double gaussian_power_moment(int n, double var) {  // E Z^n, Z ~ N(0, var)
  if (n % 2 == 1) return 0.0;
  return odd_double_factorial(n - 1) * std::pow(var, n / 2);
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= static_cast<double>(i);
  return r;
}

}  // namespace detail

inline TransportReport run_transport_suite(const ExperimentConfig& cfg,
                                           unsigned threads) {
  if (cfg.family != PathFamily::Transport)
    throw ConfigError("family", "run_transport_suite needs the transport family");
  const FunctionTuple tuple(cfg.functions, cfg.horizon);
  if (!tuple.all_unit())
    throw ConfigError("functions",
                      "transport suite moments are defined for unit integrands");
  const int n = static_cast<int>(tuple.order());
  const double T = cfg.horizon;
  const double delta = cfg.effective_delta();
  const std::size_t np = cfg.num_paths;
  const double nfact = detail::factorial(n);
  const double mean_target = detail::gaussian_power_moment(n, T) / nfact;
  const double var_target =
      (detail::gaussian_power_moment(2 * n, T) -
       detail::gaussian_power_moment(n, T) * detail::gaussian_power_moment(n, T)) /
      (nfact * nfact);

  TransportReport report;
  for (std::size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
    const double m = cfg.m_values[mi];
    std::vector<double> w_half(np), w_full(np), jn(np);
    parallel_for(np, threads, [&](std::size_t p) {
      const PiecewiseLinearPath path =
          gen_transport(m, T, {cfg.master_seed, mi * np + p});
      w_half[p] = path.value(0.5 * T);
      w_full[p] = path.value(T);
      jn[p] = ordinary_multiple(tuple, path, delta).back().values.back();
    });

    const std::pair<double, const std::vector<double>*> var_checks[] = {
        {0.5 * T, &w_half}, {T, &w_full}};
    for (const auto& [t, samples] : var_checks) {
      TransportCheckRow row;
      row.m = m;
      row.check = "var_w";
      row.t = t;
      row.observed = sample_variance(*samples);
      row.expected = transport_variance(m, t);
      row.se = variance_standard_error(*samples);
      row.z = (row.observed - row.expected) / row.se;
      report.rows.push_back(row);
    }

    TransportCheckRow mrow;
    mrow.m = m;
    mrow.check = "mean_J";
    mrow.t = T;
    mrow.observed = mean(jn);
    mrow.expected = mean_target;
    mrow.se = std::sqrt(sample_variance(jn) / static_cast<double>(np));
    mrow.z = (mrow.observed - mrow.expected) / mrow.se;
    report.rows.push_back(mrow);
    report.mean_distances.push_back(std::abs(mrow.z));

    TransportCheckRow vrow;
    vrow.m = m;
    vrow.check = "var_J";
    vrow.t = T;
    vrow.observed = sample_variance(jn);
    vrow.expected = var_target;
    vrow.se = variance_standard_error(jn);
    vrow.z = (vrow.observed - vrow.expected) / vrow.se;
    report.rows.push_back(vrow);
  }

  report.variance_pass = true;
  for (const TransportCheckRow& row : report.rows)
    if (row.check == "var_w" && std::abs(row.z) > 3.0) report.variance_pass = false;
  report.distance_decreasing =
      report.mean_distances.size() >= 2 &&
      report.mean_distances.back() < report.mean_distances.front();
  return report;
}

inline void write_transport_csv(std::ostream& os, const TransportReport& report) {
  os << "m,check,t,observed,expected,se,z\n";
  for (const TransportCheckRow& r : report.rows) {
    os << format_sig17(r.m) << ',' << r.check << ',' << format_sig17(r.t) << ','
       << format_sig17(r.observed) << ',' << format_sig17(r.expected) << ','
       << format_sig17(r.se) << ',' << format_sig17(r.z) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Oracle self-checks on fixed seeds: the reference implementations must agree
// with the production evaluators and with their own closed forms before their
// verdicts mean anything.

struct OracleCheck {
  std::string name;
  double observed = 0.0;
  std::string requirement;
  bool passed = false;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool pass() const {
    for (const OracleCheck& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

inline OracleReport run_oracle_suite() {
  OracleReport report;
  const double T = 1.0;

  {  // brute-force simplex quadrature vs the recursive ordinary integrals;
     // the oracle runs on its own M = 2^12 mesh while the recursion uses
     // delta = 2^-14, so the gap spans two distinct discretizations
    std::vector<PiecewiseLinearPath> paths;
    for (std::uint64_t s = 0; s < 3; ++s)
      paths.push_back(gen_transport(8.0, T, {kOracleMasterSeed, 100 + s}));
    paths.push_back(polygonal(gen_brownian(1 << 10, T, {kOracleMasterSeed, 200}), 16));
    const double delta = T / static_cast<double>(1 << 14);
    for (int n = 2; n <= 3; ++n) {
      for (int which = 0; which < 2; ++which) {
        const FunctionTuple tuple = (which == 0)
                                        ? unit_tuple(static_cast<std::size_t>(n), T)
                                        : mixed_tuple(static_cast<std::size_t>(n), T);
        double worst = 0.0;
        for (const PiecewiseLinearPath& path : paths) {
          const double brute =
              brute_force_J(tuple, path, SimplexQuadSpec{n, 1 << 12});
          const double rec =
              ordinary_multiple(tuple, path, delta).back().values.back();
          worst = std::max(worst, std::abs(brute - rec));
        }
        OracleCheck c;
        c.name = std::string("brute_force_J vs ordinary_multiple, n=") +
                 std::to_string(n) + ((which == 0) ? ", unit" : ", mixed");
        c.observed = worst;
        c.requirement = "<= 1e-4";
        c.passed = worst <= 1e-4;
        report.checks.push_back(c);
      }
    }
  }

  {  // d/dw p_n = p_{n-1} by central differences
    const double h = 1e-5;
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
      for (double w : {-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 2.2}) {
        for (double t : {0.25, 1.0, 2.5}) {
          const double fd = (hermite_ito_closed_form(n, w + h, t) -
                             hermite_ito_closed_form(n, w - h, t)) /
                            (2.0 * h);
          const double exact = hermite_ito_closed_form(n - 1, w, t);
          const double rel =
              std::abs(fd - exact) / std::max(1.0, std::abs(exact));
          worst = std::max(worst, rel);
        }
      }
    }
    OracleCheck c;
    c.name = "hermite closed form: d/dw p_n = p_{n-1} (central difference)";
    c.observed = worst;
    c.requirement = "<= 1e-4";
    c.passed = worst <= 1e-4;
    report.checks.push_back(c);
  }

  {  // midpoint vs recursion disagreement shrinks under grid refinement
    for (int n = 2; n <= 3; ++n) {
      std::vector<double> ratios;
      for (std::uint64_t s = 0; s < 20; ++s) {
        const DiscreteBrownianPath fine =
            gen_brownian(1 << 14, T, {kOracleMasterSeed, s});
        const DiscreteBrownianPath coarse = restrict_grid(fine, 1 << 12);
        const FunctionTuple tuple = mixed_tuple(static_cast<std::size_t>(n), T);
        const double df =
            max_grid_gap(strat_integral(tuple, fine, StratMethod::Recursion),
                         midpoint_strat(tuple, fine));
        const double dc =
            max_grid_gap(strat_integral(tuple, coarse, StratMethod::Recursion),
                         midpoint_strat(tuple, coarse));
        ratios.push_back(dc / df);
      }
      OracleCheck c;
      c.name = std::string("midpoint vs recursion refinement ratio, n=") +
               std::to_string(n);
      c.observed = median(ratios);
      c.requirement = ">= 1.5";
      c.passed = c.observed >= 1.5;
      report.checks.push_back(c);
    }
  }

  {  // transport variance closed form vs Monte Carlo at m=1
    const double m = 1.0;
    const std::size_t paths = 100000;
    std::vector<double> w(paths);
    for (std::size_t p = 0; p < paths; ++p)
      w[p] = gen_transport(m, T, {kOracleMasterSeed, 300000 + p}).value(T);
    const double observed = sample_variance(w);
    const double expected = transport_variance(m, T);
    const double z =
        (observed - expected) / variance_standard_error(w);
    OracleCheck c;
    c.name = "transport_variance closed form vs Monte Carlo (m=1)";
    c.observed = std::abs(z);
    c.requirement = "<= 3 standard errors";
    c.passed = std::abs(z) <= 3.0;
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace stratint
