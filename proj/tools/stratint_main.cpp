// Command-line front end: consistency checks, convergence experiments against
// polygonal approximations, transport-approximation statistics, and the
// multi-index tables behind the order-n Stratonovich sum.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratint/config.hpp"
#include "stratint/harness.hpp"
#include "stratint/multi_index.hpp"
#include "stratint/report.hpp"

namespace {

constexpr const char* kDefaultTolerancePath = "config/tolerance.json";

void print_status(bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
}

int run_check(std::uint64_t seed, std::size_t grid, std::size_t seeds,
              const std::string& tolerance_path, unsigned threads) {
  const stratint::ToleranceSchedule tol =
      stratint::load_tolerance_schedule(tolerance_path);

  stratint::AgreementOptions opt;
  opt.grid = grid;
  opt.num_seeds = seeds;
  opt.master_seed = seed;
  opt.threads = threads;
  const stratint::AgreementReport agreement = stratint::run_agreement_suite(opt, tol);

  std::ostringstream line;
  line << "agreement: " << agreement.rows.size() << " rows, violations "
       << agreement.violations << ", tol(" << agreement.grid << ")="
       << stratint::format_sig17(agreement.tol_fine) << ", tol("
       << agreement.coarse_grid << ")="
       << stratint::format_sig17(agreement.tol_coarse) << ", refinement ratio "
       << stratint::format_sig17(agreement.refinement_ratio) << " (needs >= 1.5)";
  print_status(agreement.pass(), line.str());

  const stratint::OracleReport oracle = stratint::run_oracle_suite();
  for (const stratint::OracleCheck& c : oracle.checks) {
    std::ostringstream oline;
    oline << "oracle: " << c.name << ": observed "
          << stratint::format_sig17(c.observed) << " (" << c.requirement << ")";
    print_status(c.passed, oline.str());
  }

  return (agreement.pass() && oracle.pass()) ? 0 : 1;
}

int run_converge(const stratint::ExperimentConfig& cfg, unsigned threads,
                 bool timings) {
  const stratint::ConvergenceReport report =
      stratint::run_polygonal_convergence(cfg, threads, timings);
  stratint::write_file(cfg.output, [&](std::ostream& os) {
    stratint::write_convergence_rows(os, report);
  });
  const std::string spath = stratint::summary_path(cfg.output);
  stratint::write_file(spath, [&](std::ostream& os) {
    stratint::write_convergence_summary(os, report);
  });

  std::cout << "m,median_sup_error,mean_sup_error\n";
  for (const stratint::LevelSummary& s : report.summary)
    std::cout << stratint::format_sig17(s.m) << ','
              << stratint::format_sig17(s.median_sup_error) << ','
              << stratint::format_sig17(s.mean_sup_error) << '\n';
  std::cout << "# fitted_rate=" << stratint::format_sig17(report.fitted_rate)
            << "\n";
  if (report.fit_points_excluded > 0)
    std::cerr << "warning: " << report.fit_points_excluded
              << " zero-error levels excluded from the rate fit\n";
  std::cerr << "rows written to " << cfg.output << ", summary to " << spath
            << "\n";
  return 0;
}

int run_transport(const stratint::ExperimentConfig& cfg, unsigned threads,
                  const std::string& out) {
  const stratint::TransportReport report =
      stratint::run_transport_suite(cfg, threads);
  if (!out.empty()) {
    stratint::write_file(out, [&](std::ostream& os) {
      stratint::write_transport_csv(os, report);
    });
    std::cerr << "rows written to " << out << "\n";
  }
  stratint::write_transport_csv(std::cout, report);
  print_status(report.variance_pass,
               "transport: empirical Var W(t) within 3 SE of closed form");
  std::ostringstream line;
  line << "transport: standardized mean distance of J_n(T) decreasing in m (";
  for (std::size_t i = 0; i < report.mean_distances.size(); ++i)
    line << (i ? ", " : "")
         << stratint::format_sig17(report.mean_distances[i]);
  line << ")";
  print_status(report.distance_decreasing, line.str());
  return report.pass() ? 0 : 1;
}

int run_tabulate(int n) {
  const std::vector<stratint::MultiIndex> family = stratint::enumerate_gn(n);
  std::cout << "G_" << n << ": " << family.size() << " multi-indices\n";
  for (const stratint::MultiIndex& alpha : family) {
    std::cout << '(';
    for (std::size_t i = 0; i < alpha.entries().size(); ++i)
      std::cout << (i ? "," : "") << alpha.entries()[i];
    std::cout << ") weight " << stratint::format_sig17(stratint::weight(alpha))
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multiple Stratonovich integrals and their bounded-variation "
      "approximations"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand(
      "check", "Cross-method agreement and reference-implementation checks");
  std::uint64_t check_seed = stratint::kDefaultMasterSeed;
  std::size_t check_grid = 1 << 14;
  std::size_t check_paths = 20;
  std::string tolerance_path = kDefaultTolerancePath;
  unsigned check_threads = 1;
  check->add_option("--seed", check_seed, "master seed");
  check->add_option("--grid", check_grid, "Brownian grid size N");
  check->add_option("--paths", check_paths, "number of seeds");
  check->add_option("--tolerance", tolerance_path, "tolerance schedule JSON");
  check->add_option("--threads", check_threads, "worker threads");

  // converge
  auto* converge = app.add_subcommand(
      "converge", "Polygonal convergence experiment from a JSON config");
  std::string converge_config;
  std::string converge_out;
  std::uint64_t converge_seed = 0;
  std::size_t converge_paths = 0;
  std::size_t converge_grid = 0;
  unsigned converge_threads = 1;
  bool timings = false;
  converge->add_option("--config", converge_config, "experiment config JSON")
      ->required();
  converge->add_option("--out", converge_out, "override config output path");
  converge->add_option("--seed", converge_seed, "override master seed");
  converge->add_option("--paths", converge_paths, "override number of paths");
  converge->add_option("--grid", converge_grid, "override Brownian grid size");
  converge->add_option("--threads", converge_threads, "worker threads");
  converge->add_flag("--timings", timings,
                     "measure per-row runtimes (breaks byte reproducibility)");

  // transport
  auto* transport = app.add_subcommand(
      "transport", "Transport-approximation statistics from a JSON config");
  std::string transport_config;
  std::string transport_out;
  std::uint64_t transport_seed = 0;
  std::size_t transport_paths = 0;
  unsigned transport_threads = 1;
  transport->add_option("--config", transport_config, "experiment config JSON")
      ->required();
  transport->add_option("--out", transport_out, "also write rows to this CSV");
  transport->add_option("--seed", transport_seed, "override master seed");
  transport->add_option("--paths", transport_paths, "override number of paths");
  transport->add_option("--threads", transport_threads, "worker threads");

  // tabulate-gn
  auto* tabulate = app.add_subcommand(
      "tabulate-gn", "List the order-n multi-index family and its weights");
  int tab_n = 0;
  tabulate->add_option("--n", tab_n, "order n")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (check->parsed())
      return run_check(check_seed, check_grid, check_paths, tolerance_path,
                       check_threads);
    if (converge->parsed()) {
      stratint::ExperimentConfig cfg =
          stratint::load_experiment_config(converge_config);
      if (converge->count("--seed") > 0) cfg.master_seed = converge_seed;
      if (!converge_out.empty()) cfg.output = converge_out;
      if (converge_paths > 0) cfg.num_paths = converge_paths;
      if (converge_grid > 0) cfg.grid = converge_grid;
      return run_converge(cfg, converge_threads, timings);
    }
    if (transport->parsed()) {
      stratint::ExperimentConfig cfg =
          stratint::load_experiment_config(transport_config);
      if (transport->count("--seed") > 0) cfg.master_seed = transport_seed;
      if (transport_paths > 0) cfg.num_paths = transport_paths;
      return run_transport(cfg, transport_threads, transport_out);
    }
    if (tabulate->parsed()) return run_tabulate(tab_n);
  } catch (const stratint::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
