// Command-line front end: solve a scenario with the distributed iteration,
// run the centralized oracle, sweep the inertia weight, or run the
// cross-module property suite.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sgne/bench.hpp"
#include "sgne/equivalent_problem.hpp"
#include "sgne/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInfeasible = 3;

struct CommonArgs {
  std::string scenario_path;
  std::string builtin;
  std::string out_dir = ".";
  long max_iter = 200000;
  double tol = -1.0;  // overrides all three stop tolerances when set
  double eta = -1.0;
  unsigned long seed = 0;
  bool seed_set = false;
  bool audit = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  auto* scenario =
      cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file");
  auto* builtin = cmd->add_option("--builtin", args.builtin,
                                  "Built-in scenario: three_stage1, "
                                  "three_stage2, ieee123");
  scenario->excludes(builtin);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--max-iter", args.max_iter, "Iteration cap");
  cmd->add_option("--tol", args.tol, "Override all stop tolerances");
  cmd->add_option("--eta", args.eta, "Inertia weight in [0, 1/3)");
  cmd->add_option("--seed", args.seed, "Random seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--audit", args.audit, "Enable the locality audit");
}

sgne::ScenarioConfig load(const CommonArgs& args) {
  if (!args.builtin.empty()) {
    if (!sgne::is_builtin_scenario(args.builtin)) {
      throw sgne::InputError("unknown builtin scenario '" + args.builtin +
                             "'");
    }
    auto config = sgne::builtin_scenario(args.builtin);
    if (args.seed_set) config.seed = args.seed;
    return config;
  }
  if (args.scenario_path.empty()) {
    throw sgne::InputError("give --scenario PATH or --builtin NAME");
  }
  auto config = sgne::load_scenario_file(args.scenario_path);
  if (args.seed_set) config.seed = args.seed;
  return config;
}

void apply_overrides(sgne::ScenarioConfig& config, const CommonArgs& args) {
  if (args.eta >= 0.0) config.step_sizes.eta = args.eta;
  if (args.tol > 0.0) {
    config.tolerances.step = args.tol;
    config.tolerances.consensus = args.tol;
    config.tolerances.kkt = args.tol;
  }
}

int cmd_solve(const CommonArgs& args) {
  auto config = load(args);
  apply_overrides(config, args);
  sgne::RunOptions options;
  options.max_iters = args.max_iter;
  options.tol = config.tolerances;
  options.audit = args.audit;
  const auto report = sgne::run_sgne(config.instance, config.step_sizes,
                                     options);

  fs::create_directories(args.out_dir);
  sgne::write_report_json((fs::path(args.out_dir) / "report.json").string(),
                          report, "sgne");
  sgne::write_trace_csv((fs::path(args.out_dir) / "trace.csv").string(),
                        report.trace);

  std::cout << "iterations: " << report.iterations << "\n"
            << "mu_c: " << report.mu_c << "\n"
            << "p:";
  for (double v : report.p) std::cout << ' ' << v;
  std::cout << "\n";
  if (args.audit) {
    std::cout << "locality_audit: "
              << (sgne::locality_audit(report) ? "pass" : "FAIL") << "\n";
  }
  if (report.stop_reason != sgne::StopReason::Converged) {
    std::cerr << "not converged within " << args.max_iter << " iterations\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_oracle(const CommonArgs& args) {
  auto config = load(args);
  const auto problem = sgne::build(config.instance);
  const auto oracle = sgne::oracle_solve(problem);

  fs::create_directories(args.out_dir);
  sgne::SolveReport report;
  report.p = oracle.point.p;
  report.b = oracle.b_star;
  report.mu_c = oracle.point.mu_c;
  report.iterations = oracle.bisection_iters;
  report.stop_reason = sgne::StopReason::Converged;
  sgne::write_report_json((fs::path(args.out_dir) / "report.json").string(),
                          report, "oracle");

  std::cout << "mu_c: " << oracle.point.mu_c << "\n"
            << "kkt_residual: " << oracle.kkt_residual << "\n"
            << "bisection_iters: " << oracle.bisection_iters << "\n"
            << "p:";
  for (double v : oracle.point.p) std::cout << ' ' << v;
  std::cout << "\nb:";
  for (double v : oracle.b_star) std::cout << ' ' << v;
  std::cout << "\n";
  return kExitOk;
}

int cmd_eta_sweep(const CommonArgs& args, std::vector<double> etas) {
  auto config = load(args);
  if (etas.empty()) etas = {0.0, 0.1, 0.2, 0.33 - 1e-6};
  for (double eta : etas) {
    if (eta < 0.0 || eta >= 1.0 / 3.0) {
      throw sgne::InputError("eta values must lie in [0, 1/3)");
    }
  }
  const auto rows = sgne::eta_sweep(config, etas, args.max_iter);

  fs::create_directories(args.out_dir);
  const auto csv_path = fs::path(args.out_dir) / "eta_sweep.csv";
  std::ofstream csv(csv_path);
  csv << "eta,iterations_to_1pct,converged\n";
  std::cout << "eta,iterations_to_1pct,converged\n";
  bool any_nonconvergent = false;
  for (const auto& row : rows) {
    csv << row.eta << ',' << row.iterations << ',' << (row.converged ? 1 : 0)
        << "\n";
    std::cout << row.eta << ',' << row.iterations << ','
              << (row.converged ? 1 : 0) << "\n";
    if (!row.converged) any_nonconvergent = true;
  }
  return any_nonconvergent ? kExitNotConverged : kExitOk;
}

int cmd_verify(const CommonArgs& args) {
  auto config = load(args);
  apply_overrides(config, args);
  const auto results =
      sgne::verify_scenario(config, args.seed_set ? args.seed : config.seed);
  bool all_passed = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "pass" : "FAIL") << "  " << r.name << "  ("
              << r.detail << ")\n";
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed generalized Nash equilibrium seeking for "
               "prosumer energy sharing"};
  app.require_subcommand(1);

  CommonArgs solve_args, oracle_args, sweep_args, verify_args;
  std::vector<double> etas;

  auto* solve = app.add_subcommand("solve", "Run the distributed iteration");
  add_common(solve, solve_args);
  auto* oracle = app.add_subcommand("oracle", "Run the centralized oracle");
  add_common(oracle, oracle_args);
  auto* sweep = app.add_subcommand("eta-sweep",
                                   "Iterations-to-1%-error per inertia value");
  add_common(sweep, sweep_args);
  sweep->add_option("--eta-list", etas, "Inertia values to sweep");
  auto* verify = app.add_subcommand("verify", "Run the property suite");
  add_common(verify, verify_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (sweep->parsed()) return cmd_eta_sweep(sweep_args, etas);
    if (verify->parsed()) return cmd_verify(verify_args);
  } catch (const sgne::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sgne::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const sgne::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
