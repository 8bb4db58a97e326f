#pragma once

#include <string>
#include <vector>

#include "sgne/scenario_io.hpp"

namespace sgne {

struct EtaSweepRow {
  double eta = 0.0;
  long iterations = -1;  // first iteration with rel_err <= threshold
  bool converged = false;
};

/// Runs the distributed iteration once per eta value and reports how many
/// iterations it takes to bring ||p - p_oracle||_inf / max(1, ||p_oracle||_inf)
/// below rel_tol.
std::vector<EtaSweepRow> eta_sweep(const ScenarioConfig& config,
                                   const std::vector<double>& etas,
                                   long max_iters, double rel_tol = 0.01);

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Cross-module invariant suite for one scenario: step-size certificate,
/// operator monotonicity sampling, firm nonexpansiveness, oracle/VI
/// agreement, distributed-vs-oracle agreement, locality audit.
std::vector<PropertyResult> verify_scenario(const ScenarioConfig& config,
                                            unsigned long seed);

}  // namespace sgne
