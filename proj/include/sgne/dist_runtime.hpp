#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sgne/sgne_core.hpp"

namespace sgne {

struct StopTolerances {
  double step = 1e-8;       // ||w_{t+1} - w_t||_inf
  double consensus = 1e-6;  // max_i mu_i - min_i mu_i
  double kkt = 1e-6;        // centralized KKT residual at (p, mu_c)
};

enum class StopReason { Converged, MaxIterationsExceeded };

struct TraceRow {
  long iter = 0;
  double res_step = 0.0;
  double res_kkt = 0.0;
  double consensus_gap = 0.0;
  double rel_err = -1.0;  // -1 when no reference supplied
};

struct RunOptions {
  long max_iters = 200000;
  StopTolerances tol;
  bool audit = false;
  /// Keep the full iterate history (small cases only; used by the
  /// trajectory-inequality tests).
  bool record_states = false;
  /// When set, every trace row carries ||p - ref||_inf / max(1, ||ref||_inf).
  std::optional<Eigen::VectorXd> reference_p;
  /// Stop as soon as rel_err <= this value (needs reference_p); disabled
  /// when negative.
  double stop_at_rel_err = -1.0;
  /// Verify the resolvent inclusion every N iterations (0 = never).
  long check_inclusion_every = 0;
  double inclusion_tol = 1e-8;
  /// Test hook: agent 0 reads the prediction-phase mu of a non-neighbor,
  /// which the locality audit must flag.
  bool inject_violation = false;
};

struct SolveReport {
  Eigen::VectorXd p, b, z, mu;
  double mu_c = 0.0;  // consensus clearing price
  long iterations = 0;
  StopReason stop_reason = StopReason::MaxIterationsExceeded;
  std::vector<TraceRow> trace;
  long messages_sent = 0;
  bool audited = false;
  long locality_violations = 0;
  std::vector<Eigen::VectorXd> state_history;  // stacked (p,z,mu) per iter
};

/// Runs the two-phase iteration as synchronous message rounds over the
/// communication graph: predict, exchange prediction-phase mu, update p and
/// z, exchange (prediction z, updated z), update mu. All cross-agent values
/// travel through the message layer; each agent otherwise touches only its
/// own state, its own parameters, the step sizes, and the broadcast 1'a.
SolveReport run_sgne(const ScenarioInstance& scenario, const StepSizes& sizes,
                     const RunOptions& options = {});

/// True iff no cross-agent read bypassed the neighbor message layer.
bool locality_audit(const SolveReport& report);

enum class StopDecision { Converged, NotConverged };

StopDecision stop_criterion(const Omega& next, const Omega& cur,
                            const EquivalentProblem& problem,
                            const StopTolerances& tol);

/// Seeded generator of random connected instances: tree plus extra edges,
/// a_i in [-2,-0.1], c_i in [0.1,2], d_i in [0,1], D_i in [0,10], bounds
/// sized to satisfy the strict capacity assumption with 20% slack.
ScenarioInstance random_instance(int n, unsigned long seed);

}  // namespace sgne
