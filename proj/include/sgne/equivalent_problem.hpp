#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "sgne/market_game.hpp"

namespace sgne {

/// Centralized convex resource-allocation problem equivalent to the game:
///   min sum_i  h_i(p_i) + p_i^2/(2 k_i) - D_i p_i / k_i
///   s.t. sum p = sum D,  p_min <= p <= p_max
/// with k_i = a_i - 1'a > 0, so each augmented cost is strongly convex.
struct EquivalentProblem {
  Eigen::VectorXd c, d, k, D, p_min, p_max;
  Eigen::VectorXd a;  // kept for b-recovery
  double sum_a = 0.0;

  int n() const { return static_cast<int>(c.size()); }
  double total_demand() const { return D.sum(); }
};

EquivalentProblem build(const ScenarioInstance& scenario);

double tilde_h(const EquivalentProblem& problem, int i, double p);

/// c_i p + d_i + p/k_i - D_i/k_i.
double tilde_h_grad(const EquivalentProblem& problem, int i, double p);

/// Box-clamped minimizer of tilde_h_i(p) - mu p; nondecreasing in mu.
double primal_from_price(const EquivalentProblem& problem, int i, double mu);

struct KKTPoint {
  Eigen::VectorXd p;
  double mu_c = 0.0;         // multiplier of the balance constraint
  Eigen::VectorXd lambda;    // per-prosumer balance-line multipliers
};

struct OracleReport {
  KKTPoint point;
  Eigen::VectorXd b_star;
  double kkt_residual = 0.0;
  int bisection_iters = 0;
};

/// Independent dual-bisection solver. Bisects the scalar price mu until the
/// balance residual |sum p(mu) - sum D| <= tol * max(1, |sum D|). Throws
/// InfeasibleError when sum D lies outside [sum p_min, sum p_max] and
/// NoBracketError when no sign change can be bracketed. The optional hint
/// seeds the initial bracket (it is still expanded until valid).
OracleReport oracle_solve(const EquivalentProblem& problem, double tol = 1e-10,
                          std::optional<std::pair<double, double>> bracket_hint =
                              std::nullopt);

/// b_i = D_i - p_i - a_i mu_c.
Eigen::VectorXd recover_b(const Eigen::VectorXd& p, double mu_c,
                          const EquivalentProblem& problem);
Eigen::VectorXd recover_b(const Eigen::VectorXd& p, double mu_c,
                          const ScenarioInstance& scenario);

/// lambda_i = -mu_c + p_i/k_i - D_i/k_i.
Eigen::VectorXd recover_lambda(const Eigen::VectorXd& p, double mu_c,
                               const EquivalentProblem& problem);

/// max of the projected stationarity residual (normal-cone aware at active
/// bounds) and the balance residual |sum p - sum D|.
double kkt_residual(const KKTPoint& point, const EquivalentProblem& problem);

}  // namespace sgne
