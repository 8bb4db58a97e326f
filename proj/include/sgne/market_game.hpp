#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sgne/comm_graph.hpp"
#include "sgne/errors.hpp"

namespace sgne {

/// Price side of the sharing market: one elasticity a_i < 0 per prosumer.
struct MarketParams {
  Eigen::VectorXd a;
  int n = 0;
  double sum_a = 0.0;  // 1'a
  double a_bar = 0.0;  // 1'a / n

  /// Validates a_i < 0 and n >= 2, caches the aggregates.
  static MarketParams make(const Eigen::VectorXd& a);
};

struct ProsumerParams {
  double c = 0.0;   // quadratic generation cost coefficient
  double d = 0.0;   // linear generation cost coefficient
  double D = 0.0;   // net power demand
  double p_min = 0.0;
  double p_max = 0.0;
};

struct ScenarioInstance {
  MarketParams market;
  std::vector<ProsumerParams> prosumers;
  CommGraph graph;

  int n() const { return market.n; }
  Eigen::VectorXd demand_vector() const;
  double total_demand() const;

  /// Checks size consistency and per-prosumer invariants (c >= 0,
  /// p_min <= p_max). Throws InputError.
  void validate() const;

  /// Strict capacity condition sum(p_min) < sum(D) < sum(p_max).
  bool satisfies_capacity_assumption() const;
};

/// Joint strategy (p, b) of all prosumers.
struct StrategyProfile {
  Eigen::VectorXd p;
  Eigen::VectorXd b;
};

struct SharingCoefficients {
  double alpha;  // > 0, own-bid quadratic weight
  double beta;   // > 0, cross-bid weight
  double delta;  // < 0, others-only quadratic weight
};

/// Market clearing price mu_c = -(1'b)/(1'a).
double clearing_price(const Eigen::VectorXd& b, const MarketParams& market);

/// q_i = a_i mu_c(b) + b_i.
double demand(int i, const Eigen::VectorXd& b, const MarketParams& market);

SharingCoefficients sharing_coefficients(int i, const MarketParams& market);

/// Trading cost q_i(b) * mu_c(b), evaluated directly.
double trade_cost_direct(int i, const Eigen::VectorXd& b,
                         const MarketParams& market);

/// Same quantity through the (alpha, beta, delta) quadratic expansion.
double trade_cost_quadratic(int i, const Eigen::VectorXd& b,
                            const MarketParams& market);

/// Full disutility f_i = h_i(p_i) + q_i mu_c. Cross-checks the direct and
/// quadratic trading-cost forms against each other.
double eval_f(int i, const StrategyProfile& profile,
              const ScenarioInstance& scenario);

/// Stacked per-prosumer own-strategy gradients, layout
/// (df_0/dp_0, df_0/db_0, df_1/dp_1, df_1/db_1, ...).
Eigen::VectorXd pseudo_gradient(const StrategyProfile& profile,
                                const ScenarioInstance& scenario);

/// Natural-map residual || x - P_X(x - F(x)) ||_2 of the equilibrium
/// variational inequality. Each prosumer's feasible set is its generation
/// box intersected with its balance line, others' bids held fixed.
double vi_residual(const StrategyProfile& profile,
                   const ScenarioInstance& scenario);

/// | sum_i q_i(b) |; zero identically for the clearing price above.
double market_clearing_gap(const StrategyProfile& profile,
                           const ScenarioInstance& scenario);

}  // namespace sgne
