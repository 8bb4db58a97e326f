#include "sgne/equivalent_problem.hpp"

#include <algorithm>
#include <cmath>

namespace sgne {

EquivalentProblem build(const ScenarioInstance& scenario) {
  scenario.validate();
  const int n = scenario.n();
  EquivalentProblem prob;
  prob.c.resize(n);
  prob.d.resize(n);
  prob.k.resize(n);
  prob.D.resize(n);
  prob.p_min.resize(n);
  prob.p_max.resize(n);
  prob.a = scenario.market.a;
  prob.sum_a = scenario.market.sum_a;
  for (int i = 0; i < n; ++i) {
    const auto& pr = scenario.prosumers[i];
    prob.c[i] = pr.c;
    prob.d[i] = pr.d;
    prob.k[i] = scenario.market.a[i] - scenario.market.sum_a;  // > 0
    prob.D[i] = pr.D;
    prob.p_min[i] = pr.p_min;
    prob.p_max[i] = pr.p_max;
  }
  return prob;
}

double tilde_h(const EquivalentProblem& problem, int i, double p) {
  return 0.5 * problem.c[i] * p * p + problem.d[i] * p +
         p * p / (2.0 * problem.k[i]) - problem.D[i] * p / problem.k[i];
}

double tilde_h_grad(const EquivalentProblem& problem, int i, double p) {
  return problem.c[i] * p + problem.d[i] + p / problem.k[i] -
         problem.D[i] / problem.k[i];
}

double primal_from_price(const EquivalentProblem& problem, int i, double mu) {
  const double slope = problem.c[i] + 1.0 / problem.k[i];
  const double p = (mu + problem.D[i] / problem.k[i] - problem.d[i]) / slope;
  return std::clamp(p, problem.p_min[i], problem.p_max[i]);
}

namespace {

double balance_at(const EquivalentProblem& problem, double mu) {
  double total = 0.0;
  for (int i = 0; i < problem.n(); ++i) {
    total += primal_from_price(problem, i, mu);
  }
  return total - problem.total_demand();
}

}  // namespace

OracleReport oracle_solve(const EquivalentProblem& problem, double tol,
                          std::optional<std::pair<double, double>> bracket_hint) {
  const double total_D = problem.total_demand();
  if (total_D < problem.p_min.sum() || total_D > problem.p_max.sum()) {
    throw InfeasibleError("total demand outside aggregate generation bounds");
  }

  // Initial bracket from the marginal prices at the box corners, doubled
  // outward until the balance changes sign.
  double lo = tilde_h_grad(problem, 0, problem.p_min[0]);
  double hi = tilde_h_grad(problem, 0, problem.p_max[0]);
  for (int i = 1; i < problem.n(); ++i) {
    lo = std::min(lo, tilde_h_grad(problem, i, problem.p_min[i]));
    hi = std::max(hi, tilde_h_grad(problem, i, problem.p_max[i]));
  }
  if (bracket_hint) {
    lo = bracket_hint->first;
    hi = bracket_hint->second;
  }
  const double stop = tol * std::max(1.0, std::abs(total_D));
  int doublings = 0;
  while (balance_at(problem, lo) > stop) {
    const double width = std::max(1.0, hi - lo);
    lo -= width;
    if (++doublings > 200) {
      throw NoBracketError("cannot bracket the clearing price from below");
    }
  }
  doublings = 0;
  while (balance_at(problem, hi) < -stop) {
    const double width = std::max(1.0, hi - lo);
    hi += width;
    if (++doublings > 200) {
      throw NoBracketError("cannot bracket the clearing price from above");
    }
  }

  double mu = 0.5 * (lo + hi);
  int iters = 0;
  for (; iters < 200; ++iters) {
    mu = 0.5 * (lo + hi);
    const double gap = balance_at(problem, mu);
    if (std::abs(gap) <= stop) break;
    if (gap < 0.0) {
      lo = mu;  // aggregate response nondecreasing in mu
    } else {
      hi = mu;
    }
  }

  OracleReport report;
  report.point.p.resize(problem.n());
  for (int i = 0; i < problem.n(); ++i) {
    report.point.p[i] = primal_from_price(problem, i, mu);
  }
  report.point.mu_c = mu;
  report.point.lambda = recover_lambda(report.point.p, mu, problem);
  report.b_star = recover_b(report.point.p, mu, problem);
  report.kkt_residual = kkt_residual(report.point, problem);
  report.bisection_iters = iters;
  return report;
}

Eigen::VectorXd recover_b(const Eigen::VectorXd& p, double mu_c,
                          const EquivalentProblem& problem) {
  return problem.D - p - problem.a * mu_c;
}

Eigen::VectorXd recover_b(const Eigen::VectorXd& p, double mu_c,
                          const ScenarioInstance& scenario) {
  return scenario.demand_vector() - p - scenario.market.a * mu_c;
}

Eigen::VectorXd recover_lambda(const Eigen::VectorXd& p, double mu_c,
                               const EquivalentProblem& problem) {
  Eigen::VectorXd lambda(problem.n());
  for (int i = 0; i < problem.n(); ++i) {
    lambda[i] = -mu_c + p[i] / problem.k[i] - problem.D[i] / problem.k[i];
  }
  return lambda;
}

double kkt_residual(const KKTPoint& point, const EquivalentProblem& problem) {
  double res = std::abs(point.p.sum() - problem.total_demand());
  for (int i = 0; i < problem.n(); ++i) {
    const double g = tilde_h_grad(problem, i, point.p[i]) - point.mu_c;
    const bool at_lo = point.p[i] <= problem.p_min[i] + 1e-12;
    const bool at_hi = point.p[i] >= problem.p_max[i] - 1e-12;
    double stat;
    if (at_lo && at_hi) {
      stat = 0.0;  // degenerate box, any multiplier works
    } else if (at_lo) {
      stat = std::max(0.0, -g);
    } else if (at_hi) {
      stat = std::max(0.0, g);
    } else {
      stat = std::abs(g);
    }
    res = std::max(res, stat);
  }
  return res;
}

}  // namespace sgne
