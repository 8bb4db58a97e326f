#include "sgne/market_game.hpp"

#include <cmath>

namespace sgne {

MarketParams MarketParams::make(const Eigen::VectorXd& a) {
  if (a.size() < 2) {
    throw InputError("market needs at least two prosumers");
  }
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(a[i] < 0.0)) {
      throw InputError("price elasticity a[" + std::to_string(i) +
                       "] must be negative");
    }
  }
  MarketParams m;
  m.a = a;
  m.n = static_cast<int>(a.size());
  m.sum_a = a.sum();
  m.a_bar = m.sum_a / m.n;
  return m;
}

Eigen::VectorXd ScenarioInstance::demand_vector() const {
  Eigen::VectorXd D(prosumers.size());
  for (size_t i = 0; i < prosumers.size(); ++i) D[i] = prosumers[i].D;
  return D;
}

double ScenarioInstance::total_demand() const {
  return demand_vector().sum();
}

void ScenarioInstance::validate() const {
  if (static_cast<int>(prosumers.size()) != market.n ||
      graph.node_count() != market.n) {
    throw InputError("prosumer count, market size and graph size disagree");
  }
  for (size_t i = 0; i < prosumers.size(); ++i) {
    const auto& pr = prosumers[i];
    if (pr.c < 0.0) {
      throw InputError("cost coefficient c[" + std::to_string(i) +
                       "] must be nonnegative");
    }
    if (pr.p_min > pr.p_max) {
      throw InputError("empty generation box for prosumer " +
                       std::to_string(i));
    }
  }
  graph.require_connected();
}

bool ScenarioInstance::satisfies_capacity_assumption() const {
  double lo = 0.0, hi = 0.0, dem = 0.0;
  for (const auto& pr : prosumers) {
    lo += pr.p_min;
    hi += pr.p_max;
    dem += pr.D;
  }
  return lo < dem && dem < hi;
}

double clearing_price(const Eigen::VectorXd& b, const MarketParams& market) {
  return -b.sum() / market.sum_a;
}

double demand(int i, const Eigen::VectorXd& b, const MarketParams& market) {
  if (i < 0 || i >= market.n) {
    throw InputError("prosumer index out of range");
  }
  return market.a[i] * clearing_price(b, market) + b[i];
}

SharingCoefficients sharing_coefficients(int i, const MarketParams& market) {
  const double denom = market.sum_a * market.sum_a;  // (N a_bar)^2
  return {(market.a[i] - market.sum_a) / denom,
          (2.0 * market.a[i] - market.sum_a) / denom, market.a[i] / denom};
}

double trade_cost_direct(int i, const Eigen::VectorXd& b,
                         const MarketParams& market) {
  const double mu = clearing_price(b, market);
  return (market.a[i] * mu + b[i]) * mu;
}

double trade_cost_quadratic(int i, const Eigen::VectorXd& b,
                            const MarketParams& market) {
  const auto [alpha, beta, delta] = sharing_coefficients(i, market);
  const double others = b.sum() - b[i];
  return alpha * b[i] * b[i] + beta * b[i] * others + delta * others * others;
}

double eval_f(int i, const StrategyProfile& profile,
              const ScenarioInstance& scenario) {
  const auto& pr = scenario.prosumers.at(i);
  const double g_direct = trade_cost_direct(i, profile.b, scenario.market);
  const double g_quad = trade_cost_quadratic(i, profile.b, scenario.market);
  const double scale = std::max({1.0, std::abs(g_direct), std::abs(g_quad)});
  if (std::abs(g_direct - g_quad) > 1e-10 * scale) {
    throw Error("trading-cost forms disagree beyond tolerance");
  }
  const double p = profile.p[i];
  return 0.5 * pr.c * p * p + pr.d * p + g_quad;
}

Eigen::VectorXd pseudo_gradient(const StrategyProfile& profile,
                                const ScenarioInstance& scenario) {
  const int n = scenario.n();
  const double b_sum = profile.b.sum();
  Eigen::VectorXd grad(2 * n);
  for (int i = 0; i < n; ++i) {
    const auto& pr = scenario.prosumers[i];
    const auto [alpha, beta, delta] = sharing_coefficients(i, scenario.market);
    const double others = b_sum - profile.b[i];
    grad[2 * i] = pr.c * profile.p[i] + pr.d;
    grad[2 * i + 1] = 2.0 * alpha * profile.b[i] + beta * others;
  }
  return grad;
}

namespace {

// Projects (up, ub) onto { p + w b = r, p in [lo, hi] }: unconstrained line
// projection, then clamped re-solve along the line parameterized by p.
void project_balance_line(double up, double ub, double w, double r, double lo,
                          double hi, double& out_p, double& out_b) {
  const double t = (up + w * ub - r) / (1.0 + w * w);
  double p = up - t;
  if (p < lo) p = lo;
  if (p > hi) p = hi;
  out_p = p;
  out_b = (r - p) / w;
}

}  // namespace

double vi_residual(const StrategyProfile& profile,
                   const ScenarioInstance& scenario) {
  const int n = scenario.n();
  const Eigen::VectorXd grad = pseudo_gradient(profile, scenario);
  const double sum_a = scenario.market.sum_a;
  const double b_sum = profile.b.sum();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& pr = scenario.prosumers[i];
    const double w = (sum_a - scenario.market.a[i]) / sum_a;
    if (w == 0.0) {
      throw InfeasibleError("degenerate balance line for prosumer " +
                            std::to_string(i));
    }
    const double others = b_sum - profile.b[i];
    const double r = pr.D + scenario.market.a[i] / sum_a * others;
    double pp, pb;
    project_balance_line(profile.p[i] - grad[2 * i],
                         profile.b[i] - grad[2 * i + 1], w, r, pr.p_min,
                         pr.p_max, pp, pb);
    const double dp = profile.p[i] - pp;
    const double db = profile.b[i] - pb;
    acc += dp * dp + db * db;
  }
  return std::sqrt(acc);
}

double market_clearing_gap(const StrategyProfile& profile,
                           const ScenarioInstance& scenario) {
  double total = 0.0;
  for (int i = 0; i < scenario.n(); ++i) {
    total += demand(i, profile.b, scenario.market);
  }
  return std::abs(total);
}

}  // namespace sgne
