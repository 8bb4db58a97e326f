#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sgne/equivalent_problem.hpp"
#include "sgne/market_game.hpp"
#include "test_helpers.hpp"

using namespace sgne;
using sgne::testing::make_scenario;
using sgne::testing::two_prosumer_hand_case;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("market params validation") {
  CHECK_THROWS_AS(MarketParams::make(vec({-1.0})), InputError);
  CHECK_THROWS_AS(MarketParams::make(vec({-1.0, 0.5})), InputError);
  const auto m = MarketParams::make(vec({-1.0, -3.0}));
  CHECK(m.n == 2);
  CHECK(m.sum_a == -4.0);
  CHECK(m.a_bar == -2.0);
}

TEST_CASE("clearing price") {
  const auto m3 = MarketParams::make(vec({-1000.0, -1000.0, -1000.0}));
  CHECK(clearing_price(vec({100, 200, 300}), m3) == doctest::Approx(0.2));
  CHECK(clearing_price(vec({0, 0, 0}), m3) == 0.0);
  const auto m2 = MarketParams::make(vec({-1.0, -1.0}));
  CHECK(clearing_price(vec({7.5, 2.5}), m2) == doctest::Approx(5.0));
}

TEST_CASE("demand") {
  const auto m3 = MarketParams::make(vec({-1000.0, -1000.0, -1000.0}));
  CHECK(demand(0, vec({0, 0, 0}), m3) == 0.0);
  const auto m2 = MarketParams::make(vec({-1.0, -1.0}));
  CHECK(demand(0, vec({7.5, 2.5}), m2) == doctest::Approx(2.5));
  CHECK_THROWS_AS(demand(5, vec({0, 0, 0}), m3), InputError);
  // symmetric bids over symmetric elasticities give equal quantities
  const Eigen::VectorXd b = vec({4.0, 4.0, 4.0});
  CHECK(demand(0, b, m3) == demand(1, b, m3));
  CHECK(demand(1, b, m3) == demand(2, b, m3));
}

TEST_CASE("sharing coefficients") {
  const auto m3 = MarketParams::make(vec({-1.0, -1.0, -1.0}));
  for (int i = 0; i < 3; ++i) {
    const auto [alpha, beta, delta] = sharing_coefficients(i, m3);
    CHECK(alpha == doctest::Approx(2.0 / 9.0));
    CHECK(beta == doctest::Approx(1.0 / 9.0));
    CHECK(delta == doctest::Approx(-1.0 / 9.0));
  }
  // a=(-1,-3): 1'a = -4, (1'a)^2 = 16
  const auto m2 = MarketParams::make(vec({-1.0, -3.0}));
  const auto [alpha, beta, delta] = sharing_coefficients(0, m2);
  CHECK(alpha == doctest::Approx(3.0 / 16.0));
  CHECK(beta == doctest::Approx(2.0 / 16.0));
  CHECK(delta == doctest::Approx(-1.0 / 16.0));
}

TEST_CASE("sharing coefficient sign pattern on random markets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> neg(-5.0, -0.01);
  std::uniform_int_distribution<int> size(2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = neg(rng);
    const auto m = MarketParams::make(a);
    for (int i = 0; i < n; ++i) {
      const auto coeffs = sharing_coefficients(i, m);
      CHECK(coeffs.alpha > 0.0);
      CHECK(coeffs.delta < 0.0);
      // beta = alpha + delta identically; it is positive exactly when the
      // other prosumers' elasticities outweigh prosumer i's own
      CHECK(coeffs.beta ==
            doctest::Approx(coeffs.alpha + coeffs.delta).epsilon(1e-12));
      const double others = m.sum_a - a[i];
      CHECK((coeffs.beta > 0.0) == (-others > -a[i]));
    }
  }
}

TEST_CASE("eval_f") {
  auto scenario = two_prosumer_hand_case();
  SUBCASE("all-zero input") {
    const StrategyProfile profile{vec({0, 0}), vec({0, 0})};
    CHECK(eval_f(0, profile, scenario) == 0.0);
  }
  SUBCASE("hand arithmetic at the equilibrium strategies") {
    const StrategyProfile profile{vec({7.5, 2.5}), vec({7.5, 2.5})};
    // f_0 = 0.5 * 7.5^2 + q_0 * mu_c = 28.125 + 2.5 * 5
    CHECK(eval_f(0, profile, scenario) == doctest::Approx(40.625));
  }
}

TEST_CASE("trading cost forms agree on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> neg(-3.0, -0.1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a[i] = neg(rng);
      b[i] = u(rng);
    }
    const auto m = MarketParams::make(a);
    for (int i = 0; i < 4; ++i) {
      const double direct = trade_cost_direct(i, b, m);
      const double quad = trade_cost_quadratic(i, b, m);
      CHECK(direct ==
            doctest::Approx(quad).epsilon(1e-10).scale(
                std::max(1.0, std::abs(direct))));
    }
  }
}

TEST_CASE("pseudo-gradient") {
  SUBCASE("zero at the origin when d=0") {
    auto scenario = two_prosumer_hand_case();
    const StrategyProfile profile{vec({0, 0}), vec({0, 0})};
    CHECK(pseudo_gradient(profile, scenario).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("direct arithmetic in b") {
    auto scenario =
        make_scenario({-1, -1, -1}, {1, 1, 1}, {0, 0, 0}, {0, 0, 0}, -10, 10,
                      CommGraph::cycle(3));
    const StrategyProfile profile{vec({0, 0, 0}), vec({1, 1, 1})};
    const Eigen::VectorXd grad = pseudo_gradient(profile, scenario);
    CHECK(grad[1] == doctest::Approx(6.0 / 9.0));
  }
}

TEST_CASE("pseudo-gradient matches central finite differences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  auto scenario = make_scenario({-1.5, -0.7, -2.2}, {0.5, 1.0, 0.2},
                                {0.1, 0.0, 0.3}, {1.0, 2.0, 3.0}, -50, 50,
                                CommGraph::cycle(3));
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    StrategyProfile profile{vec({u(rng), u(rng), u(rng)}),
                            vec({u(rng), u(rng), u(rng)})};
    const Eigen::VectorXd grad = pseudo_gradient(profile, scenario);
    for (int i = 0; i < 3; ++i) {
      auto up = profile, dn = profile;
      up.p[i] += h;
      dn.p[i] -= h;
      const double fd_p =
          (eval_f(i, up, scenario) - eval_f(i, dn, scenario)) / (2 * h);
      up = profile;
      dn = profile;
      up.b[i] += h;
      dn.b[i] -= h;
      const double fd_b =
          (eval_f(i, up, scenario) - eval_f(i, dn, scenario)) / (2 * h);
      CHECK(grad[2 * i] == doctest::Approx(fd_p).epsilon(1e-5).scale(
                               std::max(1.0, std::abs(fd_p))));
      CHECK(grad[2 * i + 1] == doctest::Approx(fd_b).epsilon(1e-5).scale(
                                   std::max(1.0, std::abs(fd_b))));
    }
  }
}

TEST_CASE("trading cost is strictly convex in the own bid") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  auto scenario = make_scenario({-1.5, -0.7, -2.2}, {0.5, 1.0, 0.2},
                                {0.1, 0.0, 0.3}, {1.0, 2.0, 3.0}, -50, 50,
                                CommGraph::cycle(3));
  const double h = 0.25;
  for (int trial = 0; trial < 30; ++trial) {
    StrategyProfile profile{vec({0, 0, 0}),
                            vec({u(rng), u(rng), u(rng)})};
    for (int i = 0; i < 3; ++i) {
      const auto coeffs = sharing_coefficients(i, scenario.market);
      auto up = profile, dn = profile;
      up.b[i] += h;
      dn.b[i] -= h;
      const double second_diff = eval_f(i, up, scenario) -
                                 2.0 * eval_f(i, profile, scenario) +
                                 eval_f(i, dn, scenario);
      CHECK(second_diff >= 2.0 * coeffs.alpha * h * h - 1e-9);
    }
  }
}

TEST_CASE("market clears identically for the clearing price") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const auto m = MarketParams::make(vec({-0.4, -1.7, -2.9, -0.8}));
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd b(4);
    for (int i = 0; i < 4; ++i) b[i] = u(rng);
    double total = 0.0;
    for (int i = 0; i < 4; ++i) total += demand(i, b, m);
    CHECK(std::abs(total) <= 1e-10 * std::max(1.0, b.cwiseAbs().sum()));
  }
}

TEST_CASE("market clearing gap examples") {
  auto scenario = two_prosumer_hand_case();
  SUBCASE("equal bids") {
    const StrategyProfile profile{vec({0, 0}), vec({1, 1})};
    CHECK(market_clearing_gap(profile, scenario) <= 1e-12);
  }
  SUBCASE("uneven bids still clear") {
    const StrategyProfile profile{vec({0, 0}), vec({1, 0})};
    CHECK(market_clearing_gap(profile, scenario) <= 1e-12);
  }
  SUBCASE("b recovered from a balanced p clears") {
    const auto problem = build(scenario);
    const Eigen::VectorXd p = vec({4.0, 6.0});  // 1'p = 1'D
    const Eigen::VectorXd b = recover_b(p, 3.7, problem);
    const StrategyProfile profile{p, b};
    CHECK(market_clearing_gap(profile, scenario) <= 1e-10);
  }
}

TEST_CASE("vi residual") {
  auto scenario = two_prosumer_hand_case();
  const auto problem = build(scenario);
  const auto oracle = oracle_solve(problem);
  SUBCASE("zero at the oracle equilibrium") {
    const StrategyProfile profile{oracle.point.p, oracle.b_star};
    CHECK(vi_residual(profile, scenario) < 1e-8);
  }
  SUBCASE("positive away from equilibrium") {
    const StrategyProfile profile{vec({1.0, 2.0}), vec({3.0, -1.0})};
    CHECK(vi_residual(profile, scenario) > 1e-3);
  }
  SUBCASE("positive at a 0.1 perturbation of the equilibrium") {
    StrategyProfile profile{oracle.point.p, oracle.b_star};
    profile.p[0] += 0.1;
    CHECK(vi_residual(profile, scenario) > 1e-3);
  }
  SUBCASE("invariant under relabeling a symmetric instance") {
    auto symmetric =
        make_scenario({-1, -1, -1}, {1, 1, 1}, {0.5, 0.5, 0.5}, {2, 2, 2},
                      -10, 10, CommGraph::cycle(3));
    const StrategyProfile profile{vec({1.0, 2.0, 3.0}), vec({0.5, -1.0, 2.0})};
    const StrategyProfile rotated{vec({2.0, 3.0, 1.0}), vec({-1.0, 2.0, 0.5})};
    CHECK(vi_residual(profile, symmetric) ==
          doctest::Approx(vi_residual(rotated, symmetric)));
  }
}
