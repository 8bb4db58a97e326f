#include "sgne/dist_runtime.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace sgne {

namespace {

double consensus_gap(const Eigen::VectorXd& mu) {
  return mu.maxCoeff() - mu.minCoeff();
}

// The operator convention puts +mu next to grad tilde_h, so the consensus
// multiplier settles at the negative of the KKT clearing price.
double consensus_price(const Eigen::VectorXd& mu) {
  return -mu.mean();
}

// Records directed cross-agent reads; everything delivered through the
// message rounds is neighbor-to-neighbor by construction, so violations can
// only come from reads that bypass the rounds.
struct ReadLedger {
  const CommGraph* graph = nullptr;
  long violations = 0;

  void record(int reader, int owner) {
    if (reader == owner) return;
    const auto& nbrs = graph->neighbors(reader);
    if (!std::binary_search(nbrs.begin(), nbrs.end(), owner)) {
      ++violations;
    }
  }
};

}  // namespace

StopDecision stop_criterion(const Omega& next, const Omega& cur,
                            const EquivalentProblem& problem,
                            const StopTolerances& tol) {
  const double step = (next.stacked() - cur.stacked()).cwiseAbs().maxCoeff();
  if (step > tol.step) return StopDecision::NotConverged;
  if (consensus_gap(next.mu) > tol.consensus) return StopDecision::NotConverged;
  KKTPoint point{next.p, consensus_price(next.mu), {}};
  if (kkt_residual(point, problem) > tol.kkt) return StopDecision::NotConverged;
  return StopDecision::Converged;
}

SolveReport run_sgne(const ScenarioInstance& scenario, const StepSizes& sizes,
                     const RunOptions& options) {
  scenario.validate();
  if (sizes.eta < 0.0 || sizes.eta >= 1.0 / 3.0) {
    throw InputError("inertia weight must lie in [0, 1/3)");
  }
  const auto cert = theta_is_pd(theta_assemble(sizes, scenario.graph));
  if (!cert.positive_definite) {
    throw NotPositiveDefiniteError("step-size matrix is not positive definite");
  }

  const EquivalentProblem problem = build(scenario);
  const CommGraph& graph = scenario.graph;
  const int n = scenario.n();

  ReadLedger ledger{&graph, 0};

  IterState state;
  state.cur = Omega::zero(n);
  for (int i = 0; i < n; ++i) {
    state.cur.p[i] =
        std::clamp(problem.D[i], problem.p_min[i], problem.p_max[i]);
  }
  state.prev = state.cur;

  SolveReport report;
  report.audited = options.audit;
  if (options.record_states) {
    report.state_history.push_back(state.cur.stacked());
  }
  report.trace.reserve(
      static_cast<size_t>(std::min<long>(options.max_iters, 1 << 20)));

  // Injected fault: agent 0 reads the prediction-phase mu of the
  // highest-numbered non-neighbor. Read and discarded; it only exists to
  // exercise the audit.
  int tapped_agent = -1;
  if (options.inject_violation) {
    for (int j = n - 1; j > 0; --j) {
      const auto& nbrs = graph.neighbors(0);
      if (!std::binary_search(nbrs.begin(), nbrs.end(), j)) {
        tapped_agent = j;
        break;
      }
    }
  }

  Omega next = Omega::zero(n);
  std::vector<double> inbox_mu, inbox_z_tilde, inbox_z_next;

  for (long t = 0; t < options.max_iters; ++t) {
    const Omega tilde = predict(state, sizes.eta);

    if (tapped_agent >= 0) {
      volatile double leaked = tilde.mu[tapped_agent];
      (void)leaked;
      if (options.audit) ledger.record(0, tapped_agent);
    }

    // Round 1: prediction-phase mu to every neighbor, then p and z updates.
    for (int i = 0; i < n; ++i) {
      const auto& nbrs = graph.neighbors(i);
      inbox_mu.clear();
      for (int j : nbrs) {
        inbox_mu.push_back(tilde.mu[j]);
        ++report.messages_sent;
        if (options.audit) ledger.record(i, j);
      }
      next.p[i] = update_p(i, tilde.p[i], tilde.mu[i], sizes, problem);
      next.z[i] = update_z(tilde.z[i], tilde.mu[i], inbox_mu, sizes);
    }

    // Round 2: (prediction z, updated z) pairs, then mu update.
    for (int i = 0; i < n; ++i) {
      const auto& nbrs = graph.neighbors(i);
      inbox_z_tilde.clear();
      inbox_z_next.clear();
      for (int j : nbrs) {
        inbox_z_tilde.push_back(tilde.z[j]);
        inbox_z_next.push_back(next.z[j]);
        ++report.messages_sent;
        if (options.audit) ledger.record(i, j);
      }
      next.mu[i] = update_mu(tilde.mu[i], next.p[i], tilde.p[i], problem.D[i],
                             next.z[i], inbox_z_next, tilde.z[i],
                             inbox_z_tilde, sizes);
    }

    if (options.check_inclusion_every > 0 &&
        (t + 1) % options.check_inclusion_every == 0) {
      const double gap =
          resolvent_inclusion_gap(tilde, next, problem, graph, sizes);
      if (gap > options.inclusion_tol) {
        throw Error("resolvent inclusion violated: gap " +
                    std::to_string(gap));
      }
    }

    TraceRow row;
    row.iter = t + 1;
    row.res_step = (next.stacked() - state.cur.stacked()).cwiseAbs().maxCoeff();
    row.consensus_gap = consensus_gap(next.mu);
    KKTPoint point{next.p, consensus_price(next.mu), {}};
    row.res_kkt = kkt_residual(point, problem);
    if (options.reference_p) {
      const Eigen::VectorXd& ref = *options.reference_p;
      row.rel_err = (next.p - ref).cwiseAbs().maxCoeff() /
                    std::max(1.0, ref.cwiseAbs().maxCoeff());
    }
    report.trace.push_back(row);

    state.prev = state.cur;
    state.cur = next;
    state.t = t + 1;
    if (options.record_states) {
      report.state_history.push_back(state.cur.stacked());
    }

    const bool hit_rel_target = options.stop_at_rel_err >= 0.0 &&
                                options.reference_p &&
                                row.rel_err <= options.stop_at_rel_err;
    const bool converged = row.res_step <= options.tol.step &&
                           row.consensus_gap <= options.tol.consensus &&
                           row.res_kkt <= options.tol.kkt;
    if (converged || hit_rel_target) {
      report.stop_reason = StopReason::Converged;
      report.iterations = t + 1;
      break;
    }
    report.iterations = t + 1;
  }

  report.p = state.cur.p;
  report.z = state.cur.z;
  report.mu = state.cur.mu;
  report.mu_c = consensus_price(state.cur.mu);
  report.b = recover_b(report.p, report.mu_c, problem);
  report.locality_violations = ledger.violations;
  return report;
}

bool locality_audit(const SolveReport& report) {
  return report.audited && report.locality_violations == 0;
}

ScenarioInstance random_instance(int n, unsigned long seed) {
  if (n < 2) throw InputError("random instance needs n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  for (int i = 1; i < n; ++i) {
    const int parent =
        std::uniform_int_distribution<int>(0, i - 1)(rng);
    edges.emplace_back(parent, i);
    seen.insert({parent, i});
  }
  const int extra = n / 4;
  for (int e = 0; e < extra; ++e) {
    int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert({u, v}).second) edges.emplace_back(u, v);
  }

  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = -(0.1 + 1.9 * u01(rng));

  ScenarioInstance scenario;
  scenario.market = MarketParams::make(a);
  scenario.graph = CommGraph::from_edges(n, std::move(edges));
  scenario.prosumers.resize(n);
  double total_D = 0.0;
  for (int i = 0; i < n; ++i) {
    auto& pr = scenario.prosumers[i];
    pr.c = 0.1 + 1.9 * u01(rng);
    pr.d = u01(rng);
    pr.D = 10.0 * u01(rng);
    total_D += pr.D;
  }
  if (total_D < 1.0) {
    scenario.prosumers[0].D += 1.0;
    total_D += 1.0;
  }
  // p_min = 0 and per-prosumer caps of at least 1.5x the average demand keep
  // the strict capacity condition with >= 20% slack.
  for (int i = 0; i < n; ++i) {
    auto& pr = scenario.prosumers[i];
    pr.p_min = 0.0;
    pr.p_max = (total_D / n) * (1.5 + 1.5 * u01(rng));
  }
  scenario.validate();
  return scenario;
}

}  // namespace sgne
