#include "sgne/sgne_core.hpp"

#include <algorithm>
#include <cmath>

namespace sgne {

Eigen::VectorXd Omega::stacked() const {
  const Eigen::Index n = p.size();
  Eigen::VectorXd w(3 * n);
  w.segment(0, n) = p;
  w.segment(n, n) = z;
  w.segment(2 * n, n) = mu;
  return w;
}

Omega Omega::from_stacked(const Eigen::VectorXd& w) {
  const Eigen::Index n = w.size() / 3;
  return {w.segment(0, n), w.segment(n, n), w.segment(2 * n, n)};
}

Omega Omega::zero(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
          Eigen::VectorXd::Zero(n)};
}

StepSizes default_step_sizes(const CommGraph& graph, double safety) {
  graph.require_connected();
  const int deg_max = graph.max_degree();
  StepSizes sizes;
  sizes.gamma = Eigen::VectorXd::Constant(graph.node_count(), 1.0 + safety);
  sizes.sigma_z = 1.0 / (2.0 * deg_max + safety);
  sizes.sigma_mu = 1.0 / (1.0 + 2.0 * deg_max + safety);
  sizes.eta = 0.3;
  const auto cert = theta_is_pd(theta_assemble(sizes, graph));
  if (!cert.positive_definite) {
    throw NotPositiveDefiniteError(
        "diagonal-dominance step sizes failed the PD certificate");
  }
  return sizes;
}

Eigen::MatrixXd theta_assemble(const StepSizes& sizes, const CommGraph& graph) {
  const int n = graph.node_count();
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  theta.block(0, 0, n, n) = sizes.gamma.asDiagonal();
  theta.block(n, n, n, n) =
      Eigen::MatrixXd::Identity(n, n) / sizes.sigma_z;
  theta.block(2 * n, 2 * n, n, n) =
      Eigen::MatrixXd::Identity(n, n) / sizes.sigma_mu;
  theta.block(0, 2 * n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  theta.block(2 * n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) L(i, i) = graph.degree(i);
  for (auto [u, v] : graph.edges()) {
    L(u, v) = -1.0;
    L(v, u) = -1.0;
  }
  theta.block(n, 2 * n, n, n) = -L;
  theta.block(2 * n, n, n, n) = -L;
  return theta;
}

PdCertificate theta_is_pd(const Eigen::MatrixXd& theta) {
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  if ((theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NonSymmetricError("PD certificate requires a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      theta, Eigen::EigenvaluesOnly);
  const double lambda_min = solver.eigenvalues().minCoeff();
  return {lambda_min > 0.0, lambda_min};
}

double theta_dot(const Eigen::MatrixXd& theta, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  return x.dot(theta * y);
}

double theta_norm_sq(const Eigen::MatrixXd& theta, const Eigen::VectorXd& x) {
  return theta_dot(theta, x, x);
}

double H_apply(int i, double p, const StepSizes& sizes,
               const EquivalentProblem& problem) {
  return tilde_h_grad(problem, i, p) + sizes.gamma[i] * p;
}

double H_inverse(int i, double y, const StepSizes& sizes,
                 const EquivalentProblem& problem) {
  const double slope = problem.c[i] + 1.0 / problem.k[i] + sizes.gamma[i];
  return (y - problem.d[i] + problem.D[i] / problem.k[i]) / slope;
}

Omega predict(const IterState& state, double eta) {
  return {state.cur.p + eta * (state.cur.p - state.prev.p),
          state.cur.z + eta * (state.cur.z - state.prev.z),
          state.cur.mu + eta * (state.cur.mu - state.prev.mu)};
}

double update_p(int i, double p_tilde, double mu_tilde, const StepSizes& sizes,
                const EquivalentProblem& problem) {
  const double p = H_inverse(i, sizes.gamma[i] * p_tilde - mu_tilde, sizes,
                             problem);
  return std::clamp(p, problem.p_min[i], problem.p_max[i]);
}

double update_z(double z_tilde, double mu_tilde_self,
                std::span<const double> mu_tilde_neighbors,
                const StepSizes& sizes) {
  double acc = 0.0;
  for (double mu_j : mu_tilde_neighbors) acc += mu_tilde_self - mu_j;
  return z_tilde - sizes.sigma_z * acc;
}

double update_mu(double mu_tilde, double p_next, double p_tilde, double demand,
                 double z_next_self, std::span<const double> z_next_neighbors,
                 double z_tilde_self, std::span<const double> z_tilde_neighbors,
                 const StepSizes& sizes) {
  if (z_next_neighbors.size() != z_tilde_neighbors.size()) {
    throw MissingNeighborMessageError(
        "mu-update needs both z payloads from every neighbor");
  }
  double lap_next = 0.0;
  for (double z_j : z_next_neighbors) lap_next += z_next_self - z_j;
  double lap_tilde = 0.0;
  for (double z_j : z_tilde_neighbors) lap_tilde += z_tilde_self - z_j;
  return mu_tilde + sizes.sigma_mu * (2.0 * p_next - p_tilde - demand +
                                      2.0 * lap_next - lap_tilde);
}

Eigen::VectorXd operator_U_single(const Omega& w,
                                  const EquivalentProblem& problem,
                                  const CommGraph& graph) {
  const int n = problem.n();
  for (int i = 0; i < n; ++i) {
    if (w.p[i] < problem.p_min[i] - 1e-12 ||
        w.p[i] > problem.p_max[i] + 1e-12) {
      throw OutsideBoxError("p outside the generation box at index " +
                            std::to_string(i));
    }
  }
  Eigen::VectorXd out(3 * n);
  for (int i = 0; i < n; ++i) {
    out[i] = w.mu[i] + tilde_h_grad(problem, i, w.p[i]);
  }
  out.segment(n, n) = graph.laplacian_apply(w.mu);
  out.segment(2 * n, n) = -w.p + problem.D - graph.laplacian_apply(w.z);
  return out;
}

std::vector<BoxSide> active_set(const Eigen::VectorXd& p,
                                const EquivalentProblem& problem) {
  std::vector<BoxSide> sides(problem.n(), BoxSide::Interior);
  for (int i = 0; i < problem.n(); ++i) {
    if (std::abs(p[i] - problem.p_min[i]) < 1e-12) {
      sides[i] = BoxSide::Lower;
    } else if (std::abs(p[i] - problem.p_max[i]) < 1e-12) {
      sides[i] = BoxSide::Upper;
    }
  }
  return sides;
}

Omega resolvent_apply(const Omega& w_tilde, const EquivalentProblem& problem,
                      const CommGraph& graph, const StepSizes& sizes) {
  const int n = problem.n();
  Omega next = Omega::zero(n);
  for (int i = 0; i < n; ++i) {
    next.p[i] = update_p(i, w_tilde.p[i], w_tilde.mu[i], sizes, problem);
  }
  next.z = w_tilde.z - sizes.sigma_z * graph.laplacian_apply(w_tilde.mu);
  next.mu = w_tilde.mu +
            sizes.sigma_mu * (2.0 * next.p - w_tilde.p - problem.D +
                              2.0 * graph.laplacian_apply(next.z) -
                              graph.laplacian_apply(w_tilde.z));
  return next;
}

double resolvent_inclusion_gap(const Omega& w_tilde, const Omega& w_plus,
                               const EquivalentProblem& problem,
                               const CommGraph& graph,
                               const StepSizes& sizes) {
  const int n = problem.n();
  // Theta (w_tilde - w_plus) row by row; p rows may differ from the
  // single-valued part only by a normal-cone element at active bounds.
  const Eigen::VectorXd lap_dmu =
      graph.laplacian_apply(w_tilde.mu - w_plus.mu);
  const Eigen::VectorXd lap_dz = graph.laplacian_apply(w_tilde.z - w_plus.z);
  const auto sides = active_set(w_plus.p, problem);
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lhs = sizes.gamma[i] * (w_tilde.p[i] - w_plus.p[i]) -
                       (w_tilde.mu[i] - w_plus.mu[i]);
    const double normal = lhs - (w_plus.mu[i] +
                                 tilde_h_grad(problem, i, w_plus.p[i]));
    double viol;
    switch (sides[i]) {
      case BoxSide::Lower:
        viol = std::max(0.0, normal);  // normal cone is (-inf, 0]
        break;
      case BoxSide::Upper:
        viol = std::max(0.0, -normal);
        break;
      default:
        viol = std::abs(normal);
    }
    gap = std::max(gap, viol);
  }
  for (int i = 0; i < n; ++i) {
    const double lhs =
        (w_tilde.z[i] - w_plus.z[i]) / sizes.sigma_z - lap_dmu[i];
    const double rhs = graph.laplacian_row_apply(i, w_plus.mu);
    gap = std::max(gap, std::abs(lhs - rhs));
  }
  for (int i = 0; i < n; ++i) {
    const double lhs = -(w_tilde.p[i] - w_plus.p[i]) - lap_dz[i] +
                       (w_tilde.mu[i] - w_plus.mu[i]) / sizes.sigma_mu;
    const double rhs = -w_plus.p[i] + problem.D[i] -
                       graph.laplacian_row_apply(i, w_plus.z);
    gap = std::max(gap, std::abs(lhs - rhs));
  }
  return gap;
}

}  // namespace sgne
