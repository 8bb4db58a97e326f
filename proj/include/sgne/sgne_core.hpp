#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sgne/comm_graph.hpp"
#include "sgne/equivalent_problem.hpp"

namespace sgne {

/// Step sizes of the distributed iteration together with the inertia weight.
struct StepSizes {
  Eigen::VectorXd gamma;  // per-prosumer primal weight
  double sigma_z = 0.0;
  double sigma_mu = 0.0;
  double eta = 0.0;  // inertia, admissible range [0, 1/3)
};

/// Stacked iterate (p, z, mu) of all prosumers.
struct Omega {
  Eigen::VectorXd p, z, mu;

  Eigen::VectorXd stacked() const;
  static Omega from_stacked(const Eigen::VectorXd& w);
  static Omega zero(int n);
};

struct IterState {
  Omega cur;
  Omega prev;
  long t = 0;
};

struct PdCertificate {
  bool positive_definite = false;
  double lambda_min = 0.0;
};

/// Diagonal-dominance rule: gamma_i = 1 + safety,
/// sigma_z = 1/(2 deg_max + safety), sigma_mu = 1/(1 + 2 deg_max + safety),
/// eta = 0.3. The returned sizes are certified positive definite.
StepSizes default_step_sizes(const CommGraph& graph, double safety = 1.0);

/// Dense 3n x 3n preconditioner
///   [ diag(gamma)      0          -I   ]
///   [     0       sigma_z^-1 I   -L    ]
///   [    -I           -L     sigma_mu^-1 I ]
Eigen::MatrixXd theta_assemble(const StepSizes& sizes, const CommGraph& graph);

/// Certifies positive definiteness via the smallest eigenvalue of the
/// symmetric input; asymmetry beyond 1e-12 (relative) is rejected.
PdCertificate theta_is_pd(const Eigen::MatrixXd& theta);

double theta_dot(const Eigen::MatrixXd& theta, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y);
double theta_norm_sq(const Eigen::MatrixXd& theta, const Eigen::VectorXd& x);

/// H_i(p) = tilde_h_i'(p) + gamma_i p, an affine strictly increasing map.
double H_apply(int i, double p, const StepSizes& sizes,
               const EquivalentProblem& problem);
/// Exact closed-form inverse of H_i.
double H_inverse(int i, double y, const StepSizes& sizes,
                 const EquivalentProblem& problem);

/// Componentwise extrapolation x + eta (x - x_prev).
Omega predict(const IterState& state, double eta);

/// p-update: clamp(H_i^-1(gamma_i p_tilde - mu_tilde), p_min, p_max).
double update_p(int i, double p_tilde, double mu_tilde, const StepSizes& sizes,
                const EquivalentProblem& problem);

/// z-update: z_tilde - sigma_z sum_j (mu_tilde_self - mu_tilde_j) over the
/// neighborhood.
double update_z(double z_tilde, double mu_tilde_self,
                std::span<const double> mu_tilde_neighbors,
                const StepSizes& sizes);

/// mu-update: mu_tilde + sigma_mu (2 p_next - p_tilde - D_i
///   + 2 sum_j (z_next_self - z_next_j) - sum_j (z_tilde_self - z_tilde_j)).
double update_mu(double mu_tilde, double p_next, double p_tilde, double demand,
                 double z_next_self, std::span<const double> z_next_neighbors,
                 double z_tilde_self, std::span<const double> z_tilde_neighbors,
                 const StepSizes& sizes);

/// Single-valued part of the equilibrium operator,
///   (mu + grad tilde_h(p), L mu, -p + D - L z),
/// stacked like Omega. Throws OutsideBoxError when p leaves the box.
Eigen::VectorXd operator_U_single(const Omega& w, const EquivalentProblem& problem,
                                  const CommGraph& graph);

enum class BoxSide { Interior, Lower, Upper };

/// Active-set classification of p against the box, tie window 1e-12.
std::vector<BoxSide> active_set(const Eigen::VectorXd& p,
                                const EquivalentProblem& problem);

/// One resolvent evaluation w+ = (Id + Theta^-1 U)^-1 w_tilde, computed as
/// the sequential sweep p -> z -> mu of the update phase.
Omega resolvent_apply(const Omega& w_tilde, const EquivalentProblem& problem,
                      const CommGraph& graph, const StepSizes& sizes);

/// Max violation of the inclusion Theta (w_tilde - w_plus) in U(w_plus).
/// Components with an active bound only penalize the infeasible sign of the
/// normal-cone element.
double resolvent_inclusion_gap(const Omega& w_tilde, const Omega& w_plus,
                               const EquivalentProblem& problem,
                               const CommGraph& graph, const StepSizes& sizes);

}  // namespace sgne
