#pragma once

#include "ceurl/core/mdp.hpp"

#include <optional>
#include <vector>

namespace ceurl {

/// Every trajectory of a short horizon with its law under each embodiment and
/// under the average embodiment MDP.
///
/// Trajectories are indexed in for_each_trajectory order: the mixed-radix
/// number with digits s0 a0 s1 ... s_L, last digit fastest.
struct FiniteTrajectorySpace {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;
  std::vector<int> embodiment_ids;
  Eigen::VectorXd prior;
  /// log p_e(tau), one row per embodiment.
  Eigen::MatrixXd log_prob;
  Eigen::MatrixXd prob;
  /// p_bar(tau) = sum_e p(e) p_e(tau)
  Eigen::VectorXd mixture;
  Eigen::VectorXd log_mixture;

  Eigen::Index size() const { return mixture.size(); }
  int num_embodiments() const { return static_cast<int>(embodiment_ids.size()); }
  int position_of(int embodiment_id) const;

  Trajectory trajectory(Eigen::Index index) const;
  Eigen::Index index_of(const Trajectory& traj) const;
};

/// Exact enumeration of the horizon-L space (L transitions).
FiniteTrajectorySpace enumerate_space(const EmbodimentSet& set, const TabularPolicy& policy, int horizon,
                                      std::optional<int> skill = std::nullopt);

/// Build a space from explicit per-embodiment laws (rows of `prob`).
FiniteTrajectorySpace space_from_distributions(const Eigen::MatrixXd& prob, const Eigen::VectorXd& prior);

struct InnerMaximum {
  double value = 0.0;
  Eigen::VectorXd p_star;
};

/// max_p E_p[R] - E_{p_e}[R] - beta KL(p || p_bar) in closed form: the
/// Boltzmann tilt of p_bar by R / beta. `embodiment` is a position in the space.
InnerMaximum inner_max_closed_form(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta,
                                   int embodiment);

/// The same objective evaluated at an arbitrary law p.
double inner_objective(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta, int embodiment,
                       const Eigen::VectorXd& p);

struct SimplexMaximum {
  double value = 0.0;
  Eigen::VectorXd p;
  int iterations = 0;
  bool converged = false;
};

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Maximize the inner objective directly over the simplex restricted to the
/// support of p_bar, by projected gradient in the metric of the objective's
/// diagonal Hessian with Armijo backtracking. Convergence is declared when
/// max_i p_i |grad_i - E_p[grad]| <= tol, or when rounding stops progress
/// with a Newton decrement below 1e-12 relative. A reward of -inf rules its
/// trajectory out of the search.
SimplexMaximum inner_max_projected_gradient(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward,
                                            double beta, int embodiment, double tol = 1e-12,
                                            int max_iterations = 20000);

}  // namespace ceurl
