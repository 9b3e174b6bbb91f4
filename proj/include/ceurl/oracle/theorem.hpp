#pragma once

#include "ceurl/oracle/trajectory_space.hpp"

#include <cstdint>
#include <vector>

namespace ceurl {

/// g(R) = beta log sum p_bar e^{R / beta} - E_{p_e}[R], the value of the inner
/// maximization as a function of the trajectory reward.
double g_value(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta, int embodiment);
/// dg/dR = p*_R - p_e
Eigen::VectorXd g_gradient(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta,
                           int embodiment);

/// KL(p_e || p_bar) for the embodiment at `embodiment`.
double kl_to_mixture(const FiniteTrajectorySpace& space, int embodiment);

struct RewardMinimum {
  Eigen::VectorXd reward;
  double value = 0.0;
  /// |p*_R - p_e|_inf at the returned reward.
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimize g over trajectory rewards, starting from R = 0.
///
/// Rewards of trajectories outside the support of p_e are set to -infinity,
/// where the infimum lies; the remaining entries descend in u = R / beta along
/// -(p*_u - p_e) / p*_u with Armijo backtracking.
RewardMinimum minimize_g(const FiniteTrajectorySpace& space, double beta, int embodiment, int max_iterations = 5000,
                         double tol = 1e-10);

struct EmbodimentOracleResult {
  int embodiment_id = 0;
  double kl = 0.0;
  /// -beta KL(p_e || p_bar)
  double closed_form_value = 0.0;
  /// min over R of g (the inner maximum), from the numeric minimizer
  double numeric_minimax_value = 0.0;
  double gap = 0.0;
  /// |p*_{R} - p_e|_inf at the argmin (zero at the exact stationary point)
  double stationarity = 0.0;
  bool converged = false;
  Eigen::VectorXd argmin_reward;
  /// the tilted distribution p* at the argmin reward
  Eigen::VectorXd argmax_distribution;
};

struct OracleReport {
  double beta = 1.0;
  double tolerance = 1e-4;
  std::vector<EmbodimentOracleResult> embodiments;

  double max_gap() const;
  bool passed() const;
};

OracleReport verify_theorem_1(const FiniteTrajectorySpace& space, double beta, double tol = 1e-4);
OracleReport verify_theorem_1(const EmbodimentSet& set, const TabularPolicy& policy, int horizon, double beta,
                              double tol = 1e-4);

/// A random small CE-MDP with a random state-only policy.
struct RandomInstance {
  EmbodimentSet set;
  TabularPolicy policy;
};

/// Sizes are drawn uniformly in [1, max]; about a third of the transition
/// entries are zeroed so that embodiments rule trajectories out. With
/// `num_skills` > 1 the policy is skill-conditioned.
RandomInstance random_ce_mdp(Rng& rng, int max_states, int max_actions, int max_embodiments, int num_skills = 1);

struct TheoremBatchReport {
  std::vector<double> betas;
  int instances = 0;
  std::vector<OracleReport> reports;  // instance-major, beta-minor
  double max_gap = 0.0;
  /// closed_form(beta) / beta agrees across the sweep for every instance
  bool linear_in_beta = true;
  bool passed() const;
};

TheoremBatchReport verify_theorem_1_batch(int instances, int horizon, const std::vector<double>& betas,
                                          std::uint64_t seed, int threads = 1, double tol = 1e-4);

}  // namespace ceurl
