#pragma once

#include "ceurl/core/mdp.hpp"

#include <stdexcept>
#include <vector>

namespace ceurl {

/// Every embodiment assigns probability zero to the observed evidence.
class ImpossibleEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transition {
  int state = 0;
  int action = 0;  // unified
  int next_state = 0;
};

/// Exact Bayes posterior over the embodiments of a set, kept in log space and
/// normalized after every update.
struct ExactPosterior {
  Eigen::VectorXd log_weights;

  static ExactPosterior from_prior(const EmbodimentSet& set);
  Eigen::VectorXd weights() const { return exp_of(log_weights); }
};

/// Condition on one transition: log w_e += log P_e(s'|s, phi_e(a)).
///
/// The policy factor pi(a|s) is shared by all embodiments and cancels in the
/// normalization, so it never enters.
ExactPosterior posterior_update(const ExactPosterior& post, const EmbodimentSet& set, const Transition& transition);

/// Condition on the initial state through each embodiment's mu0.
ExactPosterior observe_initial_state(const ExactPosterior& post, const EmbodimentSet& set, int state);

/// Incremental fold: prior, then s0, then every transition of `traj`.
ExactPosterior exact_posterior_of_trajectory(const EmbodimentSet& set, const Trajectory& traj);

/// Batch route: softmax over e of log p(e) + log p_e(traj | policy).
ExactPosterior batch_posterior_of_trajectory(const EmbodimentSet& set, const TabularPolicy& policy,
                                             const Trajectory& traj);

/// Posteriors after s0 and after each transition; element t conditions on
/// s_0 .. s_t.
std::vector<ExactPosterior> prefix_posteriors(const EmbodimentSet& set, const Trajectory& traj);

}  // namespace ceurl
