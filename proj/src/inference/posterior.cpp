#include "ceurl/inference/posterior.hpp"

namespace ceurl {
namespace {

ExactPosterior renormalize(Eigen::VectorXd log_weights, const char* what) {
  if (is_impossible(log_sum_exp(log_weights)))
    throw ImpossibleEvidence(std::string("no embodiment can produce the observed ") + what);
  return ExactPosterior{log_normalize(log_weights)};
}

}  // namespace

ExactPosterior ExactPosterior::from_prior(const EmbodimentSet& set) {
  Eigen::VectorXd lw(set.size());
  for (int e = 0; e < set.size(); ++e) lw(e) = safe_log(set.prior(e));
  return ExactPosterior{lw};
}

ExactPosterior posterior_update(const ExactPosterior& post, const EmbodimentSet& set, const Transition& tr) {
  if (tr.state < 0 || tr.state >= set.num_states() || tr.next_state < 0 || tr.next_state >= set.num_states() ||
      tr.action < 0 || tr.action >= set.unified_num_actions)
    throw std::out_of_range("posterior_update: transition index out of range");
  Eigen::VectorXd lw = post.log_weights;
  for (int e = 0; e < set.size(); ++e)
    lw(e) += safe_log(set.embodiments[static_cast<std::size_t>(e)].prob(tr.state, tr.action, tr.next_state));
  return renormalize(std::move(lw), "transition");
}

ExactPosterior observe_initial_state(const ExactPosterior& post, const EmbodimentSet& set, int state) {
  Eigen::VectorXd lw = post.log_weights;
  for (int e = 0; e < set.size(); ++e) lw(e) += safe_log(set.embodiments[static_cast<std::size_t>(e)].initial_dist(state));
  return renormalize(std::move(lw), "initial state");
}

std::vector<ExactPosterior> prefix_posteriors(const EmbodimentSet& set, const Trajectory& traj) {
  traj.validate(set.num_states(), set.unified_num_actions);
  std::vector<ExactPosterior> out;
  out.reserve(traj.states.size());
  out.push_back(observe_initial_state(ExactPosterior::from_prior(set), set, traj.states.front()));
  for (int t = 0; t < traj.length(); ++t) {
    const auto k = static_cast<std::size_t>(t);
    out.push_back(posterior_update(out.back(), set, {traj.states[k], traj.actions[k], traj.states[k + 1]}));
  }
  return out;
}

ExactPosterior exact_posterior_of_trajectory(const EmbodimentSet& set, const Trajectory& traj) {
  return prefix_posteriors(set, traj).back();
}

ExactPosterior batch_posterior_of_trajectory(const EmbodimentSet& set, const TabularPolicy& policy,
                                             const Trajectory& traj) {
  Eigen::VectorXd lw(set.size());
  for (int e = 0; e < set.size(); ++e)
    lw(e) = safe_log(set.prior(e)) + trajectory_logprob(set.embodiments[static_cast<std::size_t>(e)], policy, traj);
  return renormalize(std::move(lw), "trajectory");
}

}  // namespace ceurl
