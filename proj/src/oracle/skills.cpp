#include "ceurl/oracle/skills.hpp"

#include "ceurl/core/parallel.hpp"
#include "ceurl/inference/posterior.hpp"
#include "ceurl/rewards/intrinsic.hpp"

#include <algorithm>
#include <cmath>

namespace ceurl {

double MiIdentityReport::max_discrepancy() const {
  return std::max({std::abs(kl_form - posterior_form), std::abs(kl_form - entropy_form),
                   std::abs(posterior_form - entropy_form)});
}

MiIdentityReport verify_mi_identity(const EmbodimentSet& set, const TabularPolicy& policy, int horizon) {
  const FiniteTrajectorySpace space = enumerate_space(set, policy, horizon);
  MiIdentityReport out;
  for (int e = 0; e < space.num_embodiments(); ++e)
    if (space.prior(e) > 0.0) out.kl_form += space.prior(e) * kl_to_mixture(space, e);

  double h_tau = 0.0, h_tau_given_e = 0.0;
  for (Eigen::Index t = 0; t < space.size(); ++t) {
    if (space.mixture(t) > 0.0) h_tau -= space.mixture(t) * space.log_mixture(t);
    bool traj_built = false;
    Trajectory traj;
    for (int e = 0; e < space.num_embodiments(); ++e) {
      const double pe = space.prob(e, t);
      if (pe <= 0.0 || space.prior(e) <= 0.0) continue;
      h_tau_given_e -= space.prior(e) * pe * space.log_prob(e, t);
      if (!traj_built) {
        traj = space.trajectory(t);
        traj_built = true;
      }
      const ExactPosterior post = exact_posterior_of_trajectory(set, traj);
      out.posterior_form += space.prior(e) * pe * (post.log_weights(e) - std::log(space.prior(e)));
    }
  }
  out.entropy_form = h_tau - h_tau_given_e;
  return out;
}

SkillDecompositionReport verify_skill_decomposition(const EmbodimentSet& set, const TabularPolicy& policy,
                                                    const Eigen::VectorXd& skill_prior, int horizon) {
  const int k = static_cast<int>(skill_prior.size());
  std::vector<FiniteTrajectorySpace> per_skill;
  for (int z = 0; z < k; ++z)
    per_skill.push_back(
        enumerate_space(set, policy, horizon, policy.uses_skill() ? std::optional<int>(z) : std::nullopt));

  // p_bar(tau) = sum_e sum_z p(e) p(z) p(tau | z, e)
  const Eigen::Index n = per_skill.front().size();
  Eigen::VectorXd bar = Eigen::VectorXd::Zero(n);
  for (int z = 0; z < k; ++z) bar += skill_prior(z) * per_skill[static_cast<std::size_t>(z)].mixture;

  SkillDecompositionReport out;
  for (int e = 0; e < set.size(); ++e)
    for (int z = 0; z < k; ++z) {
      const auto& sp = per_skill[static_cast<std::size_t>(z)];
      double kl = 0.0;
      for (Eigen::Index t = 0; t < n; ++t)
        if (sp.prob(e, t) > 0.0) kl += sp.prob(e, t) * (sp.log_prob(e, t) - std::log(bar(t)));
      out.lhs += set.prior(e) * skill_prior(z) * kl;
    }

  const SkillObjectiveTerms terms = skill_objective_terms(set, policy, skill_prior, horizon);
  out.mi_embodiment = terms.mi_embodiment;
  out.mi_skill_given_embodiment = terms.mi_skill_given_embodiment;
  return out;
}

StepwiseGapReport measure_stepwise_gap(const EmbodimentSet& set, const TabularPolicy& policy, int horizon) {
  const FiniteTrajectorySpace space = enumerate_space(set, policy, horizon);
  StepwiseGapReport out;
  out.per_step.assign(static_cast<std::size_t>(horizon), 0.0);
  for (Eigen::Index t = 0; t < space.size(); ++t) {
    if (space.mixture(t) <= 0.0) continue;
    const Trajectory traj = space.trajectory(t);
    const auto prefixes = prefix_posteriors(set, traj);
    for (int e = 0; e < space.num_embodiments(); ++e) {
      const double w = space.prior(e) * space.prob(e, t);
      if (w <= 0.0) continue;
      const double log_prior = std::log(space.prior(e));
      out.trajectory_expectation += w * (log_prior - prefixes.back().log_weights(e));
      for (int step = 1; step <= horizon; ++step) {
        const double r = w * (log_prior - prefixes[static_cast<std::size_t>(step)].log_weights(e));
        out.per_step[static_cast<std::size_t>(step) - 1] += r;
        out.stepwise_expectation += r;
      }
    }
  }
  return out;
}

BatchReport<MiIdentityReport> verify_mi_identity_batch(int instances, int horizon, std::uint64_t seed, int threads) {
  BatchReport<MiIdentityReport> out;
  out.reports.resize(static_cast<std::size_t>(instances));
  const Rng root(seed);
  parallel_for(instances, threads, [&](int i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    out.reports[static_cast<std::size_t>(i)] = verify_mi_identity(inst.set, inst.policy, horizon);
  });
  return out;
}

BatchReport<SkillDecompositionReport> verify_skill_decomposition_batch(int instances, int horizon,
                                                                       std::uint64_t seed, int threads) {
  BatchReport<SkillDecompositionReport> out;
  out.reports.resize(static_cast<std::size_t>(instances));
  const Rng root(seed);
  parallel_for(instances, threads, [&](int i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    const int k = 2 + rng.below(2);
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, i == 0 ? 1 : 3, k);
    const Eigen::VectorXd skill_prior = random_simplex_point(rng, k);
    out.reports[static_cast<std::size_t>(i)] = verify_skill_decomposition(inst.set, inst.policy, skill_prior, horizon);
  });
  return out;
}

}  // namespace ceurl
