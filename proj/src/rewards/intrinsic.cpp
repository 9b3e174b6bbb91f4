#include "ceurl/rewards/intrinsic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ceurl {

std::string to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::CE: return "ce";
    case RewardKind::LBS: return "lbs";
    case RewardKind::DIAYN: return "diayn";
    case RewardKind::CE_LBS: return "ce+lbs";
    case RewardKind::CE_DIAYN: return "ce+diayn";
  }
  return "?";
}

RewardKind parse_reward_kind(const std::string& name) {
  for (auto k : {RewardKind::CE, RewardKind::LBS, RewardKind::DIAYN, RewardKind::CE_LBS, RewardKind::CE_DIAYN})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown reward kind '" + name + "'");
}

void IntrinsicRewardSpec::validate() const {
  if (!std::isfinite(ce_weight) || !std::isfinite(lbs_weight) || !std::isfinite(diayn_weight))
    throw std::invalid_argument("reward weights must be finite");
  if (has_diayn() && num_skills < 2) throw std::invalid_argument("DIAYN needs at least two skills");
}

double combined_reward(const IntrinsicRewardSpec& spec, const RewardComponents& c) {
  double r = 0.0;
  if (spec.has_ce()) r += spec.ce_weight * c.ce;
  if (spec.has_lbs()) r += spec.lbs_weight * c.lbs;
  if (spec.has_diayn()) r += spec.diayn_weight * c.diayn;
  return r;
}

double r_ce_trajectory(const EmbodimentSet& set, const Eigen::VectorXd& q_log_posterior, int embodiment_id) {
  if (q_log_posterior.size() != set.size()) throw std::invalid_argument("r_ce: posterior size mismatch");
  for (Eigen::Index i = 0; i < q_log_posterior.size(); ++i)
    if (std::isnan(q_log_posterior(i)) || q_log_posterior(i) == std::numeric_limits<double>::infinity())
      throw std::domain_error("r_ce: posterior entry is not a log-probability");
  const int e = set.index_of(embodiment_id);
  if (!std::isfinite(q_log_posterior(e)))
    throw std::domain_error("r_ce: posterior rules out the embodiment that generated the data");
  return safe_log(set.prior(e)) - q_log_posterior(e);
}

double r_ce_step(const Eigen::VectorXd& disc_log_output, const EmbodimentSet& set, int embodiment_id) {
  return r_ce_trajectory(set, disc_log_output, embodiment_id);
}

double r_diayn(double log_q_skill, int num_skills) {
  if (num_skills < 1) throw std::invalid_argument("r_diayn: bad skill count");
  return log_q_skill + std::log(static_cast<double>(num_skills));
}

SkillObjectiveTerms skill_objective_terms(const EmbodimentSet& set, const TabularPolicy& policy,
                                          const Eigen::VectorXd& skill_prior, int horizon) {
  const int k = static_cast<int>(skill_prior.size());
  if (!detail::is_distribution(skill_prior, 1e-12)) throw std::invalid_argument("skill prior is not a distribution");
  if (policy.uses_skill() && policy.num_skills != k)
    throw std::invalid_argument("skill prior size does not match the policy");

  std::vector<Eigen::MatrixXd> per_skill;  // log p(tau | z, e), rows e
  for (int z = 0; z < k; ++z) {
    if (policy.uses_skill() || z == 0)
      per_skill.push_back(enumerate_trajectory_logprobs(set, policy, horizon,
                                                        policy.uses_skill() ? std::optional<int>(z) : std::nullopt));
    else
      per_skill.push_back(per_skill.front());
  }
  const Eigen::Index n = per_skill.front().cols();
  const int m = set.size();

  Eigen::MatrixXd log_pe(m, n);  // log p(tau | e)
  Eigen::VectorXd terms(k);
  for (int e = 0; e < m; ++e)
    for (Eigen::Index t = 0; t < n; ++t) {
      for (int z = 0; z < k; ++z) terms(z) = safe_log(skill_prior(z)) + per_skill[static_cast<std::size_t>(z)](e, t);
      log_pe(e, t) = log_sum_exp(terms);
    }

  SkillObjectiveTerms out;
  Eigen::VectorXd mix(m);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int e = 0; e < m; ++e) mix(e) = safe_log(set.prior(e)) + log_pe(e, t);
    const double log_bar = log_sum_exp(mix);
    for (int e = 0; e < m; ++e) {
      if (is_impossible(mix(e))) continue;
      out.mi_embodiment += std::exp(mix(e)) * (log_pe(e, t) - log_bar);
      for (int z = 0; z < k; ++z) {
        const double lz = per_skill[static_cast<std::size_t>(z)](e, t);
        if (is_impossible(lz) || skill_prior(z) == 0.0) continue;
        out.mi_skill_given_embodiment += set.prior(e) * skill_prior(z) * std::exp(lz) * (lz - log_pe(e, t));
      }
    }
  }
  return out;
}

}  // namespace ceurl
