#pragma once

#include "ceurl/core/mdp.hpp"

#include <string>

namespace ceurl {

enum class RewardKind { CE, LBS, DIAYN, CE_LBS, CE_DIAYN };

std::string to_string(RewardKind kind);
RewardKind parse_reward_kind(const std::string& name);

/// Which intrinsic terms are summed, and with which weights.
struct IntrinsicRewardSpec {
  RewardKind kind = RewardKind::CE;
  double ce_weight = 1.0;
  double lbs_weight = 1.0;
  double diayn_weight = 1.0;
  /// Number of skills; read only when DIAYN is part of the spec.
  int num_skills = 4;

  bool has_ce() const { return kind == RewardKind::CE || kind == RewardKind::CE_LBS || kind == RewardKind::CE_DIAYN; }
  bool has_lbs() const { return kind == RewardKind::LBS || kind == RewardKind::CE_LBS; }
  bool has_diayn() const { return kind == RewardKind::DIAYN || kind == RewardKind::CE_DIAYN; }

  void validate() const;
};

/// Per-transition reward terms; absent terms are left at zero.
struct RewardComponents {
  double ce = 0.0;
  double lbs = 0.0;
  double diayn = 0.0;
};

/// Weighted sum of the terms the spec enables.
double combined_reward(const IntrinsicRewardSpec& spec, const RewardComponents& c);

/// log p(e) - log q(e | tau) for the embodiment with id `embodiment_id`.
///
/// Other embodiments may carry log q = -inf (ruled out by the evidence); the
/// true embodiment's entry must be finite.
double r_ce_trajectory(const EmbodimentSet& set, const Eigen::VectorXd& q_log_posterior, int embodiment_id);

/// Same formula applied to a per-step discriminator output.
double r_ce_step(const Eigen::VectorXd& disc_log_output, const EmbodimentSet& set, int embodiment_id);

/// log q(z | s) - log(1 / K).
double r_diayn(double log_q_skill, int num_skills);

/// The two mutual-information terms of the skill objective, by enumeration.
struct SkillObjectiveTerms {
  /// E_e E_{tau|e} log p(e | tau) / p(e)
  double mi_embodiment = 0.0;
  /// E_e I(tau; z | e)
  double mi_skill_given_embodiment = 0.0;
};

/// `policy` is skill-conditioned with K = skill_prior.size() skills (a
/// state-only policy is treated as skill-independent). Skills are drawn
/// independently of the embodiment.
SkillObjectiveTerms skill_objective_terms(const EmbodimentSet& set, const TabularPolicy& policy,
                                          const Eigen::VectorXd& skill_prior, int horizon);

}  // namespace ceurl
