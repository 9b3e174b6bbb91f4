#pragma once

#include "ceurl/oracle/theorem.hpp"

#include <cstdint>
#include <vector>

namespace ceurl {

/// I(e; tau) computed three ways.
struct MiIdentityReport {
  /// E_e KL(p_e || p_bar)
  double kl_form = 0.0;
  /// E_e E_{tau ~ p_e}[log p(e | tau) - log p(e)], posterior by incremental Bayes
  double posterior_form = 0.0;
  /// H(tau) - H(tau | e)
  double entropy_form = 0.0;
  double tolerance = 1e-9;

  double max_discrepancy() const;
  bool passed() const { return max_discrepancy() < tolerance; }
};

MiIdentityReport verify_mi_identity(const EmbodimentSet& set, const TabularPolicy& policy, int horizon);

struct SkillDecompositionReport {
  /// E_e E_z KL(p(tau | z, e) || p_bar(tau))
  double lhs = 0.0;
  double mi_embodiment = 0.0;
  double mi_skill_given_embodiment = 0.0;
  double tolerance = 1e-8;

  double rhs() const { return mi_embodiment + mi_skill_given_embodiment; }
  double discrepancy() const { return std::abs(lhs - rhs()); }
  bool passed() const { return discrepancy() < tolerance; }
};

SkillDecompositionReport verify_skill_decomposition(const EmbodimentSet& set, const TabularPolicy& policy,
                                                    const Eigen::VectorXd& skill_prior, int horizon);

/// Per-step R_CE with exact prefix posteriors versus the trajectory-level
/// R_CE, both in expectation over e and tau. Diagnostic only.
struct StepwiseGapReport {
  double trajectory_expectation = 0.0;
  double stepwise_expectation = 0.0;
  /// Expected per-step reward at step t = 1 .. L.
  std::vector<double> per_step;
  double gap() const { return std::abs(stepwise_expectation - trajectory_expectation); }
};

StepwiseGapReport measure_stepwise_gap(const EmbodimentSet& set, const TabularPolicy& policy, int horizon);

template <typename Report>
struct BatchReport {
  std::vector<Report> reports;
  bool passed() const {
    if (reports.empty()) return false;
    for (const auto& r : reports)
      if (!r.passed()) return false;
    return true;
  }
};

/// Random instances as in random_ce_mdp (|S| <= 3, |A| <= 2, |E| <= 3).
BatchReport<MiIdentityReport> verify_mi_identity_batch(int instances, int horizon, std::uint64_t seed,
                                                       int threads = 1);

/// Random skill-conditioned instances with K in {2, 3}; instance 0 is forced
/// to a single (Dirac) embodiment.
BatchReport<SkillDecompositionReport> verify_skill_decomposition_batch(int instances, int horizon,
                                                                       std::uint64_t seed, int threads = 1);

}  // namespace ceurl
