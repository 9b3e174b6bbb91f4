#pragma once

#include "ceurl/inference/posterior.hpp"

namespace ceurl {

/// Dirichlet transition-count model shared by all embodiments.
///
/// Row s * A + a holds the counts of next states after (s, a); the predictive
/// distribution is (counts + alpha) / (row total + S alpha).
class SurpriseModel {
 public:
  SurpriseModel() = default;
  SurpriseModel(int num_states, int num_actions, double alpha = 1.0);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double alpha() const { return alpha_; }
  const Eigen::MatrixXd& counts() const { return counts_; }
  Eigen::MatrixXd& counts() { return counts_; }

  Eigen::VectorXd predictive(int state, int action) const;

  /// KL(predictive before || predictive after) for one more observation of
  /// `tr`; the model is not changed.
  double surprise(const Transition& tr) const;
  void ingest(const Transition& tr);

  void validate() const;

 private:
  int num_states_ = 0;
  int num_actions_ = 0;
  double alpha_ = 1.0;
  Eigen::MatrixXd counts_;
};

/// Bayesian surprise of `tr`, after which the model ingests it.
double r_surprise(SurpriseModel& model, const Transition& tr);

}  // namespace ceurl
