#pragma once

#include <Eigen/Core>

#include <span>

namespace ceurl {

struct SkillExample {
  int state = 0;
  int context = 0;  // ignored when the discriminator has no context input
  int skill = 0;
  int embodiment = 0;  // ignored unless joint
};

/// Linear softmax classifier over skills, or jointly over (skill, embodiment)
/// pairs, from a state one-hot plus an optional context-bucket one-hot.
///
/// Joint class index is skill * num_embodiments + embodiment.
class SkillDiscriminator {
 public:
  SkillDiscriminator() = default;
  SkillDiscriminator(int num_states, int num_skills, int num_embodiments = 1, int num_contexts = 0,
                     double step_size = 0.5, double l2 = 1e-4);

  int num_states() const { return num_states_; }
  int num_skills() const { return num_skills_; }
  int num_embodiments() const { return num_embodiments_; }
  int num_contexts() const { return num_contexts_; }
  bool joint() const { return num_embodiments_ > 1; }

  /// Rows are classes; column 0 is the bias.
  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& weights() { return weights_; }

  /// Normalized log-probabilities over all classes.
  Eigen::VectorXd log_joint(int state, int context = 0) const;
  /// log q(z | s), marginalized over embodiments in joint mode.
  Eigen::VectorXd log_skill(int state, int context = 0) const;

  double loss(std::span<const SkillExample> batch) const;
  Eigen::MatrixXd gradient(std::span<const SkillExample> batch) const;
  /// One gradient step; returns the loss before the step.
  double train(std::span<const SkillExample> batch);

 private:
  Eigen::VectorXd logits(int state, int context) const;
  int label(const SkillExample& ex) const;

  int num_states_ = 0;
  int num_skills_ = 0;
  int num_embodiments_ = 1;
  int num_contexts_ = 0;
  double step_size_ = 0.5;
  double l2_ = 1e-4;
  Eigen::MatrixXd weights_;
};

/// DIAYN reward of being in `state` under `skill`.
double r_diayn(const SkillDiscriminator& disc, int state, int skill, int context = 0);

}  // namespace ceurl
