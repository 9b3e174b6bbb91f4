#include "ceurl/rewards/skill_discriminator.hpp"

#include "ceurl/core/logspace.hpp"
#include "ceurl/rewards/intrinsic.hpp"

#include <stdexcept>

namespace ceurl {

SkillDiscriminator::SkillDiscriminator(int num_states, int num_skills, int num_embodiments, int num_contexts,
                                       double step_size, double l2)
    : num_states_(num_states),
      num_skills_(num_skills),
      num_embodiments_(num_embodiments),
      num_contexts_(num_contexts),
      step_size_(step_size),
      l2_(l2),
      weights_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_skills) * num_embodiments,
                                     1 + num_states + num_contexts)) {
  if (num_states < 1 || num_skills < 1 || num_embodiments < 1 || num_contexts < 0)
    throw std::invalid_argument("skill discriminator: bad dimensions");
  if (!(step_size > 0.0) || !(l2 >= 0.0)) throw std::invalid_argument("skill discriminator: bad optimizer settings");
}

Eigen::VectorXd SkillDiscriminator::logits(int state, int context) const {
  if (state < 0 || state >= num_states_) throw std::out_of_range("skill discriminator: state out of range");
  Eigen::VectorXd z = weights_.col(0) + weights_.col(1 + state);
  if (num_contexts_ > 0) {
    if (context < 0 || context >= num_contexts_) throw std::out_of_range("skill discriminator: context out of range");
    z += weights_.col(1 + num_states_ + context);
  }
  return z;
}

int SkillDiscriminator::label(const SkillExample& ex) const {
  if (ex.skill < 0 || ex.skill >= num_skills_) throw std::out_of_range("skill discriminator: skill out of range");
  if (!joint()) return ex.skill;
  if (ex.embodiment < 0 || ex.embodiment >= num_embodiments_)
    throw std::out_of_range("skill discriminator: embodiment out of range");
  return ex.skill * num_embodiments_ + ex.embodiment;
}

Eigen::VectorXd SkillDiscriminator::log_joint(int state, int context) const {
  return log_normalize(logits(state, context));
}

Eigen::VectorXd SkillDiscriminator::log_skill(int state, int context) const {
  const Eigen::VectorXd lj = log_joint(state, context);
  if (!joint()) return lj;
  Eigen::VectorXd out(num_skills_);
  for (int z = 0; z < num_skills_; ++z) out(z) = log_sum_exp(lj.segment(z * num_embodiments_, num_embodiments_));
  return out;
}

double SkillDiscriminator::loss(std::span<const SkillExample> batch) const {
  if (batch.empty()) throw std::invalid_argument("skill discriminator loss: empty batch");
  double total = 0.0;
  for (const auto& ex : batch) total -= log_joint(ex.state, ex.context)(label(ex));
  return total / static_cast<double>(batch.size()) +
         0.5 * l2_ * weights_.rightCols(weights_.cols() - 1).squaredNorm();
}

Eigen::MatrixXd SkillDiscriminator::gradient(std::span<const SkillExample> batch) const {
  if (batch.empty()) throw std::invalid_argument("skill discriminator gradient: empty batch");
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(weights_.rows(), weights_.cols());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    Eigen::VectorXd residual = softmax(logits(ex.state, ex.context));
    residual(label(ex)) -= 1.0;
    residual *= inv_n;
    grad.col(0) += residual;
    grad.col(1 + ex.state) += residual;
    if (num_contexts_ > 0) grad.col(1 + num_states_ + ex.context) += residual;
  }
  grad.rightCols(grad.cols() - 1) += l2_ * weights_.rightCols(weights_.cols() - 1);
  return grad;
}

double SkillDiscriminator::train(std::span<const SkillExample> batch) {
  const double before = loss(batch);
  weights_ -= step_size_ * gradient(batch);
  return before;
}

double r_diayn(const SkillDiscriminator& disc, int state, int skill, int context) {
  return r_diayn(disc.log_skill(state, context)(skill), disc.num_skills());
}

}  // namespace ceurl
