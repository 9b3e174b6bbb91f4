#include "ceurl/rewards/surprise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceurl {

SurpriseModel::SurpriseModel(int num_states, int num_actions, double alpha)
    : num_states_(num_states),
      num_actions_(num_actions),
      alpha_(alpha),
      counts_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_states) * num_actions, num_states)) {
  if (num_states < 1 || num_actions < 1) throw std::invalid_argument("surprise model: empty space");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("surprise model: alpha must be positive");
}

Eigen::VectorXd SurpriseModel::predictive(int state, int action) const {
  const Eigen::VectorXd row = counts_.row(static_cast<Eigen::Index>(state) * num_actions_ + action).transpose();
  return (row.array() + alpha_) / (row.sum() + alpha_ * num_states_);
}

double SurpriseModel::surprise(const Transition& tr) const {
  if (tr.state < 0 || tr.state >= num_states_ || tr.action < 0 || tr.action >= num_actions_ || tr.next_state < 0 ||
      tr.next_state >= num_states_)
    throw std::out_of_range("surprise model: transition out of range");
  const Eigen::VectorXd before = predictive(tr.state, tr.action);
  // Only the observed entry changes: after = (n + alpha + [s' == j]) / (N + S alpha + 1).
  const double total = counts_.row(static_cast<Eigen::Index>(tr.state) * num_actions_ + tr.action).sum() +
                       alpha_ * num_states_;
  const double shrink = std::log((total + 1.0) / total);
  double kl = 0.0;
  for (int j = 0; j < num_states_; ++j) {
    const double p = before(j);
    const double log_ratio = j == tr.next_state ? shrink - std::log1p(1.0 / (p * total)) : shrink;
    kl += p * log_ratio;
  }
  return std::max(kl, 0.0);
}

void SurpriseModel::ingest(const Transition& tr) {
  counts_(static_cast<Eigen::Index>(tr.state) * num_actions_ + tr.action, tr.next_state) += 1.0;
}

void SurpriseModel::validate() const {
  if (counts_.rows() != static_cast<Eigen::Index>(num_states_) * num_actions_ || counts_.cols() != num_states_)
    throw std::invalid_argument("surprise model: count table shape mismatch");
  if (!counts_.allFinite() || counts_.minCoeff() < 0.0)
    throw std::invalid_argument("surprise model: counts must be finite and nonnegative");
}

double r_surprise(SurpriseModel& model, const Transition& tr) {
  const double s = model.surprise(tr);
  model.ingest(tr);
  return s;
}

}  // namespace ceurl
