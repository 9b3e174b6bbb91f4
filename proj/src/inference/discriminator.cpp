#include "ceurl/inference/discriminator.hpp"

#include "ceurl/core/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceurl {

HistoryWindow HistoryWindow::of(const Trajectory& traj, int t, int length, int num_states, int num_actions) {
  if (t < 0 || t >= static_cast<int>(traj.states.size())) throw std::out_of_range("HistoryWindow::of: bad time index");
  HistoryWindow w = padding(length, num_states, num_actions, traj.states[static_cast<std::size_t>(t)]);
  for (int k = 0; k < length; ++k) {
    const int src = t - length + k;
    if (src < 0) continue;
    w.states[static_cast<std::size_t>(k)] = traj.states[static_cast<std::size_t>(src)];
    w.actions[static_cast<std::size_t>(k)] = traj.actions[static_cast<std::size_t>(src)];
  }
  return w;
}

HistoryWindow HistoryWindow::padding(int length, int num_states, int num_actions, int current_state) {
  HistoryWindow w;
  w.states.assign(static_cast<std::size_t>(length), num_states);
  w.actions.assign(static_cast<std::size_t>(length), num_actions);
  w.current_state = current_state;
  return w;
}

int WindowFeatureSpec::dim() const {
  const int pairs = num_states * num_actions;
  return 1 + num_states + history_length * pairs + (transition_bag ? pairs * num_states : 0);
}

SparseFeatures WindowFeatureSpec::encode(const HistoryWindow& w) const {
  if (w.length() != history_length) throw std::invalid_argument("window length does not match feature spec");
  const int pairs = num_states * num_actions;
  const int slot_base = 1 + num_states;
  const int bag_base = slot_base + history_length * pairs;
  const double slot_value = 1.0 / std::sqrt(static_cast<double>(history_length));
  const double bag_value = 1.0 / history_length;
  auto real_state = [&](int s) { return s >= 0 && s < num_states; };
  auto real_action = [&](int a) { return a >= 0 && a < num_actions; };

  SparseFeatures x;
  x.reserve(static_cast<std::size_t>(2 + 2 * history_length));
  x.emplace_back(0, 1.0);
  if (real_state(w.current_state)) x.emplace_back(1 + w.current_state, 1.0);
  for (int k = 0; k < history_length; ++k) {
    const int s = w.states[static_cast<std::size_t>(k)];
    const int a = w.actions[static_cast<std::size_t>(k)];
    if (real_state(s) && real_action(a)) x.emplace_back(slot_base + k * pairs + s * num_actions + a, slot_value);
  }
  if (transition_bag) {
    SparseFeatures bag;
    for (int k = 0; k < history_length; ++k) {
      const int s = w.states[static_cast<std::size_t>(k)];
      const int a = w.actions[static_cast<std::size_t>(k)];
      const int next = k + 1 < history_length ? w.states[static_cast<std::size_t>(k) + 1] : w.current_state;
      if (real_state(s) && real_action(a) && real_state(next))
        bag.emplace_back(bag_base + (s * num_actions + a) * num_states + next, bag_value);
    }
    std::sort(bag.begin(), bag.end());
    for (const auto& [idx, v] : bag) {
      if (x.back().first == idx) x.back().second += v;
      else x.emplace_back(idx, v);
    }
  }
  return x;
}

LearnedDiscriminator::LearnedDiscriminator(WindowFeatureSpec spec, int num_embodiments, double step_size, double l2)
    : spec_(spec), weights_(Eigen::MatrixXd::Zero(num_embodiments, spec.dim())), step_size_(step_size), l2_(l2) {
  if (num_embodiments < 1) throw std::invalid_argument("discriminator needs at least one class");
  if (!(step_size > 0.0) || !(l2 >= 0.0)) throw std::invalid_argument("discriminator: bad optimizer settings");
}

Eigen::VectorXd LearnedDiscriminator::logits(const SparseFeatures& x) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(weights_.rows());
  for (const auto& [idx, v] : x) z += v * weights_.col(idx);
  return z;
}

Eigen::VectorXd LearnedDiscriminator::classify(const HistoryWindow& window) const {
  return log_normalize(logits(spec_.encode(window)));
}

double LearnedDiscriminator::loss(std::span<const LabeledWindow> batch) const {
  if (batch.empty()) throw std::invalid_argument("discriminator loss: empty batch");
  double total = 0.0;
  for (const auto& ex : batch) total -= log_normalize(logits(spec_.encode(ex.window)))(ex.label);
  const double penalty = 0.5 * l2_ * weights_.rightCols(weights_.cols() - 1).squaredNorm();
  return total / static_cast<double>(batch.size()) + penalty;
}

Eigen::MatrixXd LearnedDiscriminator::gradient(std::span<const LabeledWindow> batch) const {
  if (batch.empty()) throw std::invalid_argument("discriminator gradient: empty batch");
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(weights_.rows(), weights_.cols());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    if (ex.label < 0 || ex.label >= weights_.rows()) throw std::out_of_range("discriminator: label out of range");
    const SparseFeatures x = spec_.encode(ex.window);
    Eigen::VectorXd residual = softmax(logits(x));
    residual(ex.label) -= 1.0;
    for (const auto& [idx, v] : x) grad.col(idx) += (inv_n * v) * residual;
  }
  grad.rightCols(grad.cols() - 1) += l2_ * weights_.rightCols(weights_.cols() - 1);
  return grad;
}

double LearnedDiscriminator::train(std::span<const LabeledWindow> batch) {
  const double before = loss(batch);
  weights_ -= step_size_ * gradient(batch);
  return before;
}

double train_discriminator(LearnedDiscriminator& disc, std::span<const LabeledWindow> batch) {
  return disc.train(batch);
}

Eigen::VectorXd classify(const LearnedDiscriminator& disc, const HistoryWindow& window) {
  return disc.classify(window);
}

Eigen::VectorXd embodiment_context(const LearnedDiscriminator& disc, const HistoryWindow& window) {
  return exp_of(disc.classify(window));
}

Eigen::VectorXd embodiment_context(const ExactPosterior& posterior) { return posterior.weights(); }

}  // namespace ceurl
