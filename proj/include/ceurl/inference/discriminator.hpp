#pragma once

#include "ceurl/core/types.hpp"
#include "ceurl/inference/posterior.hpp"

#include <span>
#include <utility>
#include <vector>

namespace ceurl {

/// The last `length` (state, action) pairs before `current_state`.
///
/// Slots before the episode start hold the null tokens `num_states` and
/// `num_actions`, so real state 0 never stands in for padding.
struct HistoryWindow {
  std::vector<int> states;
  std::vector<int> actions;
  int current_state = 0;

  int length() const { return static_cast<int>(states.size()); }

  /// Window whose current state is traj.states[t].
  static HistoryWindow of(const Trajectory& traj, int t, int length, int num_states, int num_actions);
  /// All-padding window; `current_state` may itself be the null state.
  static HistoryWindow padding(int length, int num_states, int num_actions, int current_state);
};

using SparseFeatures = std::vector<std::pair<int, double>>;

/// One-hot window features for a linear classifier.
///
/// Layout: bias | current state | per-slot (state, action) pairs scaled by
/// 1/sqrt(L) | bag of in-window transitions (s, a, s') as counts / L.
/// Null tokens contribute no features. The transition bag makes the exact
/// per-window Bayes log-odds linear in the features.
struct WindowFeatureSpec {
  int num_states = 0;
  int num_actions = 0;
  int history_length = 8;
  bool transition_bag = true;

  int dim() const;
  SparseFeatures encode(const HistoryWindow& window) const;
};

struct LabeledWindow {
  HistoryWindow window;
  int label = 0;  // embodiment position in its set
};

/// Linear softmax embodiment classifier q(e | window), trained by plain
/// gradient descent on mean cross-entropy plus (l2/2)|W|^2 (bias excluded).
class LearnedDiscriminator {
 public:
  LearnedDiscriminator() = default;
  LearnedDiscriminator(WindowFeatureSpec spec, int num_embodiments, double step_size = 0.5, double l2 = 1e-4);

  const WindowFeatureSpec& spec() const { return spec_; }
  int num_embodiments() const { return static_cast<int>(weights_.rows()); }
  double step_size() const { return step_size_; }
  double l2() const { return l2_; }

  /// Rows are embodiments, columns features (column 0 is the bias).
  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& weights() { return weights_; }

  /// Normalized log-probabilities over embodiments.
  Eigen::VectorXd classify(const HistoryWindow& window) const;

  /// Regularized mean loss over `batch`.
  double loss(std::span<const LabeledWindow> batch) const;
  /// Analytic gradient of loss() with respect to weights().
  Eigen::MatrixXd gradient(std::span<const LabeledWindow> batch) const;
  /// One gradient step; returns the loss before the step.
  double train(std::span<const LabeledWindow> batch);

 private:
  Eigen::VectorXd logits(const SparseFeatures& x) const;

  WindowFeatureSpec spec_;
  Eigen::MatrixXd weights_;
  double step_size_ = 0.5;
  double l2_ = 1e-4;
};

/// One gradient step on `disc`; returns the pre-step loss.
double train_discriminator(LearnedDiscriminator& disc, std::span<const LabeledWindow> batch);

Eigen::VectorXd classify(const LearnedDiscriminator& disc, const HistoryWindow& window);

/// Context vector fed to embodiment-conditioned policies: the posterior
/// probability vector itself.
Eigen::VectorXd embodiment_context(const LearnedDiscriminator& disc, const HistoryWindow& window);
Eigen::VectorXd embodiment_context(const ExactPosterior& posterior);

}  // namespace ceurl
