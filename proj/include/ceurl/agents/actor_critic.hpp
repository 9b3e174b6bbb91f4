#pragma once

#include <Eigen/Core>

namespace ceurl {

struct ActorCriticParams {
  double actor_lr = 0.1;
  double critic_lr = 0.2;
  double entropy = 0.01;
};

/// d log pi(a) / d logits = onehot(a) - pi
Eigen::VectorXd softmax_score(const Eigen::VectorXd& probs, int action);

/// d H(pi) / d logits = -pi (log pi + H)
Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& probs);

/// One-step TD(0) update of `critic[key]`; `next_key` < 0 means terminal.
/// Returns the TD error computed before the update.
double td_update(Eigen::VectorXd& critic, int key, double reward, double gamma, int next_key, double critic_lr);

/// logits[key] += actor_lr (advantage * score + entropy * dH); returns the new
/// softmax row.
Eigen::VectorXd actor_update(Eigen::MatrixXd& logits, int key, int action, double advantage,
                             const ActorCriticParams& params);

/// Proximal step toward an anchor distribution:
///   argmin_x 0.5 |x - logits|^2 + lambda KL(anchor || softmax(x)),
/// solved by damped Newton iterations (the objective is strongly convex).
Eigen::VectorXd kl_proximal_step(const Eigen::VectorXd& logits, const Eigen::VectorXd& anchor, double lambda);

}  // namespace ceurl
