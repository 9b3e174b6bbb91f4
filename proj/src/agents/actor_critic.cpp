#include "ceurl/agents/actor_critic.hpp"

#include "ceurl/core/logspace.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace ceurl {

Eigen::VectorXd softmax_score(const Eigen::VectorXd& probs, int action) {
  Eigen::VectorXd g = -probs;
  g(action) += 1.0;
  return g;
}

Eigen::VectorXd entropy_gradient(const Eigen::VectorXd& probs) {
  Eigen::VectorXd log_p(probs.size());
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    log_p(i) = probs(i) > 0.0 ? std::log(probs(i)) : 0.0;
    h -= probs(i) * log_p(i);
  }
  return -(probs.array() * (log_p.array() + h)).matrix();
}

double td_update(Eigen::VectorXd& critic, int key, double reward, double gamma, int next_key, double critic_lr) {
  const double bootstrap = next_key >= 0 ? gamma * critic(next_key) : 0.0;
  const double delta = reward + bootstrap - critic(key);
  critic(key) += critic_lr * delta;
  return delta;
}

Eigen::VectorXd actor_update(Eigen::MatrixXd& logits, int key, int action, double advantage,
                             const ActorCriticParams& params) {
  const Eigen::VectorXd probs = softmax(logits.row(key).transpose());
  Eigen::VectorXd step = advantage * softmax_score(probs, action);
  if (params.entropy != 0.0) step += params.entropy * entropy_gradient(probs);
  logits.row(key) += params.actor_lr * step.transpose();
  return softmax(logits.row(key).transpose());
}

Eigen::VectorXd kl_proximal_step(const Eigen::VectorXd& logits, const Eigen::VectorXd& anchor, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("kl_proximal_step: bad lambda");
  if (lambda == 0.0) return logits;
  const Eigen::Index n = logits.size();
  // KL(anchor || softmax(x)) = LSE(x) - anchor.x + const
  auto objective = [&](const Eigen::VectorXd& x) {
    return 0.5 * (x - logits).squaredNorm() + lambda * (log_sum_exp(x) - anchor.dot(x));
  };
  Eigen::VectorXd x = logits;
  double fx = objective(x);
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd p = softmax(x);
    const Eigen::VectorXd grad = (x - logits) + lambda * (p - anchor);
    if (grad.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + lambda)) break;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Identity(n, n);
    hess += lambda * (Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose());
    const Eigen::VectorXd dir = -hess.ldlt().solve(grad);
    double t = 1.0, f_new = objective(x + dir);
    while (f_new > fx + 1e-4 * t * grad.dot(dir) && t > 1e-12) {
      t *= 0.5;
      f_new = objective(x + t * dir);
    }
    if (t <= 1e-12) break;
    x += t * dir;
    fx = f_new;
  }
  return x;
}

}  // namespace ceurl
