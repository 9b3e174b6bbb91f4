#include "ceurl/oracle/trajectory_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace ceurl {

int FiniteTrajectorySpace::position_of(int embodiment_id) const {
  for (int i = 0; i < num_embodiments(); ++i)
    if (embodiment_ids[static_cast<std::size_t>(i)] == embodiment_id) return i;
  throw std::out_of_range("trajectory space has no embodiment " + std::to_string(embodiment_id));
}

Trajectory FiniteTrajectorySpace::trajectory(Eigen::Index index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("trajectory index out of range");
  Trajectory t;
  t.states.assign(static_cast<std::size_t>(horizon) + 1, 0);
  t.actions.assign(static_cast<std::size_t>(horizon), 0);
  for (int digit = 2 * horizon; digit >= 0; --digit) {
    const bool is_state = digit % 2 == 0;
    const int base = is_state ? num_states : num_actions;
    (is_state ? t.states : t.actions)[static_cast<std::size_t>(digit / 2)] = static_cast<int>(index % base);
    index /= base;
  }
  return t;
}

Eigen::Index FiniteTrajectorySpace::index_of(const Trajectory& traj) const {
  if (traj.length() != horizon) throw std::invalid_argument("trajectory length does not match the space");
  traj.validate(num_states, num_actions);
  Eigen::Index index = 0;
  for (int digit = 0; digit <= 2 * horizon; ++digit) {
    const bool is_state = digit % 2 == 0;
    index = index * (is_state ? num_states : num_actions) +
            (is_state ? traj.states : traj.actions)[static_cast<std::size_t>(digit / 2)];
  }
  return index;
}

namespace {

void fill_mixture(FiniteTrajectorySpace& space) {
  space.prob = exp_of(space.log_prob);
  space.mixture = space.prob.transpose() * space.prior;
  space.log_mixture.resize(space.mixture.size());
  Eigen::VectorXd terms(space.num_embodiments());
  for (Eigen::Index t = 0; t < space.mixture.size(); ++t) {
    for (int e = 0; e < space.num_embodiments(); ++e) terms(e) = safe_log(space.prior(e)) + space.log_prob(e, t);
    space.log_mixture(t) = log_sum_exp(terms);
  }
}

}  // namespace

FiniteTrajectorySpace enumerate_space(const EmbodimentSet& set, const TabularPolicy& policy, int horizon,
                                      std::optional<int> skill) {
  FiniteTrajectorySpace space;
  space.num_states = set.num_states();
  space.num_actions = set.unified_num_actions;
  space.horizon = horizon;
  for (const auto& e : set.embodiments) space.embodiment_ids.push_back(e.id);
  space.prior = set.prior;
  space.log_prob = enumerate_trajectory_logprobs(set, policy, horizon, skill);
  fill_mixture(space);
  return space;
}

FiniteTrajectorySpace space_from_distributions(const Eigen::MatrixXd& prob, const Eigen::VectorXd& prior) {
  if (prob.rows() != prior.size() || !detail::is_distribution(prior, 1e-12))
    throw std::invalid_argument("space_from_distributions: bad prior");
  for (Eigen::Index e = 0; e < prob.rows(); ++e)
    if (!detail::is_distribution(prob.row(e).transpose(), 1e-9))
      throw std::invalid_argument("space_from_distributions: row is not a distribution");
  FiniteTrajectorySpace space;
  space.num_states = 1;
  space.num_actions = static_cast<int>(prob.cols());
  space.horizon = 1;  // one abstract "action" per outcome, for indexing only
  for (int e = 0; e < prob.rows(); ++e) space.embodiment_ids.push_back(e);
  space.prior = prior;
  space.log_prob = prob.unaryExpr([](double p) { return safe_log(p); });
  fill_mixture(space);
  return space;
}

namespace {

void check_args(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta, int embodiment) {
  if (reward.size() != space.size()) throw std::invalid_argument("reward vector does not match the space");
  for (Eigen::Index i = 0; i < reward.size(); ++i)
    if (std::isnan(reward(i)) || reward(i) == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("reward entries must be finite or -inf");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be positive and finite");
  if (embodiment < 0 || embodiment >= space.num_embodiments()) throw std::out_of_range("embodiment out of range");
}

double expected_under(const Eigen::VectorXd& p, const Eigen::VectorXd& reward) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) total += p(i) * reward(i);
  return total;
}

}  // namespace

InnerMaximum inner_max_closed_form(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta,
                                   int embodiment) {
  check_args(space, reward, beta, embodiment);
  const Eigen::VectorXd tilted = space.log_mixture + reward / beta;
  InnerMaximum out;
  out.value = beta * log_sum_exp(tilted) - expected_under(space.prob.row(embodiment).transpose(), reward);
  out.p_star = softmax(tilted);
  return out;
}

double inner_objective(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta, int embodiment,
                       const Eigen::VectorXd& p) {
  check_args(space, reward, beta, embodiment);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (is_impossible(space.log_mixture(i))) return impossible<double>();
    kl += p(i) * (std::log(p(i)) - space.log_mixture(i));
  }
  return expected_under(p, reward) - expected_under(space.prob.row(embodiment).transpose(), reward) - beta * kl;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw std::invalid_argument("project_to_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

SimplexMaximum inner_max_projected_gradient(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward,
                                            double beta, int embodiment, double tol, int max_iterations) {
  check_args(space, reward, beta, embodiment);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < space.size(); ++i)
    if (space.mixture(i) > 0.0 && !is_impossible(reward(i))) support.push_back(i);
  const auto n = static_cast<Eigen::Index>(support.size());
  if (n == 0) throw std::invalid_argument("the reward rules out every trajectory of p_bar");
  Eigen::VectorXd r(n), log_bar(n), x(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r(k) = reward(support[static_cast<std::size_t>(k)]);
    log_bar(k) = space.log_mixture(support[static_cast<std::size_t>(k)]);
    x(k) = space.mixture(support[static_cast<std::size_t>(k)]);
  }
  x /= x.sum();

  // minimize f = -(x.r - beta KL(x || p_bar)); the E_{p_e}[R] term is constant
  auto f = [&](const Eigen::VectorXd& p) {
    double kl = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (p(k) > 0.0) kl += p(k) * (std::log(p(k)) - log_bar(k));
    return -p.dot(r) + beta * kl;
  };
  auto grad = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd g(n);
    for (Eigen::Index k = 0; k < n; ++k) g(k) = -r(k) + beta * (std::log(std::max(p(k), 1e-300)) - log_bar(k) + 1.0);
    return g;
  };

  // Projected gradient in the metric of the diagonal Hessian beta / x: the
  // scaled gradient is projected onto the simplex's tangent space and the
  // step is cut back to stay inside the simplex.
  SimplexMaximum out;
  double fx = f(x);
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    const Eigen::VectorXd g = grad(x);
    const double mean = x.dot(g);
    const Eigen::VectorXd d = (-x.array() * (g.array() - mean) / beta).matrix();
    const double stationarity = (x.array() * (g.array() - mean).abs()).maxCoeff();
    if (stationarity <= tol) {
      out.converged = true;
      break;
    }
    double t = 1.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (d(k) < 0.0) t = std::min(t, 0.99 * x(k) / -d(k));
    const double slope = g.dot(d);
    Eigen::VectorXd x_new = x + t * d;
    double f_new = f(x_new);
    while (f_new > fx + 1e-4 * t * slope && t > 1e-20) {
      t *= 0.5;
      x_new = x + t * d;
      f_new = f(x_new);
    }
    const bool stalled = !(fx - f_new > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx)));
    if (t <= 1e-20 || stalled) {
      // -slope is the Newton decrement, about twice the remaining suboptimality
      out.converged = -slope <= 1e-12 * std::max(1.0, std::abs(fx));
      break;
    }
    x = x_new / x_new.sum();
    fx = f(x);
  }

  out.p = Eigen::VectorXd::Zero(space.size());
  for (Eigen::Index k = 0; k < n; ++k) out.p(support[static_cast<std::size_t>(k)]) = x(k);
  out.value = inner_objective(space, reward, beta, embodiment, out.p);
  return out;
}

}  // namespace ceurl
