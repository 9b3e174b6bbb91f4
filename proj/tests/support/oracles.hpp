#pragma once

// Reference computations for the tests. They avoid the library's own solvers
// (no LU solves, no active sets) so agreement is between independent routes.

#include "ceurl/core/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using ceurl::Embodiment;
using ceurl::EmbodimentSet;
using ceurl::Rng;
using ceurl::TabularPolicy;

inline double next_state_prob(const Embodiment& emb, const TabularPolicy& pi, int s, int s_next) {
  double p = 0.0;
  for (int a = 0; a < pi.num_actions; ++a) p += pi.probs(s, a) * emb.prob(s, a, s_next);
  return p;
}

/// (1 - gamma) sum_t gamma^t P(s_t = s), propagated until gamma^t < 1e-17.
inline Eigen::VectorXd occupancy_by_series(const Embodiment& emb, const TabularPolicy& pi, double gamma) {
  const int n = emb.num_states;
  std::vector<double> law(emb.initial_dist.data(), emb.initial_dist.data() + n), next(n);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (double w = 1.0 - gamma; w > 1e-17; w *= gamma) {
    for (int s = 0; s < n; ++s) d(s) += w * law[s];
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) next[t] += law[s] * next_state_prob(emb, pi, s, t);
    law.swap(next);
  }
  return d;
}

/// sum_{t < horizon} gamma^t E[r(s_t)] by forward propagation of the state law.
inline double propagated_return(const Embodiment& emb, const TabularPolicy& pi, const Eigen::VectorXd& r,
                                double gamma, int horizon) {
  const int n = emb.num_states;
  std::vector<double> law(emb.initial_dist.data(), emb.initial_dist.data() + n), next(n);
  double total = 0.0, w = 1.0;
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < n; ++s) total += w * law[s] * r(s);
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s)
      for (int u = 0; u < n; ++u) next[u] += law[s] * next_state_prob(emb, pi, s, u);
    law.swap(next);
    w *= gamma;
  }
  return total;
}

/// Visit every state/action sequence of a horizon with its probability
/// under one embodiment, by recursion (independent of the library's odometer).
inline void enumerate_paths(const Embodiment& emb, const TabularPolicy& pi, int horizon,
                            const std::function<void(const std::vector<int>&, const std::vector<int>&, double)>& f) {
  std::vector<int> states, actions;
  std::function<void(double)> rec = [&](double p) {
    if (static_cast<int>(actions.size()) == horizon) {
      f(states, actions, p);
      return;
    }
    const int s = states.back();
    for (int a = 0; a < pi.num_actions; ++a)
      for (int t = 0; t < emb.num_states; ++t) {
        actions.push_back(a);
        states.push_back(t);
        rec(p * pi.probs(s, a) * emb.prob(s, a, t));
        states.pop_back();
        actions.pop_back();
      }
  };
  for (int s0 = 0; s0 < emb.num_states; ++s0) {
    states.assign(1, s0);
    rec(emb.initial_dist(s0));
  }
}

/// Value function by repeated Bellman backups.
inline Eigen::VectorXd values_by_iteration(const Embodiment& emb, const TabularPolicy& pi, const Eigen::VectorXd& r,
                                           double gamma) {
  const int n = emb.num_states;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd nv(n);
    for (int s = 0; s < n; ++s) {
      nv(s) = r(s);
      for (int t = 0; t < n; ++t) nv(s) += gamma * next_state_prob(emb, pi, s, t) * v(t);
    }
    const double change = (nv - v).cwiseAbs().maxCoeff();
    v = nv;
    if (change < 1e-15) break;
  }
  return v;
}

/// Euclidean projection onto the simplex (bisection on the shift).
inline Eigen::VectorXd simplex_projection(const Eigen::VectorXd& v) {
  double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((v.array() - mid).max(0.0).sum() > 1.0 ? lo : hi) = mid;
  }
  Eigen::VectorXd w = (v.array() - 0.5 * (lo + hi)).max(0.0);
  return w / w.sum();
}

/// Distance from `point` to the convex hull of the columns of `vertices`, by
/// accelerated projected gradient on the convex weights.
inline double hull_distance(const Eigen::VectorXd& point, const Eigen::MatrixXd& vertices, int iterations = 20000) {
  const Eigen::Index n = vertices.cols();
  const Eigen::MatrixXd gram = vertices.transpose() * vertices;
  const double lipschitz = std::max(gram.norm(), 1e-12);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), y = w;
  double t = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd grad = vertices.transpose() * (vertices * y - point);
    const Eigen::VectorXd w_next = simplex_projection(y - grad / lipschitz);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = w_next + ((t - 1.0) / t_next) * (w_next - w);
    w = w_next;
    t = t_next;
  }
  return (vertices * w - point).norm();
}

/// Central differences of a scalar function of a dense parameter block.
template <typename F>
Eigen::MatrixXd central_differences(Eigen::MatrixXd& params, F&& f, double h = 1e-6) {
  Eigen::MatrixXd g(params.rows(), params.cols());
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double keep = params.data()[i];
    params.data()[i] = keep + h;
    const double up = f();
    params.data()[i] = keep - h;
    const double down = f();
    params.data()[i] = keep;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Random dense embodiment set with a shared state space.
inline EmbodimentSet random_set(Rng& rng, int states, int actions, int embodiments, double sparsity = 0.0) {
  EmbodimentSet set;
  set.unified_num_actions = actions;
  set.discount = 0.9;
  set.prior = ceurl::random_simplex_point(rng, embodiments);
  for (int e = 0; e < embodiments; ++e) {
    Embodiment emb;
    emb.id = e;
    emb.num_states = states;
    emb.num_actions = actions;
    emb.transition.resize(states * actions, states);
    for (int r = 0; r < states * actions; ++r) {
      Eigen::VectorXd row = ceurl::random_simplex_point(rng, states);
      for (int j = 0; j < states; ++j)
        if (rng.uniform() < sparsity) row(j) = 0.0;
      if (row.sum() == 0.0) row(rng.below(states)) = 1.0;
      emb.transition.row(r) = (row / row.sum()).transpose();
    }
    emb.initial_dist = ceurl::random_simplex_point(rng, states);
    for (int a = 0; a < actions; ++a) emb.action_projector.push_back(a);
    set.embodiments.push_back(emb);
  }
  set.validate();
  return set;
}

inline TabularPolicy random_policy(Rng& rng, int states, int actions) {
  TabularPolicy pi = TabularPolicy::uniform(states, actions);
  for (int s = 0; s < states; ++s) pi.probs.row(s) = ceurl::random_simplex_point(rng, actions).transpose();
  return pi;
}

}  // namespace oracle
