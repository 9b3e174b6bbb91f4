#pragma once

#include "ceurl/core/logspace.hpp"
#include "ceurl/core/rng.hpp"
#include "ceurl/core/types.hpp"

#include <Eigen/LU>

#include <stdexcept>

namespace ceurl {

namespace detail {

template <typename Scalar>
void require_discount(Scalar gamma) {
  if (!(gamma > Scalar(0) && gamma < Scalar(1)))
    throw std::domain_error("discount must lie strictly inside (0, 1)");
}

template <typename Scalar>
void require_state_only(const BasicTabularPolicy<Scalar>& policy) {
  if (policy.mode != Conditioning::State)
    throw std::invalid_argument("operation requires a state-only policy; slice it first");
}

template <typename Scalar>
int skill_of(const BasicTabularPolicy<Scalar>& policy, const Trajectory& traj) {
  if (policy.uses_context())
    throw std::invalid_argument("context-conditioned policies have no closed-form trajectory law");
  if (!policy.uses_skill()) return 0;
  if (!traj.skill_id) throw std::invalid_argument("skill-conditioned policy needs a trajectory skill id");
  return *traj.skill_id;
}

}  // namespace detail

/// State-to-state kernel of a state-only policy: sum_a pi(a|s) P(s'|s, phi(a)).
template <typename Scalar>
MatrixX<Scalar> policy_transition(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy) {
  detail::require_state_only(policy);
  MatrixX<Scalar> kernel = MatrixX<Scalar>::Zero(emb.num_states, emb.num_states);
  for (int s = 0; s < emb.num_states; ++s)
    for (int a = 0; a < policy.num_actions; ++a) {
      const Scalar w = policy.probs(s, a);
      if (w != Scalar(0))
        kernel.row(s) += w * emb.row(s, emb.action_projector[static_cast<std::size_t>(a)]);
    }
  return kernel;
}

/// Discounted state distribution d = (1 - gamma) mu0^T (I - gamma P_pi)^{-1},
/// by a dense LU solve of (I - gamma P_pi^T) d = (1 - gamma) mu0.
template <typename Scalar>
BasicOccupancyMeasure<Scalar> occupancy(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy,
                                        Scalar gamma) {
  detail::require_discount(gamma);
  const MatrixX<Scalar> kernel = policy_transition(emb, policy);
  const MatrixX<Scalar> system =
      MatrixX<Scalar>::Identity(emb.num_states, emb.num_states) - gamma * kernel.transpose();
  BasicOccupancyMeasure<Scalar> out;
  out.discount = gamma;
  out.dist = system.partialPivLu().solve((Scalar(1) - gamma) * emb.initial_dist);
  return out;
}

/// Prior-weighted average of per-embodiment occupancies at the set's discount.
template <typename Scalar>
BasicOccupancyMeasure<Scalar> mixture_occupancy(const BasicEmbodimentSet<Scalar>& set,
                                                const BasicTabularPolicy<Scalar>& policy) {
  BasicOccupancyMeasure<Scalar> out;
  out.discount = set.discount;
  out.dist = VectorX<Scalar>::Zero(set.num_states());
  for (int e = 0; e < set.size(); ++e)
    out.dist += set.prior(e) * occupancy(set.embodiments[static_cast<std::size_t>(e)], policy, set.discount).dist;
  return out;
}

/// V = (I - gamma P_pi)^{-1} r for a state-based reward.
template <typename Scalar>
VectorX<Scalar> state_values(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy,
                             const BasicRewardTable<Scalar>& reward, Scalar gamma) {
  detail::require_discount(gamma);
  reward.validate(emb.num_states);
  const MatrixX<Scalar> system =
      MatrixX<Scalar>::Identity(emb.num_states, emb.num_states) - gamma * policy_transition(emb, policy);
  return system.partialPivLu().solve(reward.values);
}

/// E[sum_t gamma^t r(s_t)] = <d, r> / (1 - gamma).
template <typename Scalar>
Scalar expected_return(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy,
                       const BasicRewardTable<Scalar>& reward, Scalar gamma) {
  reward.validate(emb.num_states);
  return occupancy(emb, policy, gamma).dist.dot(reward.values) / (Scalar(1) - gamma);
}

/// E[sum_{t<horizon} gamma^t r(s_t)], by propagating the exact state law.
template <typename Scalar>
Scalar truncated_return(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy,
                        const BasicRewardTable<Scalar>& reward, Scalar gamma, int horizon) {
  reward.validate(emb.num_states);
  const MatrixX<Scalar> kernel_t = policy_transition(emb, policy).transpose();
  VectorX<Scalar> law = emb.initial_dist;
  Scalar total = 0, weight = 1;
  for (int t = 0; t < horizon; ++t) {
    total += weight * law.dot(reward.values);
    law = kernel_t * law;
    weight *= gamma;
  }
  return total;
}

/// log[mu0(s0) prod_t pi(a_t|s_t) P_e(s_{t+1}|s_t, phi_e(a_t))], or impossible().
template <typename Scalar>
Scalar trajectory_logprob(const BasicEmbodiment<Scalar>& emb, const BasicTabularPolicy<Scalar>& policy,
                          const Trajectory& traj) {
  traj.validate(emb.num_states, policy.num_actions);
  const int skill = detail::skill_of(policy, traj);
  Scalar lp = safe_log(emb.initial_dist(traj.states.front()));
  for (int t = 0; t < traj.length() && !is_impossible(lp); ++t) {
    const int s = traj.states[static_cast<std::size_t>(t)];
    const int a = traj.actions[static_cast<std::size_t>(t)];
    lp += safe_log(policy.row(s, skill)(a));
    lp += safe_log(emb.prob(s, a, traj.states[static_cast<std::size_t>(t) + 1]));
  }
  return lp;
}

/// Log-probability of a trajectory under the average embodiment MDP.
template <typename Scalar>
Scalar mixture_trajectory_logprob(const BasicEmbodimentSet<Scalar>& set, const BasicTabularPolicy<Scalar>& policy,
                                  const Trajectory& traj) {
  VectorX<Scalar> terms(set.size());
  for (int e = 0; e < set.size(); ++e)
    terms(e) = safe_log(set.prior(e)) + trajectory_logprob(set.embodiments[static_cast<std::size_t>(e)], policy, traj);
  return log_sum_exp(terms);
}

/// Simulate `horizon` steps of `policy` on the embodiment with id `embodiment_id`.
template <typename Scalar>
Trajectory rollout(const BasicEmbodimentSet<Scalar>& set, const BasicTabularPolicy<Scalar>& policy, int embodiment_id,
                   int horizon, Rng& rng, std::optional<int> skill = std::nullopt) {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be at least 1");
  if (policy.uses_context()) throw std::invalid_argument("rollout: context-conditioned policies are driven by agents");
  if (policy.uses_skill() && !skill) throw std::invalid_argument("rollout: skill-conditioned policy needs a skill");
  const auto& emb = set.by_id(embodiment_id);
  const int z = skill.value_or(0);
  Trajectory traj;
  traj.embodiment_id = embodiment_id;
  traj.skill_id = skill;
  traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.actions.reserve(static_cast<std::size_t>(horizon));
  int s = rng.categorical(emb.initial_dist);
  traj.states.push_back(s);
  for (int t = 0; t < horizon; ++t) {
    const int a = rng.categorical(policy.row(s, z));
    s = rng.categorical(emb.row(s, emb.action_projector[static_cast<std::size_t>(a)]));
    traj.actions.push_back(a);
    traj.states.push_back(s);
  }
  return traj;
}

template <typename Scalar>
Trajectory rollout(const BasicEmbodimentSet<Scalar>& set, const BasicTabularPolicy<Scalar>& policy, int embodiment_id,
                   int horizon, std::uint64_t seed, std::optional<int> skill = std::nullopt) {
  Rng rng(seed);
  return rollout(set, policy, embodiment_id, horizon, rng, skill);
}

/// Visit every trajectory s0 a0 ... s_L of a finite space in lexicographic
/// order. `visit` receives the state and action prefix buffers.
template <typename Visit>
void for_each_trajectory(int num_states, int num_actions, int horizon, Visit&& visit) {
  Trajectory traj;
  traj.states.assign(static_cast<std::size_t>(horizon) + 1, 0);
  traj.actions.assign(static_cast<std::size_t>(horizon), 0);
  while (true) {
    visit(static_cast<const Trajectory&>(traj));
    // odometer increment over s0, a0, s1, ..., a_{L-1}, s_L (last digit fastest)
    int digit = 2 * horizon;
    while (digit >= 0) {
      const bool is_state = digit % 2 == 0;
      int& slot = is_state ? traj.states[static_cast<std::size_t>(digit / 2)]
                           : traj.actions[static_cast<std::size_t>(digit / 2)];
      const int base = is_state ? num_states : num_actions;
      if (++slot < base) break;
      slot = 0;
      --digit;
    }
    if (digit < 0) return;
  }
}

/// Number of trajectories in the horizon-L space: S (S A)^L.
inline double trajectory_space_size(int num_states, int num_actions, int horizon) {
  return num_states * std::pow(static_cast<double>(num_states) * num_actions, horizon);
}

/// Guard on the number of enumerated trajectories S (S A)^L.
inline constexpr double kMaxEnumeratedTrajectories = 2e5;

inline void require_enumerable(int num_states, int num_actions, int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const double n = trajectory_space_size(num_states, num_actions, horizon);
  if (n > kMaxEnumeratedTrajectories)
    throw SizeGuardError("trajectory space of size " + std::to_string(n) + " exceeds the guard of " +
                         std::to_string(kMaxEnumeratedTrajectories));
}

/// Log-probabilities of every trajectory of the horizon-L space (enumeration
/// order of for_each_trajectory) under each embodiment; one row per embodiment.
template <typename Scalar>
MatrixX<Scalar> enumerate_trajectory_logprobs(const BasicEmbodimentSet<Scalar>& set,
                                              const BasicTabularPolicy<Scalar>& policy, int horizon,
                                              std::optional<int> skill = std::nullopt) {
  set.validate();
  require_enumerable(set.num_states(), set.unified_num_actions, horizon);
  const auto n = static_cast<Eigen::Index>(trajectory_space_size(set.num_states(), set.unified_num_actions, horizon));
  MatrixX<Scalar> out(set.size(), n);
  Eigen::Index col = 0;
  for_each_trajectory(set.num_states(), set.unified_num_actions, horizon, [&](const Trajectory& t) {
    Trajectory traj = t;
    traj.skill_id = skill;
    for (int e = 0; e < set.size(); ++e)
      out(e, col) = trajectory_logprob(set.embodiments[static_cast<std::size_t>(e)], policy, traj);
    ++col;
  });
  return out;
}

}  // namespace ceurl
