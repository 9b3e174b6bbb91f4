#include "ceurl/agents/agent.hpp"

#include "ceurl/core/parallel.hpp"
#include "loop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceurl {

TrainResult finetune(const AgentState& start, const EmbodimentSet& set, const RewardTable& reward,
                     const TrainConfig& config, FinetuneMode mode) {
  config.validate();
  set.validate();
  reward.validate(set.num_states());
  if (start.policy.num_states != set.num_states() || start.policy.num_actions != set.unified_num_actions)
    throw std::invalid_argument("fine-tuning: agent and environment disagree on state or action counts");

  TrainResult out;
  out.state = start;
  AgentState& st = out.state;
  st.critic.setZero();
  const Eigen::MatrixXd anchor = start.policy.probs;
  const double lambda = mode == FinetuneMode::KlPenalized ? config.actor_lr * config.beta : 0.0;
  const ActorCriticParams params = config.actor_critic();
  const int per_round = config.episodes_per_round > 0 ? config.episodes_per_round : set.size();
  const Rng root = Rng(config.seed).fork(detail::kFinetuneStream);

  std::vector<double> credit;
  long steps = 0, round = 0;
  while (steps < config.finetune_steps) {
    const Rng round_rng = root.fork(static_cast<std::uint64_t>(round));
    const auto positions = detail::schedule_round(credit, set.prior, per_round);
    const auto episodes = detail::collect_round(set, st, positions, config.horizon, round_rng, config.threads);
    double total_return = 0.0;
    for (const auto& ep : episodes) {
      const int z = detail::skill_of(ep);
      double discount = 1.0;
      for (int t = 0; t < ep.traj.length(); ++t) {
        const auto k = static_cast<std::size_t>(t);
        const int s = ep.traj.states[k];
        const double r = reward.values(s);
        total_return += discount * r;
        discount *= config.gamma;
        const int key = st.policy.key(s, z, ep.contexts[k]);
        detail::ac_step(st, key, ep.traj.actions[k], r, st.policy.key(ep.traj.states[k + 1], z, ep.contexts[k + 1]),
                        config.gamma, params);
        if (lambda > 0.0) {
          st.logits.row(key) =
              kl_proximal_step(st.logits.row(key).transpose(), anchor.row(key).transpose(), lambda).transpose();
          st.policy.probs.row(key) = softmax(st.logits.row(key).transpose()).transpose();
        }
      }
    }
    steps += static_cast<long>(per_round) * config.horizon;
    ++round;
    out.metrics.push_back({steps, "finetune/return", total_return / static_cast<double>(episodes.size())});
  }
  return out;
}

namespace detail {

MetaEpisode run_meta_episode(const MetaController& mc, const AgentState& skills, const EmbodimentSet& set,
                             const RewardTable& reward, int position, int horizon, double gamma, int sub_horizon,
                             Rng& rng) {
  const int s_count = set.num_states(), a_count = set.unified_num_actions;
  const int m = skills.num_embodiments();
  const int history = skills.discriminator.spec().history_length;
  const auto& emb = set.embodiments[static_cast<std::size_t>(position)];
  MetaEpisode ep;
  Trajectory traj;
  traj.embodiment_id = emb.id;
  auto context_at = [&](int t) {
    return m > 1 ? skills.context_of(HistoryWindow::of(traj, t, history, s_count, a_count)) : 0;
  };
  int s = rng.categorical(emb.initial_dist);
  traj.states.push_back(s);
  int t = 0;
  double discount_total = 1.0;
  while (t < horizon) {
    Decision d;
    d.key = mc.key(s, std::min(context_at(t), mc.num_contexts - 1));
    d.skill = rng.categorical(mc.probs.row(d.key));
    double discount = 1.0;
    for (int i = 0; i < sub_horizon && t < horizon; ++i, ++t) {
      d.discounted_reward += discount * reward.values(s);
      ep.episode_return += discount_total * reward.values(s);
      discount *= gamma;
      discount_total *= gamma;
      const int c = skills.policy.uses_context() ? context_at(t) : 0;
      const int a = rng.categorical(skills.policy.row(s, d.skill, c));
      s = rng.categorical(emb.row(s, emb.action_projector[static_cast<std::size_t>(a)]));
      traj.actions.push_back(a);
      traj.states.push_back(s);
      ++d.duration;
    }
    d.next_key = mc.key(s, std::min(context_at(t), mc.num_contexts - 1));
    ep.decisions.push_back(d);
  }
  return ep;
}

}  // namespace detail

MetaResult finetune_meta_controller(const AgentState& skills, const EmbodimentSet& set, const RewardTable& reward,
                                    const TrainConfig& config) {
  config.validate();
  set.validate();
  reward.validate(set.num_states());
  if (!skills.policy.uses_skill()) throw std::invalid_argument("meta-controller needs a skill-conditioned agent");
  if (skills.policy.num_states != set.num_states() || skills.policy.num_actions != set.unified_num_actions)
    throw std::invalid_argument("meta-controller: agent and environment disagree on state or action counts");

  const int m = skills.num_embodiments();
  MetaResult out;
  MetaController& mc = out.controller;
  mc.num_states = set.num_states();
  mc.num_skills = skills.policy.num_skills;
  mc.num_contexts = m > 1 ? m + 1 : 1;
  mc.logits = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mc.num_states) * mc.num_contexts, mc.num_skills);
  mc.probs = Eigen::MatrixXd::Constant(mc.logits.rows(), mc.num_skills, 1.0 / mc.num_skills);
  mc.critic = Eigen::VectorXd::Zero(mc.logits.rows());

  const ActorCriticParams params = config.actor_critic();
  const int per_round = config.episodes_per_round > 0 ? config.episodes_per_round : set.size();
  const Rng root = Rng(config.seed).fork(detail::kMetaStream);

  std::vector<double> credit;
  long steps = 0, round = 0;
  while (steps < config.finetune_steps) {
    const Rng round_rng = root.fork(static_cast<std::uint64_t>(round));
    const auto positions = detail::schedule_round(credit, set.prior, per_round);
    std::vector<detail::MetaEpisode> episodes(positions.size());
    parallel_for(static_cast<int>(positions.size()), config.threads, [&](int j) {
      Rng stream = round_rng.fork(static_cast<std::uint64_t>(j));
      episodes[static_cast<std::size_t>(j)] =
          detail::run_meta_episode(mc, skills, set, reward, positions[static_cast<std::size_t>(j)], config.horizon,
                                   config.gamma, config.meta_sub_horizon, stream);
    });
    double total_return = 0.0;
    for (const auto& ep : episodes) {
      total_return += ep.episode_return;
      for (const auto& d : ep.decisions) {
        const double delta = td_update(mc.critic, d.key, d.discounted_reward, std::pow(config.gamma, d.duration),
                                       d.next_key, params.critic_lr);
        mc.probs.row(d.key) = actor_update(mc.logits, d.key, d.skill, delta, params).transpose();
      }
    }
    steps += static_cast<long>(per_round) * config.horizon;
    ++round;
    out.metrics.push_back({steps, "meta/return", total_return / static_cast<double>(episodes.size())});
  }
  return out;
}

}  // namespace ceurl
