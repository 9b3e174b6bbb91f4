#include "ceurl/agents/agent.hpp"

#include "loop.hpp"

#include <stdexcept>

namespace ceurl {
namespace {

struct RewardTotals {
  double intrinsic = 0.0, ce = 0.0, lbs = 0.0, diayn = 0.0, disc_loss = 0.0, skill_loss = 0.0;
  long transitions = 0;
  int disc_steps = 0, skill_steps = 0;
};

void emit(std::vector<MetricRow>& rows, long step, const RewardTotals& tot, const IntrinsicRewardSpec& spec) {
  const double n = static_cast<double>(std::max(1L, tot.transitions));
  rows.push_back({step, "pretrain/intrinsic_reward", tot.intrinsic / n});
  if (spec.has_ce()) rows.push_back({step, "pretrain/ce_reward", tot.ce / n});
  if (spec.has_lbs()) rows.push_back({step, "pretrain/lbs_reward", tot.lbs / n});
  if (spec.has_diayn()) rows.push_back({step, "pretrain/diayn_reward", tot.diayn / n});
  if (tot.disc_steps > 0) rows.push_back({step, "pretrain/disc_loss", tot.disc_loss / tot.disc_steps});
  if (tot.skill_steps > 0) rows.push_back({step, "pretrain/skill_disc_loss", tot.skill_loss / tot.skill_steps});
}

TrainResult pretrain(const EmbodimentSet& set, const TrainConfig& config) {
  config.validate();
  TrainResult out;
  out.state = initial_state(set, config);
  AgentState& st = out.state;
  const IntrinsicRewardSpec& spec = config.reward;
  const int m = set.size(), s_count = set.num_states(), a_count = set.unified_num_actions;
  const int per_round = config.episodes_per_round > 0 ? config.episodes_per_round : m;
  const ActorCriticParams params = config.actor_critic();
  const Rng root = Rng(config.seed).fork(detail::kPretrainStream);
  const bool train_disc = spec.has_ce() && m > 1;

  std::vector<double> credit;
  RewardTotals tot;
  long next_log = config.log_interval;
  while (st.env_steps < config.pretrain_steps) {
    const Rng round_rng = root.fork(static_cast<std::uint64_t>(st.rounds));
    const auto positions = detail::schedule_round(credit, set.prior, per_round);
    const auto episodes = detail::collect_round(set, st, positions, config.horizon, round_rng.fork(0), config.threads);
    detail::push_to_buffers(st, episodes, config.buffer_capacity);

    Rng update_rng = round_rng.fork(1);
    if (train_disc)
      for (int u = 0; u < config.disc_updates; ++u) {
        const auto batch = detail::sample_windows(st, set.prior, config.disc_batch, config.history_length, s_count,
                                                  a_count, update_rng);
        tot.disc_loss += st.discriminator.train(batch);
        ++tot.disc_steps;
      }
    if (st.skill_discriminator)
      for (int u = 0; u < config.disc_updates; ++u) {
        const auto batch = detail::sample_skill_examples(st, set.prior, config.disc_batch, update_rng);
        tot.skill_loss += st.skill_discriminator->train(batch);
        ++tot.skill_steps;
      }

    for (const auto& ep : episodes) {
      const int z = detail::skill_of(ep);
      const int id = ep.traj.embodiment_id;
      for (int t = 0; t < ep.traj.length(); ++t) {
        const auto k = static_cast<std::size_t>(t);
        const int s = ep.traj.states[k], a = ep.traj.actions[k], s_next = ep.traj.states[k + 1];
        RewardComponents c;
        if (spec.has_ce())
          c.ce = m > 1 ? r_ce_step(st.discriminator.classify(
                                       HistoryWindow::of(ep.traj, t + 1, config.history_length, s_count, a_count)),
                                   set, id)
                       : 0.0;
        if (spec.has_lbs()) c.lbs = r_surprise(*st.surprise, {s, a, s_next});
        if (spec.has_diayn()) c.diayn = r_diayn(*st.skill_discriminator, s_next, z);
        const double r = combined_reward(spec, c);
        tot.intrinsic += r;
        tot.ce += c.ce;
        tot.lbs += c.lbs;
        tot.diayn += c.diayn;
        ++tot.transitions;
        detail::ac_step(st, st.policy.key(s, z, ep.contexts[k]), a, r, st.policy.key(s_next, z, ep.contexts[k + 1]),
                        config.gamma, params);
      }
    }
    st.env_steps += static_cast<long>(per_round) * config.horizon;
    ++st.rounds;
    if (st.env_steps >= next_log || st.env_steps >= config.pretrain_steps) {
      emit(out.metrics, st.env_steps, tot, spec);
      tot = RewardTotals{};
      while (next_log <= st.env_steps) next_log += config.log_interval;
    }
  }
  return out;
}

}  // namespace

TrainResult pretrain_peac(const EmbodimentSet& set, const TrainConfig& config) {
  const RewardKind k = config.reward.kind;
  if (k != RewardKind::CE && k != RewardKind::CE_LBS)
    throw std::invalid_argument("PEAC pre-training takes the ce or ce+lbs reward");
  if (config.conditioning != Conditioning::State && config.conditioning != Conditioning::StateContext)
    throw std::invalid_argument("PEAC pre-training takes state or state-context conditioning");
  return pretrain(set, config);
}

TrainResult pretrain_peac_diayn(const EmbodimentSet& set, const TrainConfig& config) {
  if (config.reward.num_skills < 2) throw std::invalid_argument("skill pre-training needs at least two skills");
  if (config.reward.kind != RewardKind::CE_DIAYN && config.reward.kind != RewardKind::DIAYN)
    throw std::invalid_argument("skill pre-training takes the ce+diayn or diayn reward");
  if (config.conditioning != Conditioning::StateSkill && config.conditioning != Conditioning::StateSkillContext)
    throw std::invalid_argument("skill pre-training takes state-skill or state-skill-context conditioning");
  return pretrain(set, config);
}

}  // namespace ceurl
