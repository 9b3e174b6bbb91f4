#include "ceurl/agents/agent.hpp"

#include "ceurl/core/parallel.hpp"
#include "loop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceurl {

void TrainConfig::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (pretrain_steps < 1 || finetune_steps < 1) throw std::invalid_argument("step budgets must be positive");
  if (finetune_steps > pretrain_steps)
    throw std::invalid_argument("finetune_steps must not exceed pretrain_steps");
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (!positive(actor_lr) || !positive(critic_lr) || !positive(disc_lr))
    throw std::invalid_argument("learning rates must be positive");
  if (!(entropy >= 0.0) || !(disc_l2 >= 0.0)) throw std::invalid_argument("entropy and l2 must be nonnegative");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and nonnegative");
  if (history_length < 1 || buffer_capacity < 1 || disc_updates < 0 || disc_batch < 1)
    throw std::invalid_argument("bad discriminator or buffer settings");
  if (!(context_threshold > 0.0 && context_threshold <= 1.0))
    throw std::invalid_argument("context_threshold must lie in (0, 1]");
  if (episodes_per_round < 0 || meta_sub_horizon < 1 || log_interval < 1 || threads < 1)
    throw std::invalid_argument("bad scheduling settings");
  if (!positive(surprise_alpha)) throw std::invalid_argument("surprise_alpha must be positive");
  reward.validate();
}

int context_bucket(const Eigen::VectorXd& posterior, double threshold) {
  Eigen::Index best = 0;
  const double top = posterior.maxCoeff(&best);
  return top >= threshold ? static_cast<int>(best) : static_cast<int>(posterior.size());
}

int AgentState::context_of(const HistoryWindow& window) const {
  if (num_embodiments() <= 1) return 0;
  return context_bucket(embodiment_context(discriminator, window), context_threshold);
}

void AgentState::validate() const {
  policy.validate();
  if (logits.rows() != policy.probs.rows() || logits.cols() != policy.probs.cols())
    throw std::invalid_argument("agent: logits do not match the policy table");
  if (critic.size() != policy.num_keys()) throw std::invalid_argument("agent: critic does not match the policy keys");
  if (buffers.size() != embodiment_ids.size()) throw std::invalid_argument("agent: one buffer per embodiment");
  if (discriminator.num_embodiments() != num_embodiments())
    throw std::invalid_argument("agent: discriminator class count mismatch");
  if (surprise) surprise->validate();
}

AgentState initial_state(const EmbodimentSet& set, const TrainConfig& config) {
  set.validate();
  AgentState st;
  const int m = set.size();
  const bool skills = config.conditioning == Conditioning::StateSkill ||
                      config.conditioning == Conditioning::StateSkillContext;
  const bool context = config.conditioning == Conditioning::StateContext ||
                       config.conditioning == Conditioning::StateSkillContext;
  st.policy = TabularPolicy::uniform(set.num_states(), set.unified_num_actions, config.conditioning,
                                     skills ? config.reward.num_skills : 1, context ? m + 1 : 1);
  st.logits = Eigen::MatrixXd::Zero(st.policy.probs.rows(), st.policy.probs.cols());
  st.critic = Eigen::VectorXd::Zero(st.policy.num_keys());
  WindowFeatureSpec spec{set.num_states(), set.unified_num_actions, config.history_length, config.transition_bag};
  st.discriminator = LearnedDiscriminator(spec, m, config.disc_lr, config.disc_l2);
  if (config.reward.has_lbs())
    st.surprise = SurpriseModel(set.num_states(), set.unified_num_actions, config.surprise_alpha);
  if (config.reward.has_diayn())
    st.skill_discriminator =
        SkillDiscriminator(set.num_states(), config.reward.num_skills, m, 0, config.disc_lr, config.disc_l2);
  st.buffers.resize(static_cast<std::size_t>(m));
  for (const auto& e : set.embodiments) st.embodiment_ids.push_back(e.id);
  st.context_threshold = config.context_threshold;
  return st;
}

std::string to_string(FinetuneMode mode) { return mode == FinetuneMode::InitOnly ? "init-only" : "kl-penalized"; }

FinetuneMode parse_finetune_mode(const std::string& name) {
  if (name == "init-only") return FinetuneMode::InitOnly;
  if (name == "kl-penalized") return FinetuneMode::KlPenalized;
  throw std::invalid_argument("unknown fine-tuning mode '" + name + "'");
}

void MetaController::validate() const {
  if (probs.rows() != static_cast<Eigen::Index>(num_states) * num_contexts || probs.cols() != num_skills)
    throw std::invalid_argument("meta-controller: table shape mismatch");
  for (Eigen::Index r = 0; r < probs.rows(); ++r)
    if (!detail::is_distribution(probs.row(r).transpose(), 1e-12))
      throw std::invalid_argument("meta-controller: row is not a distribution");
}

namespace detail {

std::vector<int> schedule_round(std::vector<double>& credit, const Eigen::VectorXd& prior, int n) {
  credit.resize(static_cast<std::size_t>(prior.size()), 0.0);
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    int best = 0;
    for (int e = 0; e < prior.size(); ++e) {
      credit[static_cast<std::size_t>(e)] += prior(e);
      if (credit[static_cast<std::size_t>(e)] > credit[static_cast<std::size_t>(best)]) best = e;
    }
    credit[static_cast<std::size_t>(best)] -= 1.0;
    out.push_back(best);
  }
  return out;
}

Episode collect_episode(const EmbodimentSet& set, const AgentState& state, int position, int horizon, Rng& rng) {
  const auto& emb = set.embodiments[static_cast<std::size_t>(position)];
  const auto& policy = state.policy;
  const int s_count = set.num_states(), a_count = set.unified_num_actions;
  Episode ep;
  ep.position = position;
  ep.traj.embodiment_id = emb.id;
  if (policy.uses_skill()) ep.traj.skill_id = rng.below(policy.num_skills);
  const int z = ep.traj.skill_id.value_or(0);
  const int history = state.discriminator.spec().history_length;
  auto context_at = [&](int t) {
    return policy.uses_context() ? state.context_of(HistoryWindow::of(ep.traj, t, history, s_count, a_count)) : 0;
  };

  int s = rng.categorical(emb.initial_dist);
  ep.traj.states.push_back(s);
  for (int t = 0; t < horizon; ++t) {
    const int c = context_at(t);
    ep.contexts.push_back(c);
    const int a = rng.categorical(policy.row(s, z, c));
    s = rng.categorical(emb.row(s, emb.action_projector[static_cast<std::size_t>(a)]));
    ep.traj.actions.push_back(a);
    ep.traj.states.push_back(s);
  }
  ep.contexts.push_back(context_at(horizon));
  return ep;
}

std::vector<Episode> collect_round(const EmbodimentSet& set, const AgentState& state,
                                   const std::vector<int>& positions, int horizon, const Rng& rng, int threads) {
  std::vector<Episode> out(positions.size());
  parallel_for(static_cast<int>(positions.size()), threads, [&](int j) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(j));
    out[static_cast<std::size_t>(j)] =
        collect_episode(set, state, positions[static_cast<std::size_t>(j)], horizon, stream);
  });
  return out;
}

void push_to_buffers(AgentState& state, const std::vector<Episode>& episodes, int capacity) {
  for (const auto& ep : episodes) {
    auto& buf = state.buffers[static_cast<std::size_t>(ep.position)];
    buf.push_back(ep.traj);
    while (static_cast<int>(buf.size()) > capacity) buf.pop_front();
  }
}

namespace {

int pick_embodiment(const AgentState& state, const Eigen::VectorXd& prior, Rng& rng) {
  Eigen::VectorXd w = prior;
  for (int e = 0; e < w.size(); ++e)
    if (state.buffers[static_cast<std::size_t>(e)].empty()) w(e) = 0.0;
  if (!(w.sum() > 0.0)) throw std::logic_error("no trajectories to sample from");
  return rng.categorical(w);
}

}  // namespace

std::vector<LabeledWindow> sample_windows(const AgentState& state, const Eigen::VectorXd& prior, int count,
                                          int history_length, int num_states, int num_actions, Rng& rng) {
  std::vector<LabeledWindow> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int e = pick_embodiment(state, prior, rng);
    const auto& buf = state.buffers[static_cast<std::size_t>(e)];
    const auto& traj = buf[static_cast<std::size_t>(rng.below(static_cast<int>(buf.size())))];
    const int t = 1 + rng.below(traj.length());
    out.push_back({HistoryWindow::of(traj, t, history_length, num_states, num_actions), e});
  }
  return out;
}

std::vector<SkillExample> sample_skill_examples(const AgentState& state, const Eigen::VectorXd& prior, int count,
                                                Rng& rng) {
  std::vector<SkillExample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int e = pick_embodiment(state, prior, rng);
    const auto& buf = state.buffers[static_cast<std::size_t>(e)];
    const auto& traj = buf[static_cast<std::size_t>(rng.below(static_cast<int>(buf.size())))];
    const int t = 1 + rng.below(traj.length());
    out.push_back({traj.states[static_cast<std::size_t>(t)], 0, traj.skill_id.value_or(0), e});
  }
  return out;
}

double ac_step(AgentState& state, int key, int action, double reward, int next_key, double gamma,
               const ActorCriticParams& params) {
  const double delta = td_update(state.critic, key, reward, gamma, next_key, params.critic_lr);
  state.policy.probs.row(key) = actor_update(state.logits, key, action, delta, params).transpose();
  return delta;
}

int skill_of(const Episode& ep) { return ep.traj.skill_id.value_or(0); }

}  // namespace detail
}  // namespace ceurl
