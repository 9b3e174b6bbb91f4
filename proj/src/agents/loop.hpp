#pragma once

// Collection and update helpers shared by the training phases.

#include "ceurl/agents/agent.hpp"

#include <vector>

namespace ceurl::detail {

/// Stream tags keep the phases of one seed on independent streams.
enum StreamTag : std::uint64_t { kPretrainStream = 1, kFinetuneStream = 2, kMetaStream = 3, kEvalStream = 4 };

struct Episode {
  int position = 0;  // embodiment position in the set
  Trajectory traj;
  /// Context bucket at every visited state (length T + 1).
  std::vector<int> contexts;
};

/// Smooth weighted round-robin: `n` embodiment positions following `prior`
/// exactly in the long run. `credit` carries over between rounds.
std::vector<int> schedule_round(std::vector<double>& credit, const Eigen::VectorXd& prior, int n);

/// One episode of the agent's policy on the embodiment at `position`. Skill
/// conditioned policies draw their skill uniformly from `rng` first.
Episode collect_episode(const EmbodimentSet& set, const AgentState& state, int position, int horizon, Rng& rng);

/// Episodes for the given slots, collected on up to `threads` workers. Slot j
/// uses stream rng.fork(j), so the result is independent of the thread count.
std::vector<Episode> collect_round(const EmbodimentSet& set, const AgentState& state,
                                   const std::vector<int>& positions, int horizon, const Rng& rng, int threads);

void push_to_buffers(AgentState& state, const std::vector<Episode>& episodes, int capacity);

/// Labelled windows drawn from the buffers: embodiment by the prior (restricted
/// to non-empty buffers), then a trajectory, then an end time in [1, T].
std::vector<LabeledWindow> sample_windows(const AgentState& state, const Eigen::VectorXd& prior, int count,
                                          int history_length, int num_states, int num_actions, Rng& rng);

std::vector<SkillExample> sample_skill_examples(const AgentState& state, const Eigen::VectorXd& prior, int count,
                                                Rng& rng);

/// TD and actor step on one transition; returns the TD error.
double ac_step(AgentState& state, int key, int action, double reward, int next_key, double gamma,
               const ActorCriticParams& params);

int skill_of(const Episode& ep);

/// One skill choice of a meta-controller episode.
struct Decision {
  int key = 0;
  int skill = 0;
  /// sum_{i < duration} gamma^i r(s_{t+i})
  double discounted_reward = 0.0;
  int duration = 0;
  int next_key = 0;
};

struct MetaEpisode {
  std::vector<Decision> decisions;
  double episode_return = 0.0;
};

MetaEpisode run_meta_episode(const MetaController& mc, const AgentState& skills, const EmbodimentSet& set,
                             const RewardTable& reward, int position, int horizon, double gamma, int sub_horizon,
                             Rng& rng);

}  // namespace ceurl::detail
