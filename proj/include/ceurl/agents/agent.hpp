#pragma once

#include "ceurl/agents/actor_critic.hpp"
#include "ceurl/core/mdp.hpp"
#include "ceurl/inference/discriminator.hpp"
#include "ceurl/rewards/intrinsic.hpp"
#include "ceurl/rewards/skill_discriminator.hpp"
#include "ceurl/rewards/surprise.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace ceurl {

struct TrainConfig {
  long pretrain_steps = 20000;
  long finetune_steps = 2000;
  int horizon = 40;
  double actor_lr = 0.1;
  double critic_lr = 0.2;
  double disc_lr = 0.5;
  double disc_l2 = 1e-4;
  double entropy = 0.01;
  double gamma = 0.99;
  /// KL weight of penalized fine-tuning
  double beta = 0.0;
  std::uint64_t seed = 0;
  IntrinsicRewardSpec reward;
  /// State or StateContext for PEAC; StateSkill or StateSkillContext for skills.
  Conditioning conditioning = Conditioning::State;
  int history_length = 8;
  /// Adds an order-free count of the window's (s, a, s') transitions to the
  /// discriminator features.
  bool transition_bag = true;
  int buffer_capacity = 512;
  /// Discriminator gradient steps per collection round.
  int disc_updates = 4;
  int disc_batch = 64;
  /// Posterior mass needed to commit to an embodiment bucket.
  double context_threshold = 0.6;
  /// Episodes per collection round; 0 means one per embodiment.
  int episodes_per_round = 0;
  int meta_sub_horizon = 5;
  double surprise_alpha = 1.0;
  /// Pre-training metrics are logged every this many environment steps.
  long log_interval = 1000;
  int threads = 1;

  ActorCriticParams actor_critic() const { return {actor_lr, critic_lr, entropy}; }
  void validate() const;
};

struct MetricRow {
  long step = 0;
  std::string metric;
  double value = 0.0;
};

/// Learner state shared by every training phase.
struct AgentState {
  TabularPolicy policy;
  /// Softmax parameters behind `policy`, same shape.
  Eigen::MatrixXd logits;
  /// Value per policy key.
  Eigen::VectorXd critic;
  LearnedDiscriminator discriminator;
  std::optional<SurpriseModel> surprise;
  std::optional<SkillDiscriminator> skill_discriminator;
  /// Most recent trajectories per embodiment position.
  std::vector<std::deque<Trajectory>> buffers;
  std::vector<int> embodiment_ids;
  double context_threshold = 0.6;
  long env_steps = 0;
  long rounds = 0;

  int num_embodiments() const { return static_cast<int>(embodiment_ids.size()); }
  /// Context bucket of a window: argmax embodiment, or num_embodiments() when
  /// the discriminator is not confident enough.
  int context_of(const HistoryWindow& window) const;
  void validate() const;
};

/// Fresh state: uniform policy, zero critic, untrained discriminators.
AgentState initial_state(const EmbodimentSet& set, const TrainConfig& config);

/// argmax if max >= threshold, else the extra "uncertain" bucket.
int context_bucket(const Eigen::VectorXd& posterior, double threshold);

struct TrainResult {
  AgentState state;
  std::vector<MetricRow> metrics;
};

/// Reward-free pre-training on R_CE (optionally plus surprise).
TrainResult pretrain_peac(const EmbodimentSet& set, const TrainConfig& config);

/// Skill pre-training on R_CE + R_DIAYN; K = config.reward.num_skills.
TrainResult pretrain_peac_diayn(const EmbodimentSet& set, const TrainConfig& config);

enum class FinetuneMode { InitOnly, KlPenalized };

std::string to_string(FinetuneMode mode);
FinetuneMode parse_finetune_mode(const std::string& name);

/// Actor-critic on an extrinsic state reward, starting from `start`. The
/// critic is reset; in KL-penalized mode each actor step is followed by a
/// proximal step toward the frozen starting policy with weight
/// actor_lr * beta.
TrainResult finetune(const AgentState& start, const EmbodimentSet& set, const RewardTable& reward,
                     const TrainConfig& config, FinetuneMode mode = FinetuneMode::InitOnly);

/// Skill selector pi(z | context, s) over a frozen skill-conditioned policy.
struct MetaController {
  int num_states = 0;
  int num_skills = 0;
  int num_contexts = 1;
  /// Row context * num_states + state.
  Eigen::MatrixXd logits;
  Eigen::MatrixXd probs;
  Eigen::VectorXd critic;

  int key(int state, int context = 0) const { return context * num_states + state; }
  auto row(int state, int context = 0) const { return probs.row(key(state, context)); }
  void validate() const;
};

struct MetaResult {
  MetaController controller;
  std::vector<MetricRow> metrics;
};

/// Semi-MDP actor-critic over skills: each chosen skill runs for
/// config.meta_sub_horizon steps (or until the episode ends).
MetaResult finetune_meta_controller(const AgentState& skills, const EmbodimentSet& set, const RewardTable& reward,
                                    const TrainConfig& config);

}  // namespace ceurl
