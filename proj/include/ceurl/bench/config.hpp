#pragma once

#include "ceurl/agents/agent.hpp"
#include "ceurl/agents/evaluate.hpp"
#include "ceurl/bench/envs.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace ceurl::bench {

/// Parse failure; what() carries "origin:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

std::string to_string(Conditioning mode);
Conditioning parse_conditioning(const std::string& name);

/// A complete experiment description.
///
/// File format: `[section]` headers and `key = value` lines; `#` starts a
/// comment. Sections are env, pretrain, finetune, eval and run. Every key is
/// optional, unknown sections and keys are errors, and a key may appear once.
///
///   [env]       family, rows, cols, layout, disabled_actions (comma list),
///               slip_probs (comma list), permutations (';'-separated groups of
///               four moves), prior (comma list), start / goal ("row,col"),
///               discount, held_out (true splits train / held-out)
///   [pretrain]  steps, horizon, reward (ce, lbs, diayn, ce+lbs, ce+diayn),
///               conditioning (state, state-context, state-skill,
///               state-skill-context), num_skills, ce_weight, lbs_weight,
///               diayn_weight, actor_lr, critic_lr, disc_lr, disc_l2, entropy,
///               gamma, history_length, transition_bag, buffer_capacity,
///               disc_updates, disc_batch, context_threshold,
///               episodes_per_round, surprise_alpha, log_interval
///   [finetune]  tasks (comma list of goal, corridor, anti-goal), steps,
///               mode (init-only, kl-penalized), beta, scratch_baseline,
///               meta_sub_horizon
///   [eval]      episodes, horizon, gamma
///   [run]       seed, threads
struct ExperimentConfig {
  EnvSpec env;
  bool held_out = false;
  /// Pre-training and shared learner settings; finetune_steps and beta come
  /// from [finetune].
  TrainConfig train;
  std::vector<std::string> tasks{"goal"};
  FinetuneMode finetune_mode = FinetuneMode::InitOnly;
  bool scratch_baseline = true;
  EvalSettings eval;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form: every key in a fixed order with round-trip reals.
/// parse_config(to_config_text(c)) reproduces c except for the thread count,
/// which never changes results and is left out. Run ids hash this text.
std::string to_config_text(const ExperimentConfig& config);

}  // namespace ceurl::bench
