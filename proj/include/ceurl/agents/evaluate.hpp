#pragma once

#include "ceurl/agents/agent.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ceurl {

/// Frozen-policy return of one embodiment: sum_{t < horizon} gamma^t r(s_t).
struct EmbodimentEvaluation {
  int embodiment_id = 0;
  int episodes = 0;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  /// Exact finite-horizon return; present when the policy has no context
  /// input (skill policies average uniformly over skills).
  std::optional<double> analytic_return;
  /// Exact infinite-horizon discounted return, under the same condition.
  std::optional<double> analytic_infinite_return;
};

struct EvalSettings {
  int episodes = 1000;
  int horizon = 40;
  double gamma = 0.99;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Evaluate on every embodiment of `set`, which may be a held-out set: the
/// agent's discriminator keeps its own embodiment classes.
std::vector<EmbodimentEvaluation> evaluate(const AgentState& agent, const EmbodimentSet& set,
                                           const RewardTable& reward, const EvalSettings& settings);

/// Meta-controller over the agent's frozen skills (Monte-Carlo only).
std::vector<EmbodimentEvaluation> evaluate(const MetaController& controller, const AgentState& skills,
                                           const EmbodimentSet& set, const RewardTable& reward,
                                           const EvalSettings& settings, int sub_horizon);

/// Prior-weighted mean of the analytic returns (Monte-Carlo means when the
/// analytic value is absent).
double mean_return(const std::vector<EmbodimentEvaluation>& evals, const EmbodimentSet& set);

}  // namespace ceurl
