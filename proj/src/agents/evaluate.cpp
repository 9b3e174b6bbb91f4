#include "ceurl/agents/evaluate.hpp"

#include "ceurl/core/parallel.hpp"
#include "loop.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ceurl {
namespace {

void summarize(EmbodimentEvaluation& ev, const std::vector<double>& returns) {
  const auto n = static_cast<double>(returns.size());
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  ev.episodes = static_cast<int>(returns.size());
  ev.mc_mean = mean;
  ev.mc_stderr = returns.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
}

std::vector<EmbodimentEvaluation> run_evaluation(const EmbodimentSet& set, const RewardTable& reward,
                                                 const EvalSettings& settings,
                                                 const std::function<double(int, Rng&)>& episode_return) {
  set.validate();
  reward.validate(set.num_states());
  if (settings.episodes < 1 || settings.horizon < 1) throw std::invalid_argument("evaluation needs episodes");
  const Rng root = Rng(settings.seed).fork(detail::kEvalStream);
  std::vector<EmbodimentEvaluation> out(static_cast<std::size_t>(set.size()));
  for (int p = 0; p < set.size(); ++p) {
    const Rng emb_rng = root.fork(static_cast<std::uint64_t>(p));
    std::vector<double> returns(static_cast<std::size_t>(settings.episodes));
    parallel_for(settings.episodes, settings.threads, [&](int i) {
      Rng rng = emb_rng.fork(static_cast<std::uint64_t>(i));
      returns[static_cast<std::size_t>(i)] = episode_return(p, rng);
    });
    auto& ev = out[static_cast<std::size_t>(p)];
    ev.embodiment_id = set.embodiments[static_cast<std::size_t>(p)].id;
    summarize(ev, returns);
  }
  return out;
}

}  // namespace

std::vector<EmbodimentEvaluation> evaluate(const AgentState& agent, const EmbodimentSet& set,
                                           const RewardTable& reward, const EvalSettings& settings) {
  if (agent.policy.num_states != set.num_states() || agent.policy.num_actions != set.unified_num_actions)
    throw std::invalid_argument("evaluate: agent and environment disagree on state or action counts");
  auto out = run_evaluation(set, reward, settings, [&](int p, Rng& rng) {
    const detail::Episode ep = detail::collect_episode(set, agent, p, settings.horizon, rng);
    double g = 0.0, discount = 1.0;
    for (int t = 0; t < settings.horizon; ++t) {
      g += discount * reward.values(ep.traj.states[static_cast<std::size_t>(t)]);
      discount *= settings.gamma;
    }
    return g;
  });
  if (!agent.policy.uses_context()) {
    const int k = agent.policy.num_skills;
    for (int p = 0; p < set.size(); ++p) {
      const auto& emb = set.embodiments[static_cast<std::size_t>(p)];
      double finite = 0.0, infinite = 0.0;
      for (int z = 0; z < k; ++z) {
        const TabularPolicy pi = agent.policy.slice(z);
        finite += truncated_return(emb, pi, reward, settings.gamma, settings.horizon) / k;
        infinite += expected_return(emb, pi, reward, settings.gamma) / k;
      }
      out[static_cast<std::size_t>(p)].analytic_return = finite;
      out[static_cast<std::size_t>(p)].analytic_infinite_return = infinite;
    }
  }
  return out;
}

std::vector<EmbodimentEvaluation> evaluate(const MetaController& controller, const AgentState& skills,
                                           const EmbodimentSet& set, const RewardTable& reward,
                                           const EvalSettings& settings, int sub_horizon) {
  controller.validate();
  if (controller.num_states != set.num_states() || controller.num_skills != skills.policy.num_skills)
    throw std::invalid_argument("evaluate: controller does not match the skills or environment");
  return run_evaluation(set, reward, settings, [&](int p, Rng& rng) {
    return detail::run_meta_episode(controller, skills, set, reward, p, settings.horizon, settings.gamma, sub_horizon,
                                    rng)
        .episode_return;
  });
}

double mean_return(const std::vector<EmbodimentEvaluation>& evals, const EmbodimentSet& set) {
  if (static_cast<int>(evals.size()) != set.size()) throw std::invalid_argument("mean_return: size mismatch");
  double total = 0.0;
  for (int p = 0; p < set.size(); ++p) {
    const auto& ev = evals[static_cast<std::size_t>(p)];
    total += set.prior(p) * ev.analytic_return.value_or(ev.mc_mean);
  }
  return total;
}

}  // namespace ceurl
