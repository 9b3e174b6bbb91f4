#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ceurl {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when an exhaustive enumeration would exceed its size guard.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {

template <typename Derived>
bool is_distribution(const Eigen::MatrixBase<Derived>& v, double tol) {
  if (v.size() == 0) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = static_cast<double>(v(i));
    if (!std::isfinite(x) || x < 0.0) return false;
  }
  return std::abs(static_cast<double>(v.sum()) - 1.0) <= tol;
}

}  // namespace detail

/// One controlled MDP of a cross-embodiment family.
///
/// States live in the family-wide union index space, so every embodiment of a
/// set has the same `num_states`. Native actions are embodiment-specific and
/// reached from the shared unified action set through `action_projector`.
template <typename Scalar>
struct BasicEmbodiment {
  int id = 0;
  int num_states = 0;
  int num_actions = 0;  // native
  /// Row `s * num_actions + a` is P(. | s, a) over next states.
  MatrixX<Scalar> transition;
  VectorX<Scalar> initial_dist;
  /// unified action -> native action
  std::vector<int> action_projector;

  auto row(int state, int native_action) const {
    return transition.row(static_cast<Eigen::Index>(state) * num_actions + native_action);
  }

  Scalar prob(int state, int unified_action, int next_state) const {
    return transition(static_cast<Eigen::Index>(state) * num_actions +
                          action_projector[static_cast<std::size_t>(unified_action)],
                      next_state);
  }

  void validate(int unified_num_actions) const {
    if (num_states <= 0 || num_actions <= 0)
      throw std::invalid_argument("embodiment " + std::to_string(id) + ": empty state or action space");
    if (transition.rows() != static_cast<Eigen::Index>(num_states) * num_actions ||
        transition.cols() != num_states)
      throw std::invalid_argument("embodiment " + std::to_string(id) + ": transition shape mismatch");
    for (Eigen::Index r = 0; r < transition.rows(); ++r)
      if (!detail::is_distribution(transition.row(r).transpose(), 1e-12))
        throw std::invalid_argument("embodiment " + std::to_string(id) + ": transition row " +
                                    std::to_string(r) + " is not a distribution");
    if (initial_dist.size() != num_states || !detail::is_distribution(initial_dist, 1e-12))
      throw std::invalid_argument("embodiment " + std::to_string(id) + ": bad initial distribution");
    if (action_projector.size() != static_cast<std::size_t>(unified_num_actions))
      throw std::invalid_argument("embodiment " + std::to_string(id) + ": projector is not total");
    for (int a : action_projector)
      if (a < 0 || a >= num_actions)
        throw std::invalid_argument("embodiment " + std::to_string(id) + ": projector target out of range");
  }
};

/// A finite embodiment distribution sharing one unified action space.
template <typename Scalar>
struct BasicEmbodimentSet {
  std::vector<BasicEmbodiment<Scalar>> embodiments;
  VectorX<Scalar> prior;
  int unified_num_actions = 0;
  Scalar discount = Scalar(0.9);

  int size() const { return static_cast<int>(embodiments.size()); }
  int num_states() const { return embodiments.empty() ? 0 : embodiments.front().num_states; }

  /// Position of the embodiment with the given id.
  int index_of(int id) const {
    for (int i = 0; i < size(); ++i)
      if (embodiments[static_cast<std::size_t>(i)].id == id) return i;
    throw std::out_of_range("no embodiment with id " + std::to_string(id));
  }

  const BasicEmbodiment<Scalar>& by_id(int id) const {
    return embodiments[static_cast<std::size_t>(index_of(id))];
  }

  void validate() const {
    if (embodiments.empty()) throw std::invalid_argument("embodiment set is empty");
    if (!(discount > Scalar(0) && discount < Scalar(1)))
      throw std::invalid_argument("discount must lie strictly inside (0, 1)");
    if (prior.size() != size() || !detail::is_distribution(prior, 1e-12))
      throw std::invalid_argument("embodiment prior is not a distribution");
    for (std::size_t i = 0; i < embodiments.size(); ++i) {
      embodiments[i].validate(unified_num_actions);
      if (embodiments[i].num_states != num_states())
        throw std::invalid_argument("embodiments disagree on the union state space size");
      for (std::size_t j = 0; j < i; ++j)
        if (embodiments[j].id == embodiments[i].id)
          throw std::invalid_argument("duplicate embodiment id " + std::to_string(embodiments[i].id));
    }
  }
};

enum class Conditioning { State, StateSkill, StateContext, StateSkillContext };

/// Tabular stochastic policy over the unified action set.
///
/// Rows are keyed by (state, skill, context); dimensions a mode does not use
/// have extent 1. Key layout: (state * num_skills + skill) * num_contexts + context.
template <typename Scalar>
struct BasicTabularPolicy {
  Conditioning mode = Conditioning::State;
  int num_states = 0;
  int num_actions = 0;
  int num_skills = 1;
  int num_contexts = 1;
  MatrixX<Scalar> probs;

  static BasicTabularPolicy uniform(int states, int actions, Conditioning mode = Conditioning::State,
                                    int skills = 1, int contexts = 1) {
    BasicTabularPolicy p;
    p.mode = mode;
    p.num_states = states;
    p.num_actions = actions;
    p.num_skills = skills;
    p.num_contexts = contexts;
    p.probs = MatrixX<Scalar>::Constant(static_cast<Eigen::Index>(states) * skills * contexts, actions,
                                        Scalar(1) / Scalar(actions));
    return p;
  }

  /// State-only policy choosing `choice[s]` with probability one.
  static BasicTabularPolicy deterministic(const std::vector<int>& choice, int actions) {
    auto p = uniform(static_cast<int>(choice.size()), actions);
    p.probs.setZero();
    for (std::size_t s = 0; s < choice.size(); ++s) p.probs(static_cast<Eigen::Index>(s), choice[s]) = Scalar(1);
    return p;
  }

  bool uses_skill() const { return mode == Conditioning::StateSkill || mode == Conditioning::StateSkillContext; }
  bool uses_context() const {
    return mode == Conditioning::StateContext || mode == Conditioning::StateSkillContext;
  }

  int num_keys() const { return num_states * num_skills * num_contexts; }
  int key(int state, int skill = 0, int context = 0) const {
    return (state * num_skills + skill) * num_contexts + context;
  }
  auto row(int state, int skill = 0, int context = 0) const { return probs.row(key(state, skill, context)); }
  auto row(int state, int skill = 0, int context = 0) { return probs.row(key(state, skill, context)); }

  /// The state-only policy obtained by fixing skill and context.
  BasicTabularPolicy slice(int skill, int context = 0) const {
    auto p = uniform(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) p.probs.row(s) = row(s, skill, context);
    return p;
  }

  void validate() const {
    if (num_skills < 1 || num_contexts < 1) throw std::invalid_argument("policy: bad key extents");
    if ((num_skills > 1 && !uses_skill()) || (num_contexts > 1 && !uses_context()))
      throw std::invalid_argument("policy: key extent does not match conditioning mode");
    if (probs.rows() != num_keys() || probs.cols() != num_actions)
      throw std::invalid_argument("policy: table shape mismatch");
    for (Eigen::Index r = 0; r < probs.rows(); ++r)
      if (!detail::is_distribution(probs.row(r).transpose(), 1e-12))
        throw std::invalid_argument("policy row " + std::to_string(r) + " is not a distribution");
  }
};

/// Reward-free trajectory s0 a0 s1 ... s_T in unified actions.
struct Trajectory {
  int embodiment_id = 0;
  std::vector<int> states;
  std::vector<int> actions;
  std::optional<int> skill_id;

  int length() const { return static_cast<int>(actions.size()); }

  void validate(int num_states, int unified_num_actions) const {
    if (states.size() != actions.size() + 1)
      throw std::invalid_argument("trajectory must hold one more state than actions");
    for (int s : states)
      if (s < 0 || s >= num_states) throw std::invalid_argument("trajectory state out of range");
    for (int a : actions)
      if (a < 0 || a >= unified_num_actions) throw std::invalid_argument("trajectory action out of range");
  }
};

/// Normalized discounted state-visitation distribution.
template <typename Scalar>
struct BasicOccupancyMeasure {
  VectorX<Scalar> dist;
  Scalar discount = Scalar(0.9);
};

/// State-indexed extrinsic reward.
template <typename Scalar>
struct BasicRewardTable {
  VectorX<Scalar> values;

  void validate(int num_states) const {
    if (values.size() != num_states) throw std::invalid_argument("reward table shape mismatch");
    if (!values.allFinite()) throw std::invalid_argument("reward table holds non-finite values");
  }
};

using Embodiment = BasicEmbodiment<double>;
using EmbodimentSet = BasicEmbodimentSet<double>;
using TabularPolicy = BasicTabularPolicy<double>;
using OccupancyMeasure = BasicOccupancyMeasure<double>;
using RewardTable = BasicRewardTable<double>;

}  // namespace ceurl
