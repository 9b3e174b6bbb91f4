#include "ceurl/bench/envs.hpp"
#include "ceurl/core/mdp.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ceurl;

namespace {

Embodiment self_loop() {
  Embodiment e;
  e.num_states = 1;
  e.num_actions = 1;
  e.transition = Eigen::MatrixXd::Ones(1, 1);
  e.initial_dist = Eigen::VectorXd::Ones(1);
  e.action_projector = {0};
  return e;
}

/// Deterministic 3-cycle 0 -> 1 -> 2 -> 0 under its only action.
EmbodimentSet cycle_set() {
  Embodiment e;
  e.num_states = 3;
  e.num_actions = 1;
  e.transition = Eigen::MatrixXd::Zero(3, 3);
  e.transition(0, 1) = e.transition(1, 2) = e.transition(2, 0) = 1.0;
  e.initial_dist = Eigen::Vector3d(1, 0, 0);
  e.action_projector = {0};
  EmbodimentSet set;
  set.embodiments = {e};
  set.prior = Eigen::VectorXd::Ones(1);
  set.unified_num_actions = 1;
  return set;
}

TabularPolicy pi2() { return TabularPolicy::deterministic({0, 1}, 2); }

TabularPolicy appendix_stochastic() {
  TabularPolicy p = TabularPolicy::uniform(2, 2);
  p.probs.row(0) << 1.0, 0.0;
  return p;
}

Trajectory traj(std::vector<int> s, std::vector<int> a) {
  Trajectory t;
  t.states = std::move(s);
  t.actions = std::move(a);
  return t;
}

}  // namespace

TEST(LogSpace, ImpossibleAbsorbs) {
  const double x = impossible();
  EXPECT_TRUE(is_impossible(x + std::log(0.3)));
  EXPECT_EQ(log_add(x, std::log(0.25)), std::log(0.25));
  EXPECT_TRUE(is_impossible(log_sum_exp(Eigen::Vector2d(x, x))));
  EXPECT_TRUE(is_impossible(safe_log(0.0)));
  EXPECT_NEAR(log_add(std::log(0.25), std::log(0.5)), std::log(0.75), 1e-15);
}

TEST(LogSpace, SoftmaxGivesExactZeros) {
  const Eigen::VectorXd p = softmax(Eigen::Vector3d(impossible(), 0.0, std::log(3.0)));
  EXPECT_EQ(p(0), 0.0);
  EXPECT_NEAR(p(1), 0.25, 1e-15);
  EXPECT_NEAR(p(2), 0.75, 1e-15);
}

TEST(LogSpace, LogSumExpSurvivesLargeInputs) {
  EXPECT_NEAR(log_sum_exp(Eigen::Vector2d(1000.0, 1000.0)), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Rng, ForksAreReproducibleAndDistinct) {
  Rng a(7), b(7);
  EXPECT_EQ(a.uniform(), b.uniform());
  Rng c = Rng(7).fork(1), d = Rng(7).fork(1), e = Rng(7).fork(2);
  const double x = c.uniform();
  EXPECT_EQ(x, d.uniform());
  EXPECT_NE(x, e.uniform());
}

TEST(Rng, CategoricalNeverPicksZeroWeight) {
  Rng rng(3);
  const Eigen::Vector4d w(0.0, 2.0, 0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const int k = rng.categorical(w);
    EXPECT_TRUE(k == 1 || k == 3);
  }
}

TEST(Types, EmbodimentValidationRejectsBadTables) {
  Embodiment e = self_loop();
  EXPECT_NO_THROW(e.validate(1));
  EXPECT_THROW(e.validate(2), std::invalid_argument);  // projector not total
  e.transition(0, 0) = 0.9;
  EXPECT_THROW(e.validate(1), std::invalid_argument);
  e = self_loop();
  e.initial_dist(0) = 0.5;
  EXPECT_THROW(e.validate(1), std::invalid_argument);
}

TEST(Types, EmbodimentSetValidation) {
  EmbodimentSet set = bench::appendix_a1(0.9);
  EXPECT_NO_THROW(set.validate());
  set.embodiments[1].id = 0;
  EXPECT_THROW(set.validate(), std::invalid_argument);
  set = bench::appendix_a1(0.9);
  set.discount = 1.0;
  EXPECT_THROW(set.validate(), std::invalid_argument);
  set = bench::appendix_a1(0.9);
  set.prior = Eigen::Vector2d(0.7, 0.7);
  EXPECT_THROW(set.validate(), std::invalid_argument);
}

TEST(Types, PolicyValidationAndSlices) {
  TabularPolicy p = TabularPolicy::uniform(3, 2, Conditioning::StateSkill, 2);
  EXPECT_NO_THROW(p.validate());
  p.row(1, 1) << 0.2, 0.8;
  const TabularPolicy s = p.slice(1);
  EXPECT_EQ(s.mode, Conditioning::State);
  EXPECT_DOUBLE_EQ(s.probs(1, 1), 0.8);
  p.probs(0, 0) = 0.9;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Occupancy, SingleStateIsOne) {
  const auto d = occupancy(self_loop(), TabularPolicy::uniform(1, 1), 0.9);
  ASSERT_EQ(d.dist.size(), 1);
  EXPECT_NEAR(d.dist(0), 1.0, 1e-15);
}

TEST(Occupancy, TwoStateDeterministicPolicy) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  for (double gamma : {0.3, 0.9}) {
    const auto d = occupancy(set.embodiments[0], pi2(), gamma);
    EXPECT_NEAR(d.dist(0), (1 + gamma) / 2, 1e-12);
    EXPECT_NEAR(d.dist(1), (1 - gamma) / 2, 1e-12);
  }
  const auto d = occupancy(set.embodiments[0], pi2(), 0.9);
  EXPECT_NEAR(d.dist(0), 0.95, 1e-12);
  EXPECT_NEAR(d.dist(1), 0.05, 1e-12);
}

TEST(Occupancy, TwoStateStochasticMixture) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  const auto d = mixture_occupancy(set, appendix_stochastic());
  const double g2 = 0.81;
  EXPECT_NEAR(d.dist(0), 2 / (4 - g2), 1e-12);
  EXPECT_NEAR(d.dist(1), (2 - g2) / (4 - g2), 1e-12);
  EXPECT_NEAR(d.dist(0), 0.626959247648903, 1e-12);
}

TEST(Occupancy, DeterministicMixturesAllHalf) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1) {
      const auto d = mixture_occupancy(set, TabularPolicy::deterministic({a0, a1}, 2));
      EXPECT_NEAR(d.dist(0), 0.5, 1e-12);
      EXPECT_NEAR(d.dist(1), 0.5, 1e-12);
    }
}

TEST(Occupancy, RejectsBadDiscountAndConditionedPolicies) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  EXPECT_THROW(occupancy(set.embodiments[0], pi2(), 1.0), std::domain_error);
  EXPECT_THROW(occupancy(set.embodiments[0], pi2(), 0.0), std::domain_error);
  EXPECT_THROW(occupancy(set.embodiments[0], TabularPolicy::uniform(2, 2, Conditioning::StateSkill, 2), 0.5),
               std::invalid_argument);
}

TEST(Occupancy, MatchesSeriesOnRandomMdps) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const int s = 1 + rng.below(6), a = 1 + rng.below(3);
    const EmbodimentSet set = oracle::random_set(rng, s, a, 1, 0.3);
    const TabularPolicy pi = oracle::random_policy(rng, s, a);
    const double gamma = 0.05 + 0.9 * rng.uniform();
    const auto d = occupancy(set.embodiments[0], pi, gamma);
    EXPECT_NEAR(d.dist.sum(), 1.0, 1e-10);
    EXPECT_GE(d.dist.minCoeff(), -1e-12);
    EXPECT_LT((d.dist - oracle::occupancy_by_series(set.embodiments[0], pi, gamma)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Occupancy, MixtureIsPriorWeightedSum) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const EmbodimentSet set = oracle::random_set(rng, 4, 2, 3);
    const TabularPolicy pi = oracle::random_policy(rng, 4, 2);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    for (int e = 0; e < 3; ++e) sum += set.prior(e) * occupancy(set.embodiments[e], pi, set.discount).dist;
    EXPECT_LE((mixture_occupancy(set, pi).dist - sum).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(TrajectoryLogprob, DeterministicChainIsCertain) {
  const EmbodimentSet set = cycle_set();
  EXPECT_EQ(trajectory_logprob(set.embodiments[0], TabularPolicy::uniform(3, 1), traj({0, 1, 2, 0}, {0, 0, 0})), 0.0);
  EXPECT_TRUE(is_impossible(trajectory_logprob(set.embodiments[0], TabularPolicy::uniform(3, 1), traj({0, 2}, {0}))));
}

TEST(TrajectoryLogprob, TwoStateExample) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  const Trajectory t = traj({0, 0}, {0});
  EXPECT_NEAR(trajectory_logprob(set.embodiments[0], pi2(), t), std::log(0.5), 1e-15);
  EXPECT_TRUE(is_impossible(trajectory_logprob(set.embodiments[1], pi2(), t)));
  EXPECT_NEAR(mixture_trajectory_logprob(set, pi2(), t), std::log(0.25), 1e-15);
  // length 0 is log mu0(s0)
  EXPECT_NEAR(trajectory_logprob(set.embodiments[0], pi2(), traj({1}, {})), std::log(0.5), 1e-15);
}

TEST(TrajectoryLogprob, MixtureDegenerateCases) {
  EmbodimentSet one = bench::appendix_a1(0.9);
  one.embodiments.resize(1);
  one.prior = Eigen::VectorXd::Ones(1);
  const TabularPolicy pi = appendix_stochastic();
  const Trajectory t = traj({1, 0, 1}, {1, 0});
  EXPECT_EQ(mixture_trajectory_logprob(one, pi, t), trajectory_logprob(one.embodiments[0], pi, t));

  EmbodimentSet twins = one;
  twins.embodiments.push_back(one.embodiments[0]);
  twins.embodiments[1].id = 1;
  twins.prior = Eigen::Vector2d(0.3, 0.7);
  const double single = trajectory_logprob(one.embodiments[0], pi, t);
  if (is_impossible(single))
    EXPECT_TRUE(is_impossible(mixture_trajectory_logprob(twins, pi, t)));
  else
    EXPECT_NEAR(mixture_trajectory_logprob(twins, pi, t), single, 1e-15);
  const Trajectory u = traj({1, 1, 1}, {0, 0});
  ASSERT_FALSE(is_impossible(trajectory_logprob(one.embodiments[0], pi, u)));
  EXPECT_NEAR(mixture_trajectory_logprob(twins, pi, u), trajectory_logprob(one.embodiments[0], pi, u), 1e-15);

  const EmbodimentSet a1 = bench::appendix_a1(0.9);
  // s0 = 0 under a1 leads to 0 for e1 and 1 for e2; this policy never plays a2 in state 0
  EXPECT_TRUE(is_impossible(mixture_trajectory_logprob(a1, pi, traj({0, 0}, {1}))));
}

TEST(TrajectoryLogprob, ExponentiatedSumsToOne) {
  Rng rng(5);
  for (int s = 1; s <= 3; ++s)
    for (int a = 1; a <= 3; ++a)
      for (int len = 0; len <= 4; ++len) {
        if (trajectory_space_size(s, a, len) > 2e4) continue;
        const EmbodimentSet set = oracle::random_set(rng, s, a, 1, 0.3);
        const TabularPolicy pi = oracle::random_policy(rng, s, a);
        const Eigen::MatrixXd lp = enumerate_trajectory_logprobs(set, pi, len);
        EXPECT_NEAR(exp_of(lp).sum(), 1.0, 1e-9) << s << " " << a << " " << len;
      }
}

TEST(TrajectoryLogprob, MatchesRecursiveEnumeration) {
  Rng rng(6);
  const EmbodimentSet set = oracle::random_set(rng, 3, 2, 1, 0.3);
  const TabularPolicy pi = oracle::random_policy(rng, 3, 2);
  double worst = 0.0;
  oracle::enumerate_paths(set.embodiments[0], pi, 3, [&](const auto& s, const auto& a, double p) {
    worst = std::max(worst, std::abs(std::exp(trajectory_logprob(set.embodiments[0], pi, traj(s, a))) - p));
  });
  EXPECT_LT(worst, 1e-15);
}

TEST(ExpectedReturn, SimpleRewards) {
  const EmbodimentSet set = bench::appendix_a1(0.9);
  RewardTable r;
  r.values = Eigen::Vector2d::Zero();
  EXPECT_EQ(expected_return(set.embodiments[0], pi2(), r, 0.9), 0.0);
  r.values = Eigen::Vector2d::Constant(2.5);
  EXPECT_NEAR(expected_return(set.embodiments[0], pi2(), r, 0.9), 25.0, 1e-12);
  r.values = Eigen::Vector2d(1.0, 0.0);
  EXPECT_NEAR(expected_return(set.embodiments[0], pi2(), r, 0.9), 9.5, 1e-12);
  r.values(1) = std::nan("");
  EXPECT_THROW(expected_return(set.embodiments[0], pi2(), r, 0.9), std::invalid_argument);
}

TEST(ExpectedReturn, MatchesTruncatedReturnOnRandomMdps) {
  Rng rng(13);
  constexpr int T = 200;
  for (int i = 0; i < 100; ++i) {
    const int s = 1 + rng.below(6), a = 1 + rng.below(3);
    const EmbodimentSet set = oracle::random_set(rng, s, a, 1, 0.3);
    const TabularPolicy pi = oracle::random_policy(rng, s, a);
    RewardTable r;
    r.values = Eigen::VectorXd::NullaryExpr(s, [&] { return 2.0 * rng.uniform() - 1.0; });
    const double gamma = 0.5 + 0.45 * rng.uniform();
    const double bound = std::pow(gamma, T) * r.values.cwiseAbs().maxCoeff() / (1 - gamma);
    const double exact = expected_return(set.embodiments[0], pi, r, gamma);
    EXPECT_LE(std::abs(exact - oracle::propagated_return(set.embodiments[0], pi, r.values, gamma, T)), bound + 1e-12);
    EXPECT_NEAR(truncated_return(set.embodiments[0], pi, r, gamma, T),
                oracle::propagated_return(set.embodiments[0], pi, r.values, gamma, T), 1e-12);
  }
}

TEST(ExpectedReturn, ShortHorizonMatchesPathEnumeration) {
  Rng rng(14);
  const EmbodimentSet set = oracle::random_set(rng, 3, 2, 1);
  const TabularPolicy pi = oracle::random_policy(rng, 3, 2);
  RewardTable r;
  r.values = Eigen::Vector3d(1.0, -0.5, 2.0);
  double by_paths = 0.0;
  oracle::enumerate_paths(set.embodiments[0], pi, 3, [&](const auto& s, const auto&, double p) {
    for (int t = 0; t < 3; ++t) by_paths += p * std::pow(0.8, t) * r.values(s[t]);
  });
  EXPECT_NEAR(truncated_return(set.embodiments[0], pi, r, 0.8, 3), by_paths, 1e-13);
}

TEST(Rollout, DeterministicSystemIgnoresSeed) {
  const EmbodimentSet set = cycle_set();
  const TabularPolicy pi = TabularPolicy::uniform(3, 1);
  const Trajectory a = rollout(set, pi, 0, 7, std::uint64_t{1}), b = rollout(set, pi, 0, 7, std::uint64_t{99});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.states, (std::vector<int>{0, 1, 2, 0, 1, 2, 0, 1}));
}

TEST(Rollout, SameSeedSameTrajectory) {
  Rng rng(21);
  const EmbodimentSet set = oracle::random_set(rng, 4, 3, 2);
  const TabularPolicy pi = oracle::random_policy(rng, 4, 3);
  const Trajectory a = rollout(set, pi, 1, 50, std::uint64_t{5}), b = rollout(set, pi, 1, 50, std::uint64_t{5});
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_THROW(rollout(set, pi, 1, 0, std::uint64_t{5}), std::invalid_argument);
}

TEST(Rollout, EmpiricalDiscountedFrequenciesMatchOccupancy) {
  Rng setup(22);
  const EmbodimentSet set = oracle::random_set(setup, 3, 2, 1);
  const TabularPolicy pi = oracle::random_policy(setup, 3, 2);
  const double gamma = 0.9;
  constexpr int horizon = 100, episodes = 1000;  // 1e5 steps
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(3);
  Rng rng(23);
  for (int ep = 0; ep < episodes; ++ep) {
    const Trajectory t = rollout(set, pi, 0, horizon, rng);
    double w = 1.0 - gamma;
    for (int k = 0; k < horizon; ++k, w *= gamma) freq(t.states[k]) += w;
  }
  freq /= freq.sum();
  EXPECT_LT((freq - occupancy(set.embodiments[0], pi, gamma).dist).cwiseAbs().sum(), 0.02);
}

TEST(Enumeration, GuardRejectsLargeSpaces) {
  EXPECT_THROW(require_enumerable(10, 5, 4), SizeGuardError);
  EXPECT_NO_THROW(require_enumerable(3, 2, 3));
}
