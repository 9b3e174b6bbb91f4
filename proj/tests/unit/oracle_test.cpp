#include "ceurl/bench/envs.hpp"
#include "ceurl/oracle/skills.hpp"
#include "ceurl/inference/posterior.hpp"
#include "ceurl/oracle/theorem.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ceurl;

namespace {

Eigen::VectorXd random_reward(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = scale * (2.0 * rng.uniform() - 1.0);
  return r;
}

EmbodimentSet identical_pair(Rng& rng, int states, int actions) {
  EmbodimentSet set = oracle::random_set(rng, states, actions, 2);
  set.embodiments[1].transition = set.embodiments[0].transition;
  set.embodiments[1].initial_dist = set.embodiments[0].initial_dist;
  return set;
}

}  // namespace

TEST(TrajectorySpace, SingleStateSingleAction) {
  Rng rng(71);
  const EmbodimentSet set = oracle::random_set(rng, 1, 1, 2);
  for (int horizon : {0, 1, 5}) {
    const auto space = enumerate_space(set, TabularPolicy::uniform(1, 1), horizon);
    ASSERT_EQ(space.size(), 1);
    EXPECT_NEAR(space.mixture(0), 1.0, 1e-15);
  }
}

TEST(TrajectorySpace, TwoStateConstruction) {
  const auto space = enumerate_space(bench::appendix_a1(), TabularPolicy::uniform(2, 2), 2);
  EXPECT_EQ(space.size(), 32);
  EXPECT_EQ((space.mixture.array() > 0.0).count(), 16);
  for (int e = 0; e < 2; ++e) {
    EXPECT_NEAR(space.prob.row(e).sum(), 1.0, 1e-9);
    EXPECT_EQ((space.prob.row(e).array() > 0.0).count(), 8);
  }
  EXPECT_LT((space.mixture - 0.5 * (space.prob.row(0) + space.prob.row(1)).transpose()).cwiseAbs().maxCoeff(), 1e-16);
  for (Eigen::Index i = 0; i < space.size(); ++i) EXPECT_EQ(space.index_of(space.trajectory(i)), i);
}

TEST(TrajectorySpace, IdenticalEmbodimentsHaveEqualLaws) {
  Rng rng(72);
  const EmbodimentSet set = identical_pair(rng, 3, 2);
  const auto space = enumerate_space(set, oracle::random_policy(rng, 3, 2), 3);
  EXPECT_EQ(space.prob.row(0), space.prob.row(1));
}

TEST(TrajectorySpace, MatchesRecursiveEnumeration) {
  Rng rng(73);
  const EmbodimentSet set = oracle::random_set(rng, 2, 3, 2, 0.3);
  const TabularPolicy pi = oracle::random_policy(rng, 2, 3);
  const auto space = enumerate_space(set, pi, 3);
  for (int e = 0; e < 2; ++e)
    oracle::enumerate_paths(set.embodiments[static_cast<std::size_t>(e)], pi, 3,
                            [&](const std::vector<int>& s, const std::vector<int>& a, double p) {
                              Trajectory t;
                              t.states = s;
                              t.actions = a;
                              EXPECT_NEAR(space.prob(e, space.index_of(t)), p, 1e-15);
                            });
}

TEST(TrajectorySpace, SizeGuard) {
  Rng rng(74);
  const EmbodimentSet set = oracle::random_set(rng, 5, 5, 1);
  EXPECT_THROW(enumerate_space(set, TabularPolicy::uniform(5, 5), 5), SizeGuardError);
}

TEST(InnerMax, ConstantRewardLeavesTheMixture) {
  Rng rng(75);
  const auto space = enumerate_space(oracle::random_set(rng, 2, 2, 3), oracle::random_policy(rng, 2, 2), 3);
  const auto m = inner_max_closed_form(space, Eigen::VectorXd::Constant(space.size(), 3.7), 0.5, 1);
  EXPECT_NEAR(m.value, 0.0, 1e-12);
  EXPECT_LT((m.p_star - space.mixture).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(InnerMax, LargeBetaIsFirstOrder) {
  Rng rng(76);
  const auto space = enumerate_space(oracle::random_set(rng, 2, 2, 2), oracle::random_policy(rng, 2, 2), 3);
  const Eigen::VectorXd r = random_reward(rng, space.size(), 1.0);
  const auto m = inner_max_closed_form(space, r, 1e6, 0);
  EXPECT_NEAR(m.value, space.mixture.dot(r) - space.prob.row(0).dot(r), 1e-4);
}

TEST(InnerMax, ClosedFormIsTheTilt) {
  Rng rng(77);
  const auto space = enumerate_space(oracle::random_set(rng, 3, 2, 2, 0.3), oracle::random_policy(rng, 3, 2), 2);
  const Eigen::VectorXd r = random_reward(rng, space.size(), 2.0);
  const double beta = 0.7;
  Eigen::VectorXd tilt = (space.mixture.array() * (r.array() / beta).exp()).matrix();
  const double z = tilt.sum();
  tilt /= z;
  const auto m = inner_max_closed_form(space, r, beta, 1);
  EXPECT_LT((m.p_star - tilt).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(m.value, beta * std::log(z) - space.prob.row(1).dot(r), 1e-12);
  EXPECT_NEAR(inner_objective(space, r, beta, 1, m.p_star), m.value, 1e-12);
}

TEST(InnerMax, AgreesWithDirectSimplexMaximization) {
  Rng rng(78);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int states = 1 + rng.below(3), actions = 1 + rng.below(2);
    const auto space = enumerate_space(oracle::random_set(rng, states, actions, 2 + rng.below(2), 0.3),
                                       oracle::random_policy(rng, states, actions), 3);
    const double beta = std::vector<double>{0.1, 1.0, 10.0}[static_cast<std::size_t>(trial % 3)];
    const Eigen::VectorXd r = random_reward(rng, space.size(), 3.0);
    const auto closed = inner_max_closed_form(space, r, beta, 0);
    const auto numeric = inner_max_projected_gradient(space, r, beta, 0);
    EXPECT_TRUE(numeric.converged) << trial;
    worst = std::max(worst, std::abs(closed.value - numeric.value));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(InnerMax, ShiftAndOverflow) {
  Rng rng(79);
  const auto space = enumerate_space(oracle::random_set(rng, 2, 2, 2), oracle::random_policy(rng, 2, 2), 3);
  const Eigen::VectorXd r = random_reward(rng, space.size(), 1.0);
  const double base = inner_max_closed_form(space, r, 1.0, 0).value;
  EXPECT_NEAR(inner_max_closed_form(space, (r.array() + 12.5).matrix(), 1.0, 0).value, base, 1e-9);
  const auto big = inner_max_closed_form(space, (r.array() * 1e4 + 1e5).matrix(), 1.0, 0);
  EXPECT_TRUE(std::isfinite(big.value));
  EXPECT_NEAR(big.p_star.sum(), 1.0, 1e-12);
}

TEST(ProjectionOntoSimplex, MatchesBisection) {
  Rng rng(80);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd v = random_reward(rng, 1 + rng.below(8), 3.0);
    EXPECT_LT((project_to_simplex(v) - oracle::simplex_projection(v)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GFunction, ConvexShiftInvariantAndBounded) {
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const auto space = enumerate_space(oracle::random_set(rng, 2, 2, 2 + rng.below(2), 0.3),
                                       oracle::random_policy(rng, 2, 2), 3);
    const double beta = 0.5 + rng.uniform();
    const double bound = -beta * kl_to_mixture(space, 0);
    for (int probe = 0; probe < 10; ++probe) {
      const Eigen::VectorXd r1 = random_reward(rng, space.size(), 3.0), r2 = random_reward(rng, space.size(), 3.0);
      const double lambda = rng.uniform();
      EXPECT_LE(g_value(space, lambda * r1 + (1 - lambda) * r2, beta, 0),
                lambda * g_value(space, r1, beta, 0) + (1 - lambda) * g_value(space, r2, beta, 0) + 1e-9);
      EXPECT_NEAR(g_value(space, (r1.array() - 4.2).matrix(), beta, 0), g_value(space, r1, beta, 0), 1e-9);
      EXPECT_GE(g_value(space, r1, beta, 0), bound - 1e-9);
    }
  }
}

TEST(GFunction, GradientMatchesFiniteDifferences) {
  Rng rng(82);
  const auto space = enumerate_space(oracle::random_set(rng, 2, 2, 2), oracle::random_policy(rng, 2, 2), 2);
  Eigen::MatrixXd r = random_reward(rng, space.size(), 1.0);
  const Eigen::MatrixXd fd = oracle::central_differences(r, [&] { return g_value(space, r, 0.8, 1); });
  EXPECT_LT((g_gradient(space, r, 0.8, 1) - fd).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Theorem, DegenerateDistributionsGiveZero) {
  Rng rng(83);
  const EmbodimentSet one = oracle::random_set(rng, 2, 2, 1);
  const auto dirac = verify_theorem_1(one, oracle::random_policy(rng, 2, 2), 3, 1.0);
  ASSERT_EQ(dirac.embodiments.size(), 1u);
  EXPECT_NEAR(dirac.embodiments[0].closed_form_value, 0.0, 1e-15);
  EXPECT_NEAR(dirac.embodiments[0].numeric_minimax_value, 0.0, 1e-10);
  EXPECT_TRUE(dirac.passed());

  const auto twins = verify_theorem_1(identical_pair(rng, 2, 2), oracle::random_policy(rng, 2, 2), 3, 1.0);
  for (const auto& e : twins.embodiments) {
    EXPECT_NEAR(e.kl, 0.0, 1e-15);
    EXPECT_NEAR(e.numeric_minimax_value, 0.0, 1e-10);
  }
  EXPECT_TRUE(twins.passed());
}

TEST(Theorem, RandomTwoByTwoInstances) {
  Rng rng(84);
  int passed = 0;
  for (int i = 0; i < 50; ++i) {
    const auto report = verify_theorem_1(oracle::random_set(rng, 2, 2, 2, 0.3), oracle::random_policy(rng, 2, 2), 3, 1.0);
    passed += report.passed();
    for (const auto& e : report.embodiments) {
      EXPECT_NEAR(e.gap, std::abs(e.closed_form_value - e.numeric_minimax_value), 1e-15);
      EXPECT_NEAR(e.closed_form_value, -e.kl, 1e-15);
      EXPECT_NEAR(e.argmax_distribution.sum(), 1.0, 1e-12);
    }
    EXPECT_LT(report.max_gap(), 1e-4);
  }
  EXPECT_EQ(passed, 50);
}

TEST(Theorem, ScalesLinearlyInBeta) {
  const auto batch = verify_theorem_1_batch(10, 3, {0.1, 1.0, 10.0}, 85);
  EXPECT_TRUE(batch.passed());
  EXPECT_TRUE(batch.linear_in_beta);
  EXPECT_EQ(batch.reports.size(), 30u);
}

TEST(Theorem, NonConvergenceIsFlagged) {
  Rng rng(86);
  const auto hard = enumerate_space(oracle::random_set(rng, 3, 2, 3), oracle::random_policy(rng, 3, 2), 3);
  const auto stopped = minimize_g(hard, 1.0, 0, 1, 1e-10);
  EXPECT_FALSE(stopped.converged);
  EXPECT_GT(stopped.gradient_norm, 1e-10);
}

TEST(MutualInformation, DegenerateCases) {
  Rng rng(87);
  const auto same = verify_mi_identity(identical_pair(rng, 2, 2), oracle::random_policy(rng, 2, 2), 3);
  EXPECT_NEAR(same.kl_form, 0.0, 1e-12);
  EXPECT_TRUE(same.passed());
  const auto split = verify_mi_identity(bench::appendix_a1(), TabularPolicy::uniform(2, 2), 2);
  EXPECT_NEAR(split.kl_form, std::log(2.0), 1e-12);
  EXPECT_NEAR(split.posterior_form, std::log(2.0), 1e-12);
  EXPECT_NEAR(split.entropy_form, std::log(2.0), 1e-12);
}

TEST(MutualInformation, RandomInstancesAgree) {
  const auto batch = verify_mi_identity_batch(50, 3, 88);
  EXPECT_TRUE(batch.passed());
  for (const auto& r : batch.reports) EXPECT_LT(r.max_discrepancy(), 1e-9);
}

TEST(SkillDecomposition, SingleEmbodiment) {
  Rng rng(89);
  const EmbodimentSet one = oracle::random_set(rng, 2, 2, 1);
  const Eigen::VectorXd half = Eigen::Vector2d(0.5, 0.5);
  const auto flat = verify_skill_decomposition(one, TabularPolicy::uniform(2, 2, Conditioning::StateSkill, 2), half, 3);
  EXPECT_NEAR(flat.lhs, 0.0, 1e-12);
  EXPECT_NEAR(flat.rhs(), 0.0, 1e-12);

  TabularPolicy distinct = TabularPolicy::uniform(2, 2, Conditioning::StateSkill, 2);
  for (int s = 0; s < 2; ++s) {
    distinct.row(s, 0) = Eigen::RowVector2d(0.9, 0.1);
    distinct.row(s, 1) = Eigen::RowVector2d(0.2, 0.8);
  }
  const auto r = verify_skill_decomposition(one, distinct, half, 3);
  EXPECT_NEAR(r.mi_embodiment, 0.0, 1e-12);
  EXPECT_GT(r.mi_skill_given_embodiment, 0.01);
  EXPECT_NEAR(r.lhs, r.mi_skill_given_embodiment, 1e-10);
}

TEST(SkillDecomposition, RandomInstancesAgree) {
  const auto batch = verify_skill_decomposition_batch(30, 3, 90);
  EXPECT_TRUE(batch.passed());
  EXPECT_NEAR(batch.reports[0].mi_embodiment, 0.0, 1e-12);
  Rng rng(91);
  const RandomInstance inst = random_ce_mdp(rng, 2, 2, 2, 2);
  const auto r = verify_skill_decomposition(inst.set, inst.policy, Eigen::Vector2d(0.3, 0.7), 3);
  EXPECT_LT(r.discrepancy(), 1e-8);
}

TEST(StepwiseGap, IdenticalEmbodimentsAreZero) {
  Rng rng(92);
  const auto r = measure_stepwise_gap(identical_pair(rng, 2, 2), oracle::random_policy(rng, 2, 2), 3);
  EXPECT_NEAR(r.trajectory_expectation, 0.0, 1e-12);
  EXPECT_NEAR(r.stepwise_expectation, 0.0, 1e-12);
}

TEST(StepwiseGap, IdentificationAtTheFirstStep) {
  const EmbodimentSet set = bench::appendix_a1();
  for_each_trajectory(2, 2, 3, [&](const Trajectory& traj) {
    try {
      const auto prefixes = prefix_posteriors(set, traj);
      for (std::size_t t = 1; t < prefixes.size(); ++t) EXPECT_EQ(prefixes[t].weights(), prefixes.back().weights());
    } catch (const ImpossibleEvidence&) {
    }
  });
  const auto r = measure_stepwise_gap(set, TabularPolicy::uniform(2, 2), 3);
  EXPECT_NEAR(r.trajectory_expectation, -std::log(2.0), 1e-12);
  for (double step : r.per_step) EXPECT_NEAR(step, -std::log(2.0), 1e-12);
  EXPECT_NEAR(r.gap(), 2.0 * std::log(2.0), 1e-12);
}
