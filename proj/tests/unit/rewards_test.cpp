#include "ceurl/bench/envs.hpp"
#include "ceurl/rewards/intrinsic.hpp"
#include "ceurl/rewards/skill_discriminator.hpp"
#include "ceurl/rewards/surprise.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace ceurl;

TEST(CrossEmbodimentReward, Values) {
  const EmbodimentSet two = bench::appendix_a1();
  EXPECT_NEAR(r_ce_trajectory(two, Eigen::Vector2d(std::log(0.5), std::log(0.5)), 0), 0.0, 1e-15);
  EXPECT_NEAR(r_ce_trajectory(two, Eigen::Vector2d(0.0, impossible<double>()), 0), std::log(0.5), 1e-15);
  EXPECT_NEAR(r_ce_trajectory(two, Eigen::Vector2d(0.0, impossible<double>()), 0), -0.6931, 5e-5);

  Rng rng(51);
  EmbodimentSet four = oracle::random_set(rng, 2, 2, 4);
  four.prior = Eigen::Vector4d::Constant(0.25);
  const Eigen::Vector4d q(std::log(0.4), std::log(0.1), std::log(0.3), std::log(0.2));
  EXPECT_NEAR(r_ce_trajectory(four, q, 1), std::log(0.25) - std::log(0.1), 1e-15);
  EXPECT_NEAR(r_ce_trajectory(four, q, 1), 0.9163, 5e-5);
  EXPECT_EQ(r_ce_step(q, four, 2), r_ce_trajectory(four, q, 2));
}

TEST(CrossEmbodimentReward, RejectsNonFiniteTrueEntry) {
  const EmbodimentSet two = bench::appendix_a1();
  EXPECT_THROW(r_ce_trajectory(two, Eigen::Vector2d(impossible<double>(), 0.0), 0), std::domain_error);
  EXPECT_THROW(r_ce_trajectory(two, Eigen::Vector2d(std::numeric_limits<double>::quiet_NaN(), 0.0), 0),
               std::domain_error);
  EXPECT_THROW(r_ce_trajectory(two, Eigen::Vector3d(0.0, 0.0, 0.0), 0), std::invalid_argument);
}

TEST(CrossEmbodimentReward, ExpectationIsMinusMutualInformation) {
  Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const EmbodimentSet set = oracle::random_set(rng, 2, 2, 2 + trial % 2, trial % 3 == 0 ? 0.3 : 0.0);
    const TabularPolicy pi = oracle::random_policy(rng, 2, 2);
    double expected_reward = 0.0, mi = 0.0;
    for_each_trajectory(2, 2, 3, [&](const Trajectory& traj) {
      const double mix = std::exp(mixture_trajectory_logprob(set, pi, traj));
      for (int e = 0; e < set.size(); ++e) {
        const double pe = std::exp(trajectory_logprob(set.embodiments[static_cast<std::size_t>(e)], pi, traj));
        if (pe == 0.0) continue;
        const Eigen::VectorXd log_q = exact_posterior_of_trajectory(set, traj).log_weights;
        expected_reward += set.prior(e) * pe * r_ce_trajectory(set, log_q, e);
        mi += set.prior(e) * pe * std::log(pe / mix);
      }
    });
    EXPECT_NEAR(expected_reward, -mi, 1e-9) << trial;
    EXPECT_LE(expected_reward, 1e-12);
    const auto terms = skill_objective_terms(set, pi, Eigen::VectorXd::Ones(1), 3);
    EXPECT_NEAR(terms.mi_embodiment, mi, 1e-9);
  }
}

TEST(CrossEmbodimentReward, IdenticalDynamicsGiveZero) {
  Rng rng(53);
  EmbodimentSet set = oracle::random_set(rng, 3, 2, 3);
  for (auto& emb : set.embodiments) {
    emb.transition = set.embodiments[0].transition;
    emb.initial_dist = set.embodiments[0].initial_dist;
  }
  for_each_trajectory(3, 2, 2, [&](const Trajectory& traj) {
    const Eigen::VectorXd log_q = exact_posterior_of_trajectory(set, traj).log_weights;
    for (int e = 0; e < 3; ++e) EXPECT_NEAR(r_ce_trajectory(set, log_q, e), 0.0, 1e-12);
  });
}

TEST(Surprise, FreshBinaryModel) {
  SurpriseModel model(2, 1, 1.0);
  const double s = r_surprise(model, {0, 0, 0});
  EXPECT_NEAR(s, 0.5 * std::log(0.5 / (2.0 / 3.0)) + 0.5 * std::log(0.5 / (1.0 / 3.0)), 1e-12);
  EXPECT_NEAR(s, 0.0589, 5e-5);
  EXPECT_EQ(model.counts()(0, 0), 1.0);
}

TEST(Surprise, SaturatesWithCounts) {
  SurpriseModel model(3, 2, 1.0);
  model.counts()(1 * 2 + 1, 2) = 1e6;
  EXPECT_LT(model.surprise({1, 1, 2}), 1e-5);
  EXPECT_EQ(model.counts()(3, 2), 1e6);
}

TEST(Surprise, DecreasesAlongRepeatedTransitions) {
  SurpriseModel model(4, 2, 1.0);
  double last = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const double s = r_surprise(model, {2, 1, 3});
    EXPECT_LT(s, last);
    EXPECT_GE(s, 0.0);
    last = s;
  }
}

TEST(Surprise, NonNegativeOnRandomStreams) {
  Rng rng(54);
  SurpriseModel model(5, 3, 0.5);
  for (int i = 0; i < 2000; ++i) EXPECT_GE(r_surprise(model, {rng.below(5), rng.below(3), rng.below(5)}), 0.0);
  EXPECT_NEAR(model.predictive(0, 0).sum(), 1.0, 1e-12);
}

TEST(SkillReward, Values) {
  EXPECT_NEAR(r_diayn(std::log(0.25), 4), 0.0, 1e-15);
  EXPECT_NEAR(r_diayn(0.0, 4), std::log(4.0), 1e-15);
  EXPECT_NEAR(r_diayn(0.0, 4), 1.3863, 5e-5);
  EXPECT_NEAR(r_diayn(std::log(0.1), 4), -0.9163, 5e-5);
  const SkillDiscriminator untrained(6, 4);
  for (int s = 0; s < 6; ++s)
    for (int z = 0; z < 4; ++z) EXPECT_NEAR(r_diayn(untrained, s, z), 0.0, 1e-14);
}

TEST(SkillReward, BoundedByLogK) {
  Rng rng(55);
  SkillDiscriminator disc(5, 3, 2, 3);
  for (Eigen::Index i = 0; i < disc.weights().size(); ++i) disc.weights().data()[i] = 20.0 * rng.uniform() - 10.0;
  for (int s = 0; s < 5; ++s)
    for (int c = 0; c < 3; ++c)
      for (int z = 0; z < 3; ++z) EXPECT_LE(r_diayn(disc, s, z, c), std::log(3.0) + 1e-15);
}

TEST(CombinedReward, WeightedSums) {
  IntrinsicRewardSpec lbs;
  lbs.kind = RewardKind::CE_LBS;
  EXPECT_NEAR(combined_reward(lbs, {0.0, 0.5, 0.0}), 0.5, 1e-15);
  IntrinsicRewardSpec diayn;
  diayn.kind = RewardKind::CE_DIAYN;
  EXPECT_NEAR(combined_reward(diayn, {-0.69, 0.0, 1.39}), 0.70, 1e-12);
  for (RewardKind k : {RewardKind::CE, RewardKind::LBS, RewardKind::DIAYN}) {
    IntrinsicRewardSpec one;
    one.kind = k;
    const RewardComponents c{0.3, -1.7, 2.9};
    const double expected = k == RewardKind::CE ? 0.3 : k == RewardKind::LBS ? -1.7 : 2.9;
    EXPECT_EQ(combined_reward(one, c), expected);
  }
  diayn.ce_weight = 2.0;
  diayn.diayn_weight = 0.5;
  EXPECT_NEAR(combined_reward(diayn, {1.0, 100.0, 4.0}), 4.0, 1e-15);
}

TEST(CombinedReward, OrderOfComponentsIsIrrelevant) {
  Rng rng(56);
  IntrinsicRewardSpec spec;
  spec.kind = RewardKind::CE_LBS;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform() - 0.5, b = rng.uniform() - 0.5;
    EXPECT_EQ(combined_reward(spec, {a, b, 0.0}), combined_reward(spec, {b, a, 0.0}));
  }
}

TEST(RewardSpec, ParsingAndValidation) {
  for (RewardKind k : {RewardKind::CE, RewardKind::LBS, RewardKind::DIAYN, RewardKind::CE_LBS, RewardKind::CE_DIAYN})
    EXPECT_EQ(parse_reward_kind(to_string(k)), k);
  EXPECT_THROW(parse_reward_kind("icm"), std::invalid_argument);
  IntrinsicRewardSpec spec;
  spec.kind = RewardKind::CE_DIAYN;
  spec.num_skills = 1;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.num_skills = 4;
  spec.ce_weight = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(SkillObjective, DegenerateCases) {
  Rng rng(57);
  const EmbodimentSet one = oracle::random_set(rng, 2, 2, 1);
  TabularPolicy skills = TabularPolicy::uniform(2, 2, Conditioning::StateSkill, 3);
  for (int r = 0; r < skills.probs.rows(); ++r)
    skills.probs.row(r) = random_simplex_point(rng, 2).transpose();
  const Eigen::VectorXd uniform3 = Eigen::VectorXd::Constant(3, 1.0 / 3);
  const auto t1 = skill_objective_terms(one, skills, uniform3, 3);
  EXPECT_NEAR(t1.mi_embodiment, 0.0, 1e-12);
  EXPECT_GT(t1.mi_skill_given_embodiment, 0.0);

  const EmbodimentSet many = oracle::random_set(rng, 2, 2, 3);
  const auto t2 = skill_objective_terms(many, TabularPolicy::uniform(2, 2, Conditioning::StateSkill, 3), uniform3, 3);
  EXPECT_NEAR(t2.mi_skill_given_embodiment, 0.0, 1e-12);
  const auto t3 = skill_objective_terms(many, skills, uniform3, 3);
  EXPECT_GE(t3.mi_embodiment, 0.0);
  EXPECT_GE(t3.mi_skill_given_embodiment, 0.0);
}

TEST(SkillDiscriminator, GradientMatchesFiniteDifferences) {
  Rng rng(58);
  for (int mode = 0; mode < 3; ++mode) {
    const int m = mode == 2 ? 2 : 1, contexts = mode >= 1 ? 3 : 0;
    SkillDiscriminator disc(4, 3, m, contexts, 0.5, 1e-2);
    for (Eigen::Index i = 0; i < disc.weights().size(); ++i) disc.weights().data()[i] = 2.0 * rng.uniform() - 1.0;
    std::vector<SkillExample> batch;
    for (int i = 0; i < 12; ++i)
      batch.push_back({rng.below(4), contexts ? rng.below(contexts) : 0, rng.below(3), rng.below(m)});
    const Eigen::MatrixXd analytic = disc.gradient(batch);
    const Eigen::MatrixXd numeric = oracle::central_differences(disc.weights(), [&] { return disc.loss(batch); });
    EXPECT_LT((analytic - numeric).norm() / numeric.norm(), 1e-5) << mode;
    EXPECT_NEAR(exp_of(disc.log_skill(1, 0)).sum(), 1.0, 1e-12);
  }
}

TEST(SkillDiscriminator, LearnsStateToSkillMap) {
  SkillDiscriminator disc(4, 4);
  std::vector<SkillExample> batch;
  for (int s = 0; s < 4; ++s) batch.push_back({s, 0, s, 0});
  for (int i = 0; i < 500; ++i) disc.train(batch);
  for (int s = 0; s < 4; ++s) EXPECT_GT(r_diayn(disc, s, s), 0.9 * std::log(4.0));
}
