#include "ceurl/bench/verify.hpp"

#include "ceurl/bench/envs.hpp"
#include "ceurl/core/parallel.hpp"
#include "ceurl/geometry/occupancy_geometry.hpp"
#include "ceurl/inference/discriminator.hpp"
#include "ceurl/inference/posterior.hpp"
#include "ceurl/oracle/skills.hpp"
#include "ceurl/oracle/theorem.hpp"
#include "ceurl/rewards/skill_discriminator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ceurl::bench {

bool SuiteReport::passed() const { return failures() == 0; }

int SuiteReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

namespace {

void bound(SuiteReport& r, const std::string& name, double value, double tol) {
  r.checks.push_back({name, value, tol, std::isfinite(value) && value < tol});
}

void measure(SuiteReport& r, const std::string& name, double value) { r.checks.push_back({name, value, -1.0, true}); }

std::string label(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

Eigen::VectorXd random_reward(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = scale * (2.0 * rng.uniform() - 1.0);
  return r;
}

constexpr int kHorizon = 3;
const std::vector<double> kBetas{0.1, 1.0, 10.0};

}  // namespace

SuiteReport verify_theorem_suite(const VerifySettings& settings) {
  SuiteReport rep{"theorem", {}};
  const auto batch = verify_theorem_1_batch(50, kHorizon, kBetas, settings.seed, settings.threads);
  for (int i = 0; i < batch.instances; ++i)
    for (std::size_t b = 0; b < kBetas.size(); ++b) {
      const auto& report = batch.reports[static_cast<std::size_t>(i) * kBetas.size() + b];
      bound(rep, "minimax/instance-" + std::to_string(i) + label("/beta-%g", kBetas[b]), report.max_gap(),
            report.tolerance);
    }
  bound(rep, "minimax/linear-in-beta", batch.linear_in_beta ? 0.0 : 1.0, 0.5);

  // Closed-form inner maximum against direct maximization over the simplex.
  struct Probe {
    double inner = 0.0, convexity = 0.0, shift = 0.0, lower = 0.0;
  };
  constexpr int kInstances = 50, kProbes = 1000;
  std::vector<Probe> inner(kInstances), probes(kProbes);
  const Rng root = Rng(settings.seed).fork(0x7e0);
  parallel_for(kInstances, settings.threads, [&](int i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    const FiniteTrajectorySpace space = enumerate_space(inst.set, inst.policy, kHorizon);
    double worst = 0.0;
    for (double beta : kBetas)
      for (int e = 0; e < space.num_embodiments(); ++e) {
        const Eigen::VectorXd r = random_reward(rng, space.size(), 2.0);
        const double closed = inner_max_closed_form(space, r, beta, e).value;
        const double numeric = inner_max_projected_gradient(space, r, beta, e).value;
        worst = std::max(worst, std::abs(closed - numeric));
      }
    inner[static_cast<std::size_t>(i)].inner = worst;
  });
  double worst_inner = 0.0;
  for (const auto& p : inner) worst_inner = std::max(worst_inner, p.inner);
  bound(rep, "inner-max/closed-form-vs-simplex", worst_inner, 1e-5);

  const Rng probe_root = Rng(settings.seed).fork(0x9a0be);
  parallel_for(kProbes, settings.threads, [&](int k) {
    Rng rng = probe_root.fork(static_cast<std::uint64_t>(k));
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    const FiniteTrajectorySpace space = enumerate_space(inst.set, inst.policy, kHorizon);
    const double beta = kBetas[static_cast<std::size_t>(rng.below(3))];
    const int e = rng.below(space.num_embodiments());
    const Eigen::VectorXd r1 = random_reward(rng, space.size(), 3.0), r2 = random_reward(rng, space.size(), 3.0);
    const double lambda = rng.uniform(), shift = 10.0 * (2.0 * rng.uniform() - 1.0);
    const double g1 = g_value(space, r1, beta, e), g2 = g_value(space, r2, beta, e);
    const double g_mid = g_value(space, lambda * r1 + (1.0 - lambda) * r2, beta, e);
    const double floor = -beta * kl_to_mixture(space, e);
    Probe& p = probes[static_cast<std::size_t>(k)];
    p.convexity = std::max(0.0, g_mid - (lambda * g1 + (1.0 - lambda) * g2));
    p.shift = std::abs(g_value(space, (r1.array() + shift).matrix(), beta, e) - g1);
    p.lower = std::max(0.0, floor - std::min(g1, std::min(g2, g_mid)));
  });
  Probe worst;
  for (const auto& p : probes) {
    worst.convexity = std::max(worst.convexity, p.convexity);
    worst.shift = std::max(worst.shift, p.shift);
    worst.lower = std::max(worst.lower, p.lower);
  }
  bound(rep, "g/convexity", worst.convexity, 1e-9);
  bound(rep, "g/shift-invariance", worst.shift, 1e-9);
  bound(rep, "g/lower-bound", worst.lower, 1e-9);
  return rep;
}

SuiteReport verify_geometry_suite(const VerifySettings& settings) {
  SuiteReport rep{"geometry", {}};
  for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99}) {
    const AppendixReport a = reproduce_appendix_counterexample(gamma);
    const std::string g = label("appendix/gamma-%g", gamma);
    bound(rep, g + "/occupancy-error", a.max_occupancy_error, 1e-9);
    bound(rep, g + "/hull-distance-error", std::abs(a.hull_distance - a.hull_distance_closed), 1e-8);
    bound(rep, g + "/stochastic-mixture-inside", a.inside ? 1.0 : 0.0, 0.5);
  }
  const EmbodimentSet a1 = appendix_a1(0.9);
  for (const auto& emb : a1.embodiments) {
    const auto c = verify_single_embodiment_convexity(emb, a1.unified_num_actions, 0.9, 200, settings.seed);
    bound(rep, "convexity/appendix-e" + std::to_string(emb.id), c.max_distance, c.tolerance);
  }
  EnvSpec slip;
  slip.family = EnvFamily::GridSlip;
  slip.rows = 2;
  slip.cols = 2;
  slip.slip_probs = {0.0, 0.3};
  const EmbodimentSet grid = build_env(slip);
  for (const auto& emb : grid.embodiments) {
    const auto c = verify_single_embodiment_convexity(emb, grid.unified_num_actions, 0.9, 100, settings.seed);
    bound(rep, "convexity/grid-slip-e" + std::to_string(emb.id), c.max_distance, c.tolerance);
  }
  return rep;
}

SuiteReport verify_skills_suite(const VerifySettings& settings) {
  SuiteReport rep{"skills", {}};
  const auto mi = verify_mi_identity_batch(50, kHorizon, settings.seed, settings.threads);
  for (std::size_t i = 0; i < mi.reports.size(); ++i)
    bound(rep, "mi-identity/instance-" + std::to_string(i), mi.reports[i].max_discrepancy(),
          mi.reports[i].tolerance);
  const auto dec = verify_skill_decomposition_batch(30, kHorizon, settings.seed, settings.threads);
  for (std::size_t i = 0; i < dec.reports.size(); ++i)
    bound(rep, "decomposition/instance-" + std::to_string(i), dec.reports[i].discrepancy(),
          dec.reports[i].tolerance);
  if (!dec.reports.empty()) bound(rep, "decomposition/dirac-first-term", std::abs(dec.reports[0].mi_embodiment), 1e-12);
  Rng rng = Rng(settings.seed).fork(0x57e9);
  for (int i = 0; i < 5; ++i) {
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    measure(rep, "stepwise-gap/instance-" + std::to_string(i), measure_stepwise_gap(inst.set, inst.policy, kHorizon).gap());
  }
  return rep;
}

SuiteReport verify_discriminator_suite(const VerifySettings& settings) {
  SuiteReport rep{"discriminator", {}};
  Rng rng = Rng(settings.seed).fork(0xd15c);
  double worst_posterior = 0.0;
  std::vector<Trajectory> trajectories;
  for (int i = 0; i < 100; ++i) {
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    const int id = inst.set.embodiments[static_cast<std::size_t>(rng.categorical(inst.set.prior))].id;
    const Trajectory traj = rollout(inst.set, inst.policy, id, 1 + rng.below(8), rng);
    const Eigen::VectorXd inc = exact_posterior_of_trajectory(inst.set, traj).weights();
    const Eigen::VectorXd bat = batch_posterior_of_trajectory(inst.set, inst.policy, traj).weights();
    worst_posterior = std::max(worst_posterior, (inc - bat).cwiseAbs().maxCoeff());
  }
  bound(rep, "posterior/incremental-vs-batch", worst_posterior, 1e-10);

  auto relative_error = [](const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
    return (analytic - numeric).cwiseAbs().maxCoeff() / std::max(numeric.cwiseAbs().maxCoeff(), 1e-12);
  };
  constexpr double h = 1e-6;
  double worst_window = 0.0, worst_skill = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int s = 2 + rng.below(2), a = 2, m = 2 + rng.below(2), len = 2 + rng.below(2);
    LearnedDiscriminator disc(WindowFeatureSpec{s, a, len, true}, m, 0.5, 1e-2);
    for (Eigen::Index i = 0; i < disc.weights().size(); ++i) disc.weights().data()[i] = 2.0 * rng.uniform() - 1.0;
    std::vector<LabeledWindow> batch;
    for (int k = 0; k < 8; ++k) {
      HistoryWindow w = HistoryWindow::padding(len, s, a, rng.below(s));
      for (int j = rng.below(len + 1); j < len; ++j) {
        w.states[static_cast<std::size_t>(j)] = rng.below(s);
        w.actions[static_cast<std::size_t>(j)] = rng.below(a);
      }
      batch.push_back({w, rng.below(m)});
    }
    const Eigen::MatrixXd analytic = disc.gradient(batch);
    Eigen::MatrixXd numeric(analytic.rows(), analytic.cols());
    for (Eigen::Index i = 0; i < numeric.size(); ++i) {
      double& wi = disc.weights().data()[i];
      const double keep = wi;
      wi = keep + h;
      const double up = disc.loss(batch);
      wi = keep - h;
      const double down = disc.loss(batch);
      wi = keep;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    worst_window = std::max(worst_window, relative_error(analytic, numeric));

    SkillDiscriminator sd(s, 2 + rng.below(2), m, 0, 0.5, 1e-2);
    for (Eigen::Index i = 0; i < sd.weights().size(); ++i) sd.weights().data()[i] = 2.0 * rng.uniform() - 1.0;
    std::vector<SkillExample> examples;
    for (int k = 0; k < 8; ++k) examples.push_back({rng.below(s), 0, rng.below(sd.num_skills()), rng.below(m)});
    const Eigen::MatrixXd sa = sd.gradient(examples);
    Eigen::MatrixXd sn(sa.rows(), sa.cols());
    for (Eigen::Index i = 0; i < sn.size(); ++i) {
      double& wi = sd.weights().data()[i];
      const double keep = wi;
      wi = keep + h;
      const double up = sd.loss(examples);
      wi = keep - h;
      const double down = sd.loss(examples);
      wi = keep;
      sn.data()[i] = (up - down) / (2.0 * h);
    }
    worst_skill = std::max(worst_skill, relative_error(sa, sn));
  }
  bound(rep, "gradient/window-classifier", worst_window, 1e-5);
  bound(rep, "gradient/skill-classifier", worst_skill, 1e-5);
  return rep;
}

std::string to_json_lines(const SuiteReport& report) {
  std::string out;
  for (const auto& c : report.checks) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["check"] = c.check;
    if (std::isfinite(c.value))
      j["value"] = c.value;
    else
      j["value"] = nullptr;
    if (c.tolerance >= 0.0)
      j["tolerance"] = c.tolerance;
    else
      j["tolerance"] = nullptr;
    j["passed"] = c.passed;
    out += j.dump() + "\n";
  }
  return out;
}

void append_report(const std::filesystem::path& log, const SuiteReport& report) {
  if (log.has_parent_path()) std::filesystem::create_directories(log.parent_path());
  std::ofstream out(log, std::ios::app | std::ios::binary);
  out << to_json_lines(report);
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + log.string());
}

}  // namespace ceurl::bench
