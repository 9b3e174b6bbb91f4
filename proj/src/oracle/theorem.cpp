#include "ceurl/oracle/theorem.hpp"

#include "ceurl/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ceurl {

double g_value(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta, int embodiment) {
  return inner_max_closed_form(space, reward, beta, embodiment).value;
}

Eigen::VectorXd g_gradient(const FiniteTrajectorySpace& space, const Eigen::VectorXd& reward, double beta,
                           int embodiment) {
  return inner_max_closed_form(space, reward, beta, embodiment).p_star - space.prob.row(embodiment).transpose();
}

double kl_to_mixture(const FiniteTrajectorySpace& space, int embodiment) {
  double kl = 0.0;
  for (Eigen::Index t = 0; t < space.size(); ++t) {
    const double p = space.prob(embodiment, t);
    if (p <= 0.0) continue;
    if (is_impossible(space.log_mixture(t))) return std::numeric_limits<double>::infinity();
    kl += p * (space.log_prob(embodiment, t) - space.log_mixture(t));
  }
  return kl;
}

RewardMinimum minimize_g(const FiniteTrajectorySpace& space, double beta, int embodiment, int max_iterations,
                         double tol) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const Eigen::VectorXd pe = space.prob.row(embodiment).transpose();
  const Eigen::Index n = space.size();
  // Off the support of p_e the infimum is only approached as R -> -inf, so
  // those entries sit at -inf and the descent runs over the rest.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(pe(i) > 0.0) && space.mixture(i) > 0.0) u(i) = impossible<double>();

  auto h = [&](const Eigen::VectorXd& v) {
    double dot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (pe(i) > 0.0) dot += pe(i) * v(i);
    return log_sum_exp(space.log_mixture + v) - dot;
  };

  RewardMinimum out;
  double hu = h(u);
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    const Eigen::VectorXd p = softmax(space.log_mixture + u);
    const Eigen::VectorXd grad = p - pe;
    out.gradient_norm = grad.cwiseAbs().maxCoeff();
    if (out.gradient_norm <= tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (p(i) > 0.0) d(i) = pe(i) / p(i) - 1.0;
    const double slope = grad.dot(d);
    const double slack = 1e-15 * std::max(1.0, std::abs(hu));
    double t = 1.0, h_new = h(u + d);
    while (h_new > hu + 1e-4 * t * slope + slack && t > 1e-12) {
      t *= 0.5;
      h_new = h(u + t * d);
    }
    if (t <= 1e-12) break;
    u += t * d;
    hu = h_new;
  }
  if (!out.converged) out.gradient_norm = (softmax(space.log_mixture + u) - pe).cwiseAbs().maxCoeff();

  for (Eigen::Index i = 0; i < n; ++i)
    if (is_impossible(space.log_mixture(i))) u(i) = 0.0;
  out.reward = beta * u;
  out.value = beta * h(u);
  return out;
}

double OracleReport::max_gap() const {
  double g = 0.0;
  for (const auto& e : embodiments) g = std::max(g, e.gap);
  return g;
}

bool OracleReport::passed() const {
  for (const auto& e : embodiments)
    if (!e.converged || !(e.gap < tolerance)) return false;
  return true;
}

OracleReport verify_theorem_1(const FiniteTrajectorySpace& space, double beta, double tol) {
  OracleReport report;
  report.beta = beta;
  report.tolerance = tol;
  for (int e = 0; e < space.num_embodiments(); ++e) {
    if (!(space.prior(e) > 0.0)) continue;
    EmbodimentOracleResult r;
    r.embodiment_id = space.embodiment_ids[static_cast<std::size_t>(e)];
    r.kl = kl_to_mixture(space, e);
    r.closed_form_value = -beta * r.kl;
    const RewardMinimum m = minimize_g(space, beta, e);
    r.stationarity = m.gradient_norm;
    r.argmin_reward = m.reward;
    r.numeric_minimax_value = m.value;
    r.argmax_distribution = inner_max_closed_form(space, m.reward, beta, e).p_star;
    r.gap = std::abs(r.numeric_minimax_value - r.closed_form_value);
    r.converged = m.converged;
    report.embodiments.push_back(std::move(r));
  }
  return report;
}

OracleReport verify_theorem_1(const EmbodimentSet& set, const TabularPolicy& policy, int horizon, double beta,
                              double tol) {
  return verify_theorem_1(enumerate_space(set, policy, horizon), beta, tol);
}

RandomInstance random_ce_mdp(Rng& rng, int max_states, int max_actions, int max_embodiments, int num_skills) {
  if (max_states < 1 || max_actions < 1 || max_embodiments < 1 || num_skills < 1)
    throw std::invalid_argument("random_ce_mdp: sizes must be positive");
  const int s_count = 1 + rng.below(max_states);
  const int a_count = 1 + rng.below(max_actions);
  const int m = 1 + rng.below(max_embodiments);

  RandomInstance out;
  out.set.unified_num_actions = a_count;
  out.set.discount = 0.9;
  out.set.prior = random_simplex_point(rng, m);
  for (int e = 0; e < m; ++e) {
    Embodiment emb;
    emb.id = e;
    emb.num_states = s_count;
    emb.num_actions = a_count;
    emb.transition.resize(static_cast<Eigen::Index>(s_count) * a_count, s_count);
    for (Eigen::Index r = 0; r < emb.transition.rows(); ++r) {
      Eigen::VectorXd row = random_simplex_point(rng, s_count);
      for (int j = 0; j < s_count; ++j)
        if (rng.uniform() < 1.0 / 3.0) row(j) = 0.0;
      if (row.sum() == 0.0) row(rng.below(s_count)) = 1.0;
      emb.transition.row(r) = (row / row.sum()).transpose();
    }
    emb.initial_dist = random_simplex_point(rng, s_count);
    for (int a = 0; a < a_count; ++a) emb.action_projector.push_back(a);
    out.set.embodiments.push_back(std::move(emb));
  }
  out.set.validate();

  const Conditioning mode = num_skills > 1 ? Conditioning::StateSkill : Conditioning::State;
  out.policy = TabularPolicy::uniform(s_count, a_count, mode, num_skills);
  for (Eigen::Index r = 0; r < out.policy.probs.rows(); ++r)
    out.policy.probs.row(r) = random_simplex_point(rng, a_count).transpose();
  return out;
}

bool TheoremBatchReport::passed() const {
  if (static_cast<int>(reports.size()) != instances * static_cast<int>(betas.size())) return false;
  for (const auto& r : reports)
    if (!r.passed()) return false;
  return linear_in_beta;
}

TheoremBatchReport verify_theorem_1_batch(int instances, int horizon, const std::vector<double>& betas,
                                          std::uint64_t seed, int threads, double tol) {
  if (betas.empty()) throw std::invalid_argument("beta sweep is empty");
  TheoremBatchReport batch;
  batch.betas = betas;
  batch.instances = instances;
  batch.reports.resize(static_cast<std::size_t>(instances) * betas.size());
  const Rng root(seed);
  parallel_for(instances, threads, [&](int i) {
    Rng rng = root.fork(static_cast<std::uint64_t>(i));
    const RandomInstance inst = random_ce_mdp(rng, 3, 2, 3);
    const FiniteTrajectorySpace space = enumerate_space(inst.set, inst.policy, horizon);
    for (std::size_t b = 0; b < betas.size(); ++b)
      batch.reports[static_cast<std::size_t>(i) * betas.size() + b] = verify_theorem_1(space, betas[b], tol);
  });

  const double min_beta = *std::min_element(betas.begin(), betas.end());
  for (int i = 0; i < instances; ++i) {
    const auto& base = batch.reports[static_cast<std::size_t>(i) * betas.size()];
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const auto& rep = batch.reports[static_cast<std::size_t>(i) * betas.size() + b];
      batch.max_gap = std::max(batch.max_gap, rep.max_gap());
      for (std::size_t e = 0; e < rep.embodiments.size(); ++e) {
        const double scaled = rep.embodiments[e].numeric_minimax_value / rep.beta;
        const double scaled0 = base.embodiments[e].numeric_minimax_value / base.beta;
        if (!(std::abs(scaled - scaled0) <= 2.0 * tol / min_beta)) batch.linear_in_beta = false;
      }
    }
  }
  return batch;
}

}  // namespace ceurl
