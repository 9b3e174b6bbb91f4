#include "ceurl/geometry/occupancy_geometry.hpp"

#include "ceurl/bench/envs.hpp"

#include <cmath>

namespace ceurl {

Eigen::MatrixXd PolicyEnumeration::vertex_matrix() const {
  if (occupancies.empty()) return {};
  Eigen::MatrixXd v(occupancies.front().dist.size(), static_cast<Eigen::Index>(occupancies.size()));
  for (std::size_t i = 0; i < occupancies.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = occupancies[i].dist;
  return v;
}

std::vector<TabularPolicy> enumerate_deterministic_policies(int num_states, int num_actions) {
  const double count = std::pow(static_cast<double>(num_actions), num_states);
  if (count > kMaxDeterministicPolicies)
    throw SizeGuardError("|A|^|S| = " + std::to_string(count) + " exceeds the enumeration guard of " +
                         std::to_string(kMaxDeterministicPolicies));
  std::vector<TabularPolicy> out;
  std::vector<int> choice(static_cast<std::size_t>(num_states), 0);
  while (true) {
    out.push_back(TabularPolicy::deterministic(choice, num_actions));
    int s = num_states - 1;
    while (s >= 0 && ++choice[static_cast<std::size_t>(s)] == num_actions) choice[static_cast<std::size_t>(s--)] = 0;
    if (s < 0) break;
  }
  return out;
}

PolicyEnumeration enumerate_deterministic_occupancies(const EmbodimentSet& set, bool per_embodiment,
                                                      int embodiment_id) {
  set.validate();
  PolicyEnumeration out;
  out.policies = enumerate_deterministic_policies(set.num_states(), set.unified_num_actions);
  out.occupancies.reserve(out.policies.size());
  for (const auto& pi : out.policies)
    out.occupancies.push_back(per_embodiment ? occupancy(set.by_id(embodiment_id), pi, set.discount)
                                             : mixture_occupancy(set, pi));
  return out;
}

HullQueryResult hull_membership(const OccupancyMeasure& point, const std::vector<OccupancyMeasure>& vertices,
                                double tol) {
  if (vertices.empty()) throw std::invalid_argument("hull_membership: empty vertex set");
  Eigen::MatrixXd v(point.dist.size(), static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].dist.size() != point.dist.size()) throw std::invalid_argument("hull_membership: dimension mismatch");
    v.col(static_cast<Eigen::Index>(i)) = vertices[i].dist;
  }
  return hull_membership<double>(point.dist, v, tol);
}

ConvexityReport verify_single_embodiment_convexity(const Embodiment& emb, int unified_num_actions, double gamma,
                                                   int num_random_policies, std::uint64_t seed, double tol) {
  emb.validate(unified_num_actions);
  ConvexityReport report;
  report.tolerance = tol;
  const auto policies = enumerate_deterministic_policies(emb.num_states, unified_num_actions);
  Eigen::MatrixXd vertices(emb.num_states, static_cast<Eigen::Index>(policies.size()));
  for (std::size_t i = 0; i < policies.size(); ++i)
    vertices.col(static_cast<Eigen::Index>(i)) = occupancy(emb, policies[i], gamma).dist;

  Rng rng(seed);
  for (int k = 0; k < num_random_policies; ++k) {
    auto pi = TabularPolicy::uniform(emb.num_states, unified_num_actions);
    for (int s = 0; s < emb.num_states; ++s) pi.probs.row(s) = random_simplex_point(rng, unified_num_actions).transpose();
    const Eigen::VectorXd d = occupancy(emb, pi, gamma).dist;
    const auto q = hull_membership<double>(d, vertices, tol);
    ++report.policies_checked;
    report.max_distance = std::max(report.max_distance, q.distance);
    if (!q.inside) report.violations.push_back({pi, d, q.distance});
  }
  return report;
}

AppendixReport reproduce_appendix_counterexample(double gamma) {
  const EmbodimentSet set = bench::appendix_a1(gamma);
  const auto& e1 = set.embodiments[0];
  const auto& e2 = set.embodiments[1];
  const double g = gamma;

  AppendixReport r;
  r.gamma = gamma;
  const auto policies = enumerate_deterministic_policies(2, 2);  // pi_1 .. pi_4 in the listed order
  const Eigen::Vector2d half(0.5, 0.5), tilt((1 + g) / 2, (1 - g) / 2), untilt((1 - g) / 2, (1 + g) / 2);
  r.deterministic_e1_closed = {half, tilt, untilt, half};
  r.deterministic_e2_closed = {half, untilt, tilt, half};

  auto track = [&r](const Eigen::Vector2d& numeric, const Eigen::Vector2d& closed) {
    r.max_occupancy_error = std::max(r.max_occupancy_error, (numeric - closed).cwiseAbs().maxCoeff());
  };

  std::vector<OccupancyMeasure> mixture_vertices;
  for (std::size_t k = 0; k < policies.size(); ++k) {
    r.deterministic_e1.push_back(occupancy(e1, policies[k], g).dist);
    r.deterministic_e2.push_back(occupancy(e2, policies[k], g).dist);
    mixture_vertices.push_back(mixture_occupancy(set, policies[k]));
    r.deterministic_mixture.push_back(mixture_vertices.back().dist);
    track(r.deterministic_e1.back(), r.deterministic_e1_closed[k]);
    track(r.deterministic_e2.back(), r.deterministic_e2_closed[k]);
    track(r.deterministic_mixture.back(), half);
  }

  auto stochastic = TabularPolicy::uniform(2, 2);
  stochastic.probs << 1.0, 0.0, 0.5, 0.5;
  r.stochastic_e1 = occupancy(e1, stochastic, g).dist;
  r.stochastic_e2 = occupancy(e2, stochastic, g).dist;
  const auto mix = mixture_occupancy(set, stochastic);
  r.stochastic_mixture = mix.dist;
  r.stochastic_e1_closed = Eigen::Vector2d(1 / (2 - g), (1 - g) / (2 - g));
  r.stochastic_e2_closed = Eigen::Vector2d(1 / (2 + g), (1 + g) / (2 + g));
  r.stochastic_mixture_closed = Eigen::Vector2d(2 / (4 - g * g), (2 - g * g) / (4 - g * g));
  track(r.stochastic_e1, r.stochastic_e1_closed);
  track(r.stochastic_e2, r.stochastic_e2_closed);
  track(r.stochastic_mixture, r.stochastic_mixture_closed);

  const auto q = hull_membership(mix, mixture_vertices);
  r.hull_distance = q.distance;
  r.inside = q.inside;
  r.hull_distance_closed = std::sqrt(2.0) * std::abs(2 / (4 - g * g) - 0.5);
  return r;
}

}  // namespace ceurl
