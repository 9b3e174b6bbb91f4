#pragma once

#include "ceurl/core/mdp.hpp"
#include "ceurl/geometry/hull.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ceurl {

/// All |A|^|S| deterministic state-only policies with their occupancies.
struct PolicyEnumeration {
  std::vector<TabularPolicy> policies;
  std::vector<OccupancyMeasure> occupancies;

  /// Occupancies as columns of a dense matrix (vertex set for hull queries).
  Eigen::MatrixXd vertex_matrix() const;
};

inline constexpr int kMaxDeterministicPolicies = 4096;

/// Deterministic policies in odometer order (state 0 varies slowest).
std::vector<TabularPolicy> enumerate_deterministic_policies(int num_states, int num_actions);

/// With `per_embodiment` the occupancies are those of the embodiment with id
/// `embodiment_id`; otherwise the prior-weighted mixture occupancies.
PolicyEnumeration enumerate_deterministic_occupancies(const EmbodimentSet& set, bool per_embodiment,
                                                      int embodiment_id = 0);

HullQueryResult hull_membership(const OccupancyMeasure& point, const std::vector<OccupancyMeasure>& vertices,
                                double tol = 1e-8);

struct ConvexityViolation {
  TabularPolicy policy;
  Eigen::VectorXd occupancy;
  double distance = 0.0;
};

struct ConvexityReport {
  int policies_checked = 0;
  double max_distance = 0.0;
  double tolerance = 1e-8;
  std::vector<ConvexityViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Sample random stochastic policies and check each occupancy lies in the
/// hull of the deterministic occupancies of the same embodiment.
ConvexityReport verify_single_embodiment_convexity(const Embodiment& emb, int unified_num_actions, double gamma,
                                                   int num_random_policies, std::uint64_t seed,
                                                   double tol = 1e-8);

/// Every quantity of the two-state counterexample at one discount.
struct AppendixReport {
  double gamma = 0.0;
  /// rho_{e, pi_k} for the four deterministic policies, numeric and closed form.
  std::vector<Eigen::Vector2d> deterministic_e1, deterministic_e2;
  std::vector<Eigen::Vector2d> deterministic_e1_closed, deterministic_e2_closed;
  std::vector<Eigen::Vector2d> deterministic_mixture;
  /// The stochastic policy (a1 in s1, uniform in s2).
  Eigen::Vector2d stochastic_e1, stochastic_e2, stochastic_mixture;
  Eigen::Vector2d stochastic_e1_closed, stochastic_e2_closed, stochastic_mixture_closed;
  double hull_distance = 0.0;
  double hull_distance_closed = 0.0;
  bool inside = true;
  /// Largest |numeric - closed form| over all reported occupancies.
  double max_occupancy_error = 0.0;
  double tolerance = 1e-9;

  /// Numeric occupancies match the closed forms, the hull distance matches
  /// its closed form, and the inside/outside decision agrees with it.
  bool passed() const {
    return max_occupancy_error <= tolerance && std::abs(hull_distance - hull_distance_closed) <= 1e-8 &&
           inside == (hull_distance_closed <= 1e-8);
  }
};

AppendixReport reproduce_appendix_counterexample(double gamma);

}  // namespace ceurl
