#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ceurl::bench {

/// One named assertion. Checks without a tolerance (tolerance < 0) are
/// measurements that are logged and always pass.
struct CheckResult {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
  int failures() const;
};

struct VerifySettings {
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Minimax oracle on 50 random instances (horizon 3, beta 0.1, 1, 10), the
/// inner-maximum closed form against simplex maximization, and 1000 random
/// probes of convexity, shift invariance and the lower bound of g.
SuiteReport verify_theorem_suite(const VerifySettings& settings);

/// Two-state counterexample at several discounts plus policy-convexity
/// checks of single-embodiment occupancy sets.
SuiteReport verify_geometry_suite(const VerifySettings& settings);

/// Mutual-information identity (50 instances), skill decomposition (30
/// instances, the first with a single embodiment) and the logged gap between
/// the stepwise and trajectory rewards.
SuiteReport verify_skills_suite(const VerifySettings& settings);

/// Incremental against batch posteriors on 100 random trajectories and the
/// learned discriminators' gradients against central differences.
SuiteReport verify_discriminator_suite(const VerifySettings& settings);

/// One JSON object per check: {"suite","check","value","tolerance","passed"}.
std::string to_json_lines(const SuiteReport& report);
void append_report(const std::filesystem::path& log, const SuiteReport& report);

}  // namespace ceurl::bench
