// ceurl: command-line front end for experiments and verification suites.
//
// Exit status: 0 success, 1 a verification check failed or a run failed,
// 2 usage or configuration error.

#include "ceurl/bench/config.hpp"
#include "ceurl/bench/experiment.hpp"
#include "ceurl/bench/plot.hpp"
#include "ceurl/bench/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ceurl::bench;

namespace {

constexpr int kUsageError = 2;
constexpr int kFailure = 1;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir = "runs";
  int threads = 1;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int run_stage(const Globals& g, Stage until) {
  if (g.config.empty()) throw UsageError("--config is required");
  ExperimentConfig cfg = load_config(g.config);
  if (g.seed) cfg.train.seed = *g.seed;
  ExperimentOptions opt;
  opt.out_dir = g.out_dir;
  opt.until = until;
  opt.threads = g.threads;
  const ExperimentOutcome out = run_experiment(cfg, opt);
  std::printf("run %s in %s\n", out.run_id.c_str(), out.run_dir.string().c_str());
  for (const auto& u : out.reused) std::printf("  reused %s\n", u.c_str());
  for (const auto& u : out.ran) std::printf("  ran    %s\n", u.c_str());
  for (const auto& e : out.evaluations)
    if (!e.embodiment_id)
      std::printf("  %-10s %-10s %-8s mean return %.6f\n", e.task.c_str(), e.arm.c_str(), e.split.c_str(), e.value);
  return 0;
}

int run_suites(const Globals& g, const std::vector<SuiteReport (*)(const VerifySettings&)>& suites,
               const std::string& log) {
  VerifySettings s;
  s.seed = g.seed.value_or(0);
  s.threads = g.threads;
  const fs::path log_path = log.empty() ? fs::path(g.out_dir) / "verify.jsonl" : fs::path(log);
  bool ok = true;
  for (auto suite : suites) {
    const SuiteReport r = suite(s);
    append_report(log_path, r);
    for (const auto& c : r.checks)
      if (!c.passed) std::printf("  FAIL %s/%s value %.3e tolerance %.1e\n", r.suite.c_str(), c.check.c_str(), c.value,
                                 c.tolerance);
    std::printf("%s %s: %zu checks, %d failed\n", r.passed() ? "PASS" : "FAIL", r.suite.c_str(), r.checks.size(),
                r.failures());
    ok = ok && r.passed();
  }
  std::printf("log: %s\n", log_path.string().c_str());
  return ok ? 0 : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-embodiment unsupervised RL experiments and verification suites"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed")->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "Experiment configuration file");
  app.add_option("--out-dir", g.out_dir, "Directory for run records and logs")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::function<int()> action;
  auto stage = [&](const char* name, const char* help, Stage until) {
    app.add_subcommand(name, help)->fallthrough()->callback([&, until] { action = [&, until] { return run_stage(g, until); }; });
  };
  stage("pretrain", "Run (or resume) the pre-training stage", Stage::Pretrain);
  stage("finetune", "Run (or resume) through fine-tuning", Stage::Finetune);
  stage("eval", "Run (or resume) through evaluation", Stage::Eval);
  stage("run", "Full pipeline: pre-train, fine-tune, evaluate", Stage::Eval);

  std::string log;
  auto suites = [&](const char* name, const char* help, std::vector<SuiteReport (*)(const VerifySettings&)> list) {
    auto* sub = app.add_subcommand(name, help)->fallthrough();
    sub->add_option("--log", log, "JSON-lines log (default <out-dir>/verify.jsonl)");
    sub->callback([&, list] { action = [&, list] { return run_suites(g, list, log); }; });
  };
  suites("verify-theorem", "Minimax oracle and inner-maximum checks", {verify_theorem_suite});
  suites("verify-geometry", "Occupancy geometry checks", {verify_geometry_suite});
  suites("verify-skills", "Mutual-information and skill decomposition checks", {verify_skills_suite});
  suites("verify", "Every verification suite",
         {verify_geometry_suite, verify_theorem_suite, verify_skills_suite, verify_discriminator_suite});

  std::vector<std::string> runs;
  std::string metric, output;
  auto* plot = app.add_subcommand("emit-plot", "Wide CSV of one metric across runs")->fallthrough();
  plot->add_option("--runs", runs, "Run ids under --out-dir")->required()->delimiter(',');
  plot->add_option("--metric", metric, "Metric name")->required();
  plot->add_option("--output", output, "Output CSV path")->required();
  plot->callback([&] {
    action = [&] {
      const PlotTable t = emit_plot_data(g.out_dir, runs, metric, output);
      std::printf("%zu rows x %zu runs -> %s\n", t.steps.size(), t.runs.size(), output.c_str());
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (*seed_opt) g.seed = seed;
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
