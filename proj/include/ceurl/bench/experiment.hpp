#pragma once

#include "ceurl/bench/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ceurl::bench {

enum class Stage { Pretrain = 0, Finetune = 1, Eval = 2 };

struct ExperimentOptions {
  std::filesystem::path out_dir = "runs";
  /// Last stage to run; later stages are left for a later invocation.
  Stage until = Stage::Eval;
  /// Overrides the config's thread count. Results do not depend on it.
  std::optional<int> threads;
};

/// One evaluated return: per embodiment, or the prior-weighted mean when
/// embodiment_id is absent.
struct EvalRecord {
  std::string task;
  std::string arm;    // "pretrained" or "scratch"
  std::string split;  // "train" or "held-out"
  std::optional<int> embodiment_id;
  double value = 0.0;
};

struct ExperimentOutcome {
  std::string run_id;
  std::filesystem::path run_dir;
  /// Stage units run by this call, and those found complete from earlier calls.
  std::vector<std::string> ran, reused;
  std::vector<EvalRecord> evaluations;
};

/// pretrain -> fine-tune per task (plus a from-scratch baseline) -> evaluate
/// on the training embodiments and, when configured, the held-out ones.
///
/// Layout of out_dir/<run id>/: config.ini, meta.json, metrics.jsonl,
/// stages.jsonl and checkpoints/. A unit of work is committed by appending to
/// stages.jsonl after its checkpoint and metric rows are written; rerunning
/// skips committed units and discards an uncommitted metric tail, so a rerun
/// reproduces the same metric log byte for byte.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const ExperimentOptions& options);

/// Parses first; a bad config throws ConfigError and writes nothing.
ExperimentOutcome run_experiment(const std::filesystem::path& config_path, const ExperimentOptions& options);

/// Evaluation rows recorded in a run directory's metric log.
std::vector<EvalRecord> read_evaluations(const std::filesystem::path& run_dir);

}  // namespace ceurl::bench
