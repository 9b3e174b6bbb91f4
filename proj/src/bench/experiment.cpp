#include "ceurl/bench/experiment.hpp"

#include "ceurl/agents/evaluate.hpp"
#include "ceurl/bench/checkpoint.hpp"
#include "ceurl/bench/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace ceurl::bench {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Committed {
  std::set<std::string> units;
  std::uintmax_t metrics_bytes = 0;
};

/// Reads stages.jsonl and cuts the metric log back to the last commit.
Committed recover(const fs::path& run_dir) {
  Committed c;
  const fs::path stages = run_dir / "stages.jsonl";
  if (fs::exists(stages)) {
    std::istringstream in(read_file(stages));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      c.units.insert(j.at("unit").get<std::string>());
      c.metrics_bytes = j.at("metrics_bytes").get<std::uintmax_t>();
    }
  }
  const fs::path metrics = run_dir / "metrics.jsonl";
  if (fs::exists(metrics)) {
    if (fs::file_size(metrics) < c.metrics_bytes) throw std::runtime_error(metrics.string() + " is shorter than its commit log");
    if (fs::file_size(metrics) > c.metrics_bytes) fs::resize_file(metrics, c.metrics_bytes);
  } else if (c.metrics_bytes > 0) {
    throw std::runtime_error(metrics.string() + " is missing");
  }
  return c;
}

void commit(const fs::path& run_dir, const std::string& unit) {
  const fs::path metrics = run_dir / "metrics.jsonl";
  json j;
  j["unit"] = unit;
  j["metrics_bytes"] = fs::exists(metrics) ? fs::file_size(metrics) : 0;
  std::ofstream out(run_dir / "stages.jsonl", std::ios::app | std::ios::binary);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to the commit log in " + run_dir.string());
}

std::vector<MetricRow> prefixed(const std::vector<MetricRow>& rows, const std::string& from, const std::string& to) {
  std::vector<MetricRow> out = rows;
  for (auto& r : out)
    if (r.metric.rfind(from, 0) == 0) r.metric = to + r.metric.substr(from.size());
  return out;
}

std::string file_name(const std::string& unit) {
  std::string s = unit;
  for (char& ch : s)
    if (ch == '/') ch = '-';
  return s + ".ckpt";
}

TrainConfig scratch_config(const TrainConfig& base) {
  TrainConfig c = base;
  c.conditioning = Conditioning::State;
  c.reward = IntrinsicRewardSpec{};
  return c;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& input, const ExperimentOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig config = input;
  if (options.threads) config.train.threads = *options.threads;
  config.validate();
  const TrainConfig& tc = config.train;
  const bool skills = tc.reward.has_diayn();

  ExperimentOutcome out;
  out.run_id = make_run_id(config);
  out.run_dir = options.out_dir / out.run_id;
  const fs::path ckpt_dir = out.run_dir / "checkpoints";
  fs::create_directories(ckpt_dir);

  const std::string text = to_config_text(config);
  const fs::path config_file = out.run_dir / "config.ini";
  if (fs::exists(config_file)) {
    if (read_file(config_file) != text)
      throw std::runtime_error("run directory " + out.run_dir.string() + " holds a different configuration");
  } else {
    write_file_atomic(config_file, text);
  }
  RunMeta meta;
  const fs::path meta_file = out.run_dir / "meta.json";
  if (fs::exists(meta_file)) meta = read_meta(meta_file);
  meta.run_id = out.run_id;
  meta.config_text = text;
  meta.code_hash = code_version_hash();

  Committed done = recover(out.run_dir);
  MetricsWriter writer(out.run_dir / "metrics.jsonl", out.run_id);

  EmbodimentSet train_set, test_set;
  if (config.held_out) {
    const auto [train_spec, test_spec] = train_test_split(config.env, tc.seed);
    train_set = build_env(train_spec);
    test_set = build_env(test_spec);
  } else {
    train_set = build_env(config.env);
  }

  auto run_unit = [&](const std::string& unit, auto&& body) {
    if (done.units.count(unit)) {
      out.reused.push_back(unit);
      return;
    }
    body();
    commit(out.run_dir, unit);
    done.units.insert(unit);
    out.ran.push_back(unit);
  };
  auto record_checkpoint = [&](const std::string& name) {
    if (std::find(meta.checkpoints.begin(), meta.checkpoints.end(), name) == meta.checkpoints.end())
      meta.checkpoints.push_back(name);
  };

  const std::string pre_file = file_name("pretrain");
  run_unit("pretrain", [&] {
    TrainResult r = skills ? pretrain_peac_diayn(train_set, tc) : pretrain_peac(train_set, tc);
    save_agent(ckpt_dir / pre_file, r.state, "pretrain");
    writer.append(r.metrics);
  });
  record_checkpoint(pre_file);

  if (options.until >= Stage::Finetune) {
    // Every later unit restarts from the checkpoint, fresh run or resumed.
    const AgentState pretrained = load_agent(ckpt_dir / pre_file, train_set, tc);
    for (const auto& task : config.tasks) {
      const RewardTable reward = make_task(config.env, task);
      const std::string unit = "finetune/" + task;
      run_unit(unit, [&] {
        if (skills) {
          MetaResult r = finetune_meta_controller(pretrained, train_set, reward, tc);
          save_controller(ckpt_dir / file_name(unit), r.controller, unit);
          writer.append(prefixed(r.metrics, "meta/", "finetune/" + task + "/"));
        } else {
          TrainResult r = finetune(pretrained, train_set, reward, tc, config.finetune_mode);
          save_agent(ckpt_dir / file_name(unit), r.state, unit);
          writer.append(prefixed(r.metrics, "finetune/", "finetune/" + task + "/"));
        }
      });
      record_checkpoint(file_name(unit));
      if (config.scratch_baseline) {
        const std::string sunit = "scratch/" + task;
        run_unit(sunit, [&] {
          const TrainConfig sc = scratch_config(tc);
          TrainResult r = finetune(initial_state(train_set, sc), train_set, reward, sc, FinetuneMode::InitOnly);
          save_agent(ckpt_dir / file_name(sunit), r.state, sunit);
          writer.append(prefixed(r.metrics, "finetune/", "scratch/" + task + "/"));
        });
        record_checkpoint(file_name(sunit));
      }
    }
  }

  if (options.until >= Stage::Eval) {
    run_unit("eval", [&] {
      EvalSettings es = config.eval;
      es.seed = tc.seed;
      es.threads = tc.threads;
      const AgentState pretrained = load_agent(ckpt_dir / pre_file, train_set, tc);
      std::vector<MetricRow> rows;
      auto emit = [&](const std::string& prefix, const std::vector<EmbodimentEvaluation>& evals,
                      const EmbodimentSet& set) {
        for (const auto& ev : evals)
          rows.push_back({tc.finetune_steps, prefix + "/e" + std::to_string(ev.embodiment_id),
                          ev.analytic_return.value_or(ev.mc_mean)});
        rows.push_back({tc.finetune_steps, prefix + "/mean", mean_return(evals, set)});
      };
      std::vector<std::pair<std::string, const EmbodimentSet*>> splits{{"train", &train_set}};
      if (config.held_out) splits.push_back({"held-out", &test_set});
      for (const auto& task : config.tasks) {
        const RewardTable reward = make_task(config.env, task);
        for (const auto& [split, set] : splits) {
          const std::string base = "eval/" + task;
          if (skills) {
            const MetaController mc = load_controller(ckpt_dir / file_name("finetune/" + task));
            emit(base + "/pretrained/" + split, evaluate(mc, pretrained, *set, reward, es, tc.meta_sub_horizon), *set);
          } else {
            const AgentState agent = load_agent(ckpt_dir / file_name("finetune/" + task), train_set, tc);
            emit(base + "/pretrained/" + split, evaluate(agent, *set, reward, es), *set);
          }
          if (config.scratch_baseline) {
            const TrainConfig sc = scratch_config(tc);
            const AgentState agent = load_agent(ckpt_dir / file_name("scratch/" + task), train_set, sc);
            emit(base + "/scratch/" + split, evaluate(agent, *set, reward, es), *set);
          }
        }
      }
      writer.append(rows);
    });
    out.evaluations = read_evaluations(out.run_dir);
  }

  meta.wall_clock_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_meta(meta_file, meta);
  return out;
}

ExperimentOutcome run_experiment(const fs::path& config_path, const ExperimentOptions& options) {
  return run_experiment(load_config(config_path), options);
}

std::vector<EvalRecord> read_evaluations(const fs::path& run_dir) {
  std::vector<EvalRecord> out;
  for (const auto& r : read_metrics(run_dir / "metrics.jsonl")) {
    if (r.metric.rfind("eval/", 0) != 0) continue;
    std::vector<std::string> parts;
    std::stringstream ss(r.metric);
    std::string part;
    while (std::getline(ss, part, '/')) parts.push_back(part);
    if (parts.size() != 5) continue;
    EvalRecord e{parts[1], parts[2], parts[3], std::nullopt, r.value};
    if (parts[4] != "mean") e.embodiment_id = std::stoi(parts[4].substr(1));
    out.push_back(e);
  }
  return out;
}

}  // namespace ceurl::bench
