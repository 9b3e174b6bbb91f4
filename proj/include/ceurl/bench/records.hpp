#pragma once

#include "ceurl/agents/agent.hpp"
#include "ceurl/bench/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ceurl::bench {

inline constexpr std::string_view kCodeVersion = "ceurl 1.0.0";

std::string sha1_hex(std::string_view data);
/// Hash of `data` as git stores it: sha1("blob <size>\0" + data).
std::string content_hash(std::string_view data);
std::string code_version_hash();

/// First 16 hex digits of the canonical config text's hash; the text includes
/// the seed.
std::string make_run_id(const ExperimentConfig& config);

struct MetricRecord {
  std::string run_id;
  long step = 0;
  std::string metric;
  double value = 0.0;
};

/// One JSON object per line: {"run_id":..,"step":..,"metric":..,"value":..}.
/// Non-finite values are written as null and read back as NaN.
std::string to_json_line(const MetricRecord& record);
MetricRecord parse_metric_line(const std::string& line);
std::vector<MetricRecord> read_metrics(const std::filesystem::path& path);

/// Append-only metric log of one run. Every row is stamped with the run id
/// and flushed before append() returns.
class MetricsWriter {
 public:
  MetricsWriter(std::filesystem::path path, std::string run_id);
  void append(const std::vector<MetricRow>& rows);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string run_id_;
};

/// Run-level record kept next to the metric log. Wall-clock time lives here
/// and not in the metric log, which stays byte-identical across reruns.
struct RunMeta {
  std::string run_id;
  std::string config_text;
  std::string code_hash;
  std::vector<std::string> checkpoints;
  double wall_clock_seconds = 0.0;
};

void write_meta(const std::filesystem::path& path, const RunMeta& meta);
RunMeta read_meta(const std::filesystem::path& path);

/// Writes `text` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace ceurl::bench
