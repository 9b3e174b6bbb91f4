#include "ceurl/bench/records.hpp"

#include <json.hpp>
#include <openssl/sha.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ceurl::bench {

using nlohmann::json;

std::string sha1_hex(std::string_view data) {
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

std::string content_hash(std::string_view data) {
  std::string blob = "blob " + std::to_string(data.size());
  blob += '\0';
  blob.append(data);
  return sha1_hex(blob);
}

std::string code_version_hash() { return content_hash(kCodeVersion); }

std::string make_run_id(const ExperimentConfig& config) { return sha1_hex(to_config_text(config)).substr(0, 16); }

std::string to_json_line(const MetricRecord& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["step"] = r.step;
  j["metric"] = r.metric;
  if (std::isfinite(r.value))
    j["value"] = r.value;
  else
    j["value"] = nullptr;
  return j.dump();
}

MetricRecord parse_metric_line(const std::string& line) {
  const json j = json::parse(line);
  MetricRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.step = j.at("step").get<long>();
  r.metric = j.at("metric").get<std::string>();
  const auto& v = j.at("value");
  r.value = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  return r;
}

std::vector<MetricRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metric log " + path.string());
  std::vector<MetricRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(parse_metric_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": bad metric row: " + e.what());
    }
  }
  return out;
}

MetricsWriter::MetricsWriter(std::filesystem::path path, std::string run_id)
    : path_(std::move(path)), run_id_(std::move(run_id)) {}

void MetricsWriter::append(const std::vector<MetricRow>& rows) {
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot append to " + path_.string());
  for (const auto& row : rows) out << to_json_line({run_id_, row.step, row.metric, row.value}) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed on " + path_.string());
}

void write_meta(const std::filesystem::path& path, const RunMeta& meta) {
  json j;
  j["run_id"] = meta.run_id;
  j["config"] = meta.config_text;
  j["code_hash"] = meta.code_hash;
  j["checkpoints"] = meta.checkpoints;
  j["wall_clock_seconds"] = meta.wall_clock_seconds;
  write_file_atomic(path, j.dump(2) + "\n");
}

RunMeta read_meta(const std::filesystem::path& path) {
  const json j = json::parse(read_file(path));
  RunMeta m;
  m.run_id = j.at("run_id").get<std::string>();
  m.config_text = j.at("config").get<std::string>();
  m.code_hash = j.at("code_hash").get<std::string>();
  m.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
  m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed on " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ceurl::bench
