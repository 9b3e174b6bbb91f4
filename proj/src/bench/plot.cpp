#include "ceurl/bench/plot.hpp"

#include "ceurl/bench/records.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ceurl::bench {

PlotTable collect_plot_data(const std::filesystem::path& out_dir, const std::vector<std::string>& run_ids,
                            const std::string& metric) {
  if (run_ids.empty()) throw std::invalid_argument("emit-plot needs at least one run");
  std::set<std::string> unique(run_ids.begin(), run_ids.end());
  if (unique.size() != run_ids.size()) throw std::invalid_argument("emit-plot: a run is listed twice");
  std::map<long, std::vector<std::optional<double>>> grid;
  for (std::size_t k = 0; k < run_ids.size(); ++k) {
    for (const auto& r : read_metrics(out_dir / run_ids[k] / "metrics.jsonl")) {
      if (r.metric != metric) continue;
      auto& row = grid[r.step];
      row.resize(run_ids.size());
      if (row[k]) throw std::runtime_error("run " + run_ids[k] + " logs " + metric + " twice at step " +
                                           std::to_string(r.step));
      row[k] = r.value;
    }
  }
  PlotTable t;
  t.runs = run_ids;
  for (auto& [step, row] : grid) {
    t.steps.push_back(step);
    t.values.push_back(std::move(row));
  }
  return t;
}

std::string to_csv(const PlotTable& table) {
  std::ostringstream o;
  o << "step";
  for (const auto& r : table.runs) o << ',' << r;
  o << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.steps.size(); ++i) {
    o << table.steps[i];
    for (const auto& v : table.values[i]) {
      o << ',';
      if (v) {
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        o << buf;
      }
    }
    o << '\n';
  }
  return o.str();
}

PlotTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(l);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line)) throw std::runtime_error("empty plot table");
  auto header = cells(line);
  if (header.empty() || header[0] != "step") throw std::runtime_error("plot table must start with a step column");
  PlotTable t;
  t.runs.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = cells(line);
    if (c.size() != header.size()) throw std::runtime_error("ragged plot table row: " + line);
    t.steps.push_back(std::stol(c[0]));
    std::vector<std::optional<double>> row;
    for (std::size_t k = 1; k < c.size(); ++k) row.push_back(c[k].empty() ? std::nullopt : std::optional(std::stod(c[k])));
    t.values.push_back(std::move(row));
  }
  return t;
}

PlotTable emit_plot_data(const std::filesystem::path& out_dir, const std::vector<std::string>& run_ids,
                         const std::string& metric, const std::filesystem::path& output) {
  PlotTable t = collect_plot_data(out_dir, run_ids, metric);
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  write_file_atomic(output, to_csv(t));
  return t;
}

}  // namespace ceurl::bench
