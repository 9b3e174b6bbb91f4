#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ceurl::bench {

/// Wide table: one row per step, one column per run; missing cells are empty.
struct PlotTable {
  std::vector<std::string> runs;
  std::vector<long> steps;
  std::vector<std::vector<std::optional<double>>> values;  // [step][run]
};

/// Outer join of `metric` over the runs' metric logs (out_dir/<run>/metrics.jsonl).
PlotTable collect_plot_data(const std::filesystem::path& out_dir, const std::vector<std::string>& run_ids,
                            const std::string& metric);

/// Comma-separated: header "step,<run>...", reals in %.17g.
std::string to_csv(const PlotTable& table);
PlotTable parse_csv(const std::string& text);

/// collect_plot_data followed by a write of to_csv; returns the table.
PlotTable emit_plot_data(const std::filesystem::path& out_dir, const std::vector<std::string>& run_ids,
                         const std::string& metric, const std::filesystem::path& output);

}  // namespace ceurl::bench
