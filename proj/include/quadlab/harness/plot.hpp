#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace quadlab::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Columns step_or_generation, return and best_return of a metrics CSV.
std::vector<Series> read_metrics_series(const std::filesystem::path& metrics_csv);

// Reward-vs-time line chart as a standalone SVG document.
std::string line_chart_svg(const std::vector<Series>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label);

void plot_metrics(const std::filesystem::path& metrics_csv, const std::filesystem::path& svg_out);

}  // namespace quadlab::harness
