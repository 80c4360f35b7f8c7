#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cascadex::cli {

/// Shortest stable text for a double ("%.12g"; inf and nan spelled out).
std::string num(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool steps = false;  // bars instead of a line
};

/// Minimal static SVG chart: axes, tick labels, one polyline (or bar set)
/// per series and a legend.
std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool unit_square = false);

}  // namespace cascadex::cli
