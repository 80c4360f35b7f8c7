#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cascadex/attribution.hpp"
#include "cascadex/graph.hpp"
#include "cascadex/infer.hpp"
#include "cascadex/models.hpp"

namespace cascadex::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

/// Bad or missing configuration; `field()` is the dotted config path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct GraphSource {
  std::optional<std::filesystem::path> file;
  GraphFormat format = GraphFormat::EdgeList;
  std::string generator = "holme-kim";  // or "configuration"
  std::size_t n = 2000;
  std::size_t m = 3;
  double p = 0.1;
  std::vector<std::size_t> degrees;
  std::optional<std::filesystem::path> degree_file;
};

struct SimulationSpec {
  EndogenousModel model = EndogenousModel::si(0.01);
  ExogenousProfile profile = ExogenousProfile::constant(0.002);
  std::size_t n_seeds = 10;
  std::size_t horizon = 100;
};

struct InferenceSpec {
  ModelKind model = ModelKind::SI;
  InferenceSettings settings;
  std::vector<double> alpha_sweep;
};

struct AttributionSpec {
  ResponsibilityVariant variant = ResponsibilityVariant::Ratio;
  InfluenceWeighting weighting = InfluenceWeighting::Uniform;
  std::optional<double> lambda;  // exp-decay weighting; defaults to the fitted decay
  std::vector<std::string> groups{"share", "external", "ad"};
  std::size_t histogram_bins = 20;
};

struct ExperimentConfig {
  GraphSource graph;
  std::optional<std::filesystem::path> sessions;
  std::optional<std::filesystem::path> scores;  // evaluate: precomputed score,label CSV
  SimulationSpec simulation;
  InferenceSpec inference;
  AttributionSpec attribution;
  double dt = 30.0;  // minutes per window
  std::optional<std::size_t> horizon;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";
};

/// Reads a JSON document into a config. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Entry point behind `main`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cascadex::cli
