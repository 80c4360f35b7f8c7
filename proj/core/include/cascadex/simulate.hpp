#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cascadex/attribution.hpp"
#include "cascadex/cascade.hpp"
#include "cascadex/graph.hpp"
#include "cascadex/models.hpp"

namespace cascadex {

enum class TruthLabel { Endogenous, Exogenous, Seed, Never };

std::string_view to_string(TruthLabel l) noexcept;

struct SimConfig {
  EndogenousModel model;
  ExogenousProfile profile;
  std::size_t n_seeds = 5;
  std::size_t horizon = 100;  // windows
  std::uint64_t seed = 1;
  double window_width = 30.0;  // minutes, >= 1
};

struct SimOutcome {
  Cascade cascade;
  std::vector<TruthLabel> truth;
  ExogenousSeries p_ext;  // rendered profile
  std::vector<std::size_t> true_endogenous;  // per window
  std::vector<std::size_t> true_exogenous;
};

/// Discrete-time forward simulation. Seeds activate in window 0; in every
/// later window each inactive user draws an endogenous success with
/// probability p_peer (peers active before the window) and, independently,
/// an exogenous success with probability p_ext(t). A double success is
/// labeled endogenous with probability p_peer / (p_peer + p_ext). Every draw
/// comes from a Philox stream keyed by (user, window), so the outcome depends
/// only on the graph and the config.
SimOutcome simulate(const SocialGraph& g, const SimConfig& cfg);

CountSeries ground_truth_series(const SimOutcome& outcome);

/// Session rows for the activated users: endogenous -> "share",
/// exogenous -> "external", seeds -> "unknown".
SessionTable to_sessions(const SimOutcome& outcome, const SocialGraph& g);

}  // namespace cascadex
