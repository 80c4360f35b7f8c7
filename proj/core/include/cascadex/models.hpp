#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cascadex/cascade.hpp"
#include "cascadex/graph.hpp"

namespace cascadex {

/// Probabilities are kept inside [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-12;

enum class ModelKind { SI, EXP, LOG };

std::string_view to_string(ModelKind k) noexcept;
ModelKind parse_model_kind(std::string_view name);

/// Global endogenous influence parameters. Only the fields used by `kind`
/// are meaningful: SI (p0), EXP (p0, lambda per window), LOG (k, a0).
struct EndogenousModel {
  ModelKind kind = ModelKind::SI;
  double p0 = 0.0;
  double lambda = 0.0;
  double k = 0.0;
  double a0 = 0.0;

  static EndogenousModel si(double p0) { return {ModelKind::SI, p0, 0.0, 0.0, 0.0}; }
  static EndogenousModel exp(double p0, double lambda) { return {ModelKind::EXP, p0, lambda, 0.0, 0.0}; }
  static EndogenousModel log(double k, double a0) { return {ModelKind::LOG, 0.0, 0.0, k, a0}; }

  /// Throws std::invalid_argument when a parameter is outside its domain.
  void validate() const;

  /// Half-life of one peer's influence, in windows (EXP only).
  double half_decay_windows() const { return lambda > 0 ? std::log(2.0) / lambda : std::numeric_limits<double>::infinity(); }

  friend bool operator==(const EndogenousModel&, const EndogenousModel&) = default;
};

/// 1 - (1 - p0)^a per node, evaluated as 1 - exp(a * log1p(-p0)).
std::vector<double> peer_prob_si(const SocialGraph& g, std::span<const std::uint32_t> active_counts,
                                 double p0);

/// 1 - prod_j (1 - p0 exp(-lambda (t - t_j))) over peers active before t,
/// elapsed time in windows. lambda == 0 defers to the SI form.
std::vector<double> peer_prob_exp(const SocialGraph& g, const Cascade& c, Window t, double p0,
                                  double lambda);

/// Logistic in the active-peer count. Nonzero even with no active peers.
std::vector<double> peer_prob_log(std::span<const std::uint32_t> active_counts, double k, double a0);

/// Dispatches on `model.kind` against the users active strictly before t.
std::vector<double> peer_prob(const SocialGraph& g, const Cascade& c, Window t,
                              const EndogenousModel& model);

/// log(1 - p_peer) per node, without forming p_peer.
std::vector<double> peer_log_survival(const SocialGraph& g, const Cascade& c, Window t,
                                      const EndogenousModel& model);

/// log(1 - p_peer) primitives shared by the likelihood and the simulator.
namespace survival {

inline double si(std::uint32_t active, double p0) {
  return active == 0 ? 0.0 : static_cast<double>(active) * std::log1p(-p0);
}

inline double exp_term(std::int64_t elapsed, double p0, double lambda) {
  return std::log1p(-p0 * std::exp(-lambda * static_cast<double>(elapsed)));
}

/// log(1 - sigmoid(x)) = -softplus(x), stable for large |x|.
inline double logistic(std::uint32_t active, double k, double a0) {
  const double x = k * (static_cast<double>(active) - a0);
  return x > 0 ? -x - std::log1p(std::exp(-x)) : -std::log1p(std::exp(x));
}

}  // namespace survival

/// Per-window exogenous activation probability.
struct ExogenousSeries {
  std::vector<double> p_ext;

  std::size_t size() const noexcept { return p_ext.size(); }
  double operator[](std::size_t t) const noexcept { return p_ext[t]; }
};

enum class ProfileShape { SpikeExponential, Constant, LinearDecay, Sinusoidal, Custom };

std::string_view to_string(ProfileShape s) noexcept;
ProfileShape parse_profile_shape(std::string_view name);

struct ExogenousEvent {
  double start = 0.0;  // window
  double peak = 0.0;
  double rate = 0.0;   // per window
};

/// Parametric shape of exogenous influence over time.
///
/// - spike-exponential: sum of peak * exp(-rate (t - start)) for t >= start,
///   plus `level` as a constant background
/// - constant: level
/// - linear-decay: level * max(0, 1 - t / duration)
/// - sinusoidal: level * (1 + sin(omega t + phase)) / 2
/// - custom: `series` passed through (padded with zeros)
struct ExogenousProfile {
  ProfileShape shape = ProfileShape::Constant;
  double level = 0.0;
  std::vector<ExogenousEvent> events;
  double duration = 1.0;
  double omega = 0.0;
  double phase = 0.0;
  std::vector<double> series;

  static ExogenousProfile constant(double level) {
    ExogenousProfile p;
    p.level = level;
    return p;
  }
  static ExogenousProfile spikes(std::vector<ExogenousEvent> events, double background = 0.0) {
    ExogenousProfile p;
    p.shape = ProfileShape::SpikeExponential;
    p.events = std::move(events);
    p.level = background;
    return p;
  }
};

/// Evaluates the profile at windows 0..T-1, clipping into [0, 1]. Clipped
/// values are reported on std::clog.
ExogenousSeries render_profile(const ExogenousProfile& profile, std::size_t horizon);

/// Single-column CSV of probabilities; an optional non-numeric header line
/// is skipped.
ExogenousSeries load_series_csv(const std::filesystem::path& path);

}  // namespace cascadex
