#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cascadex/cascade.hpp"
#include "cascadex/graph.hpp"
#include "cascadex/likelihood.hpp"
#include "cascadex/models.hpp"
#include "cascadex/optimize.hpp"

namespace cascadex {

/// How two-parameter endogenous models (EXP, LOG) are fitted globally.
///  - Never: bounded simplex search only
///  - Auto: simplex search; lattice of 1-D fits when the search fails
///  - Always: lattice of 1-D fits, polished by a simplex search
enum class LatticeMode { Never, Auto, Always };

std::string_view to_string(LatticeMode m) noexcept;
LatticeMode parse_lattice_mode(std::string_view name);

/// Bounds and budgets of the bounded local searches. Probabilities are
/// searched on a log scale, the remaining parameters linearly.
struct OptimizerSpec {
  optimize::Bound p0{1e-8, 0.999};
  optimize::Bound p_ext{1e-8, 0.999};
  optimize::Bound lambda{0.0, 10.0};
  optimize::Bound k{0.0, 20.0};
  std::optional<optimize::Bound> a0;  // defaults to [0, max degree]
  int max_inner = 500;                // evaluations per 1-D search; x20 for simplex searches
  double tolerance = 1e-10;           // on the search coordinate
  LatticeMode lattice = LatticeMode::Auto;
  std::size_t lattice_size = 25;      // log-spaced lambda (EXP) / linear a0 (LOG) values
};

struct InferenceSettings {
  CorrectionConfig correction;
  OptimizerSpec optimizer;
  double epsilon = 1e-5;
  int max_outer = 50;
  std::size_t workers = 1;  // threads for the per-window fits
};

/// Joint estimate for one window from the initialization stage.
struct WindowEstimate {
  EndogenousModel model;
  double p_ext = 0.0;
  double loglik = 0.0;
  bool identified = false;  // false for windows without activation terms
  bool fallback = false;    // lattice search replaced a failed simplex search
};

struct InitResult {
  std::vector<WindowEstimate> windows;
  ExogenousSeries series;
  EndogenousModel start;  // per-parameter median over identified windows
  std::size_t fallbacks = 0;
};

struct IterationTrace {
  int iteration = 0;
  EndogenousModel model;
  double delta_peer = 0.0;
  double delta_ext = 0.0;
  double loglik_after_endogenous = 0.0;
  double loglik_after_exogenous = 0.0;
};

struct InferenceResult {
  EndogenousModel model;
  ExogenousSeries series;
  double loglik = 0.0;
  double initial_loglik = 0.0;   // at (init.start, init.series)
  int iterations = 0;
  bool converged = false;
  std::vector<IterationTrace> trace;
  std::vector<double> halfstep_loglik;  // initial value, then one per half-step
  std::size_t clamp_hits = 0;
  std::size_t fallbacks = 0;
  std::size_t monotonicity_violations = 0;  // half-steps that lost more than 1e-9
  InitResult init;
};

/// The resolved search box of each parameter of `kind`, in model order
/// (SI: p0; EXP: p0, lambda; LOG: k, a0).
std::vector<optimize::Bound> parameter_bounds(ModelKind kind, const OptimizerSpec& spec,
                                              std::size_t max_degree);

/// Step 1: per-window joint maximization over (endogenous parameters, p_ext(t)).
InitResult init_per_window(const LikelihoodEvaluator& eval, ModelKind kind,
                           const InferenceSettings& settings, std::size_t max_degree);

/// Maximizes the total log-likelihood over the endogenous parameters with the
/// exogenous series fixed. Never returns a point worse than `current`.
EndogenousModel fit_endogenous_given_ext(const LikelihoodEvaluator& eval, const EndogenousModel& current,
                                         const ExogenousSeries& series, const OptimizerSpec& spec,
                                         std::size_t max_degree, std::size_t* fallbacks = nullptr);

/// Independent bounded 1-D maximization of every window's p_ext with the
/// endogenous model fixed. No window ends below its value in `current`.
ExogenousSeries fit_ext_given_endogenous(const LikelihoodEvaluator& eval, const EndogenousModel& model,
                                         const ExogenousSeries& current, const OptimizerSpec& spec,
                                         std::size_t workers = 1);

/// Alternating maximum-likelihood inference. Stops when the endogenous
/// parameters move less than epsilon and the summed absolute change of the
/// exogenous series is below epsilon, or after max_outer rounds with
/// `converged == false`.
InferenceResult alternate(const SocialGraph& g, const Cascade& c, ModelKind kind,
                          const InferenceSettings& settings);

/// Same, reusing a prepared evaluator.
InferenceResult alternate(const LikelihoodEvaluator& eval, ModelKind kind,
                          const InferenceSettings& settings, std::size_t max_degree);

}  // namespace cascadex
