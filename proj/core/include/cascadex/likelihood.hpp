#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cascadex/cascade.hpp"
#include "cascadex/graph.hpp"
#include "cascadex/models.hpp"

namespace cascadex {

/// Observer-bias correction: the inactive-user part of each window's
/// log-likelihood is weighted by c(t) = 1 + alpha * n_all / n_inactive(t).
struct CorrectionConfig {
  double alpha = 0.0;
  std::optional<std::size_t> n_all;  // defaults to the graph's node count

  CorrectionConfig resolved(std::size_t n_nodes) const {
    CorrectionConfig out = *this;
    if (!out.n_all) out.n_all = n_nodes;
    return out;
  }
};

/// Throws when alpha > 0 and the window has no inactive users, or when
/// n_all is unset while alpha > 0.
double correction_factor(const CorrectionConfig& cfg, std::size_t n_inactive);

struct WindowLikelihood {
  double value = 0.0;
  std::size_t n_activated = 0;  // users with an activation term (0 at t = 0)
  std::size_t n_inactive = 0;
  double c = 1.0;
  std::size_t clamp_hits = 0;
};

/// Log-likelihood of window t evaluated directly from activity masks and the
/// per-node peer probabilities. Users activating at t = 0 are conditioned on
/// and contribute no activation term.
WindowLikelihood window_loglik(const SocialGraph& g, const Cascade& c, Window t,
                               const EndogenousModel& model, double p_ext,
                               const CorrectionConfig& cfg);

/// Sum of window terms over the whole horizon (fixed-order pairwise sum).
double total_loglik(const SocialGraph& g, const Cascade& c, const EndogenousModel& model,
                    const ExogenousSeries& series, const CorrectionConfig& cfg);

/// Pairwise summation in index order; reproducible regardless of how the
/// terms were produced.
double pairwise_sum(std::span<const double> values) noexcept;

/// Precomputed sufficient statistics of one (graph, cascade) pair.
///
/// For each window, inactive users are summarized by the histogram of
/// elapsed windows since their active peers activated (SI, EXP) and by the
/// histogram of active-peer counts (LOG); activated users keep their own
/// exposure profile. Evaluating a window then costs O(t + exposures of the
/// users activating in it), independent of the number of inactive users.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const SocialGraph& g, const Cascade& c, CorrectionConfig cfg);

  std::size_t horizon() const noexcept { return windows_.size(); }
  std::size_t n_activated(Window t) const noexcept { return windows_[static_cast<std::size_t>(t)].activated.size(); }
  std::size_t n_inactive(Window t) const noexcept { return windows_[static_cast<std::size_t>(t)].n_inactive; }
  double correction(Window t) const noexcept { return windows_[static_cast<std::size_t>(t)].correction; }
  std::size_t max_active_peers() const noexcept { return max_active_; }

  WindowLikelihood window(Window t, const EndogenousModel& model, double p_ext) const;

  /// Sum over all windows; `clamp_hits` (optional) receives the number of
  /// activation probabilities raised to the floor.
  double total(const EndogenousModel& model, std::span<const double> p_ext,
               std::size_t* clamp_hits = nullptr) const;

  /// Per-window values of `total` before the reduction.
  std::vector<double> window_values(const EndogenousModel& model, std::span<const double> p_ext,
                                    std::size_t* clamp_hits = nullptr) const;

  /// log(1 - p_peer) of every user activating in window t, in the order of
  /// `Cascade::activated_in(t)`; empty for t = 0.
  std::vector<double> activation_log_survival(Window t, const EndogenousModel& model) const;

 private:
  struct WindowTerms {
    std::size_t n_inactive = 0;
    double correction = 1.0;
    std::uint64_t inactive_exposure = 0;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> inactive_elapsed;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> inactive_active;
    std::vector<NodeIndex> activated;
    std::vector<std::uint32_t> activated_active;
    std::vector<std::size_t> profile_offsets{0};
    std::vector<std::uint32_t> profile_elapsed;
    std::vector<std::uint32_t> profile_count;
  };

  /// log1p(-p0 exp(-lambda d)) for d in [0, upto].
  std::vector<double> elapsed_table(const EndogenousModel& model, std::size_t upto) const;
  WindowLikelihood evaluate(const WindowTerms& w, const EndogenousModel& model, double p_ext,
                            std::span<const double> table) const;
  double activated_survival(const WindowTerms& w, std::size_t k, const EndogenousModel& model,
                            std::span<const double> table) const;

  std::vector<WindowTerms> windows_;
  std::size_t max_active_ = 0;
};

}  // namespace cascadex
