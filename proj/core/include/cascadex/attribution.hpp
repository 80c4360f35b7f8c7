#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cascadex/cascade.hpp"
#include "cascadex/graph.hpp"
#include "cascadex/infer.hpp"
#include "cascadex/models.hpp"

namespace cascadex {

enum class ResponsibilityVariant { Ratio, Softmax, Multiply };

std::string_view to_string(ResponsibilityVariant v) noexcept;
ResponsibilityVariant parse_responsibility_variant(std::string_view name);

/// Exogenous responsibility of one activation: near 0 when peers explain it,
/// near 1 when external influence does.
struct ResponsibilityScore {
  NodeIndex user = 0;
  Window window = 0;
  double r = 0.0;
  double p_peer = 0.0;  // at the activation window, against earlier windows
  double p_ext = 0.0;
  bool impossible = false;  // both probabilities zero
};

/// ratio: p_ext / (p_ext + p_peer); softmax: e^p_ext / (e^p_ext + e^p_peer);
/// multiply: p_ext (1 - p_peer). A ratio with both inputs zero is reported
/// as 0.5 with `impossible` set.
double responsibility_value(double p_ext, double p_peer, ResponsibilityVariant variant,
                            bool* impossible = nullptr);

/// Scores every activated user (seeds included), ordered by activation
/// window and then user index.
std::vector<ResponsibilityScore> responsibility(const EndogenousModel& model, const ExogenousSeries& series,
                                                const SocialGraph& g, const Cascade& c,
                                                ResponsibilityVariant variant = ResponsibilityVariant::Ratio);

std::vector<ResponsibilityScore> responsibility(const InferenceResult& result, const SocialGraph& g,
                                                const Cascade& c,
                                                ResponsibilityVariant variant = ResponsibilityVariant::Ratio);

struct CountSeries {
  std::vector<double> endogenous;
  std::vector<double> exogenous;
};

/// exo(t) = sum of responsibilities of users activating in t,
/// endo(t) = activations(t) - exo(t).
CountSeries expected_counts(std::span<const ResponsibilityScore> scores, const Cascade& c);
CountSeries expected_counts(const InferenceResult& result, const SocialGraph& g, const Cascade& c);

struct BaselineScore {
  NodeIndex user = 0;
  Window window = 0;
  std::uint32_t active_peers = 0;
  double score = 0.0;  // -active_peers: higher means more exogenous
};

/// Active-peer-count scorer, same user order as `responsibility`.
std::vector<BaselineScore> baseline_scores(const SocialGraph& g, const Cascade& c);

struct RocCurve {
  std::vector<double> thresholds;  // descending; first entry is +inf
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
};

/// Threshold sweep over the distinct scores; `labels[i]` true marks a
/// positive. Tied scores move TPR and FPR together, so the trapezoidal area
/// equals the normalized Mann-Whitney U statistic.
RocCurve roc_auc(std::span<const double> scores, std::span<const bool> labels);

/// Evaluation label of a referral class: External is positive (exogenous),
/// Share negative (endogenous), everything else excluded.
std::optional<bool> exogenous_label(ReferralClass c) noexcept;

enum class InfluenceWeighting { Uniform, ExpDecay };

std::string_view to_string(InfluenceWeighting w) noexcept;
InfluenceWeighting parse_influence_weighting(std::string_view name);

struct InfluenceScore {
  NodeIndex user = 0;
  double value = 0.0;
};

/// Apportions each user's endogenous activation mass `endo_prob[j]` among
/// the peers that activated in an earlier window, in proportion to the
/// weight of each claim (1, or exp(-lambda * elapsed windows)).
std::vector<InfluenceScore> individual_influence(const SocialGraph& g, const Cascade& c,
                                                 std::span<const double> endo_prob,
                                                 InfluenceWeighting weighting = InfluenceWeighting::Uniform,
                                                 double lambda = 0.0);

/// Mean influence over `group`; throws on an empty group.
double collective_influence(std::span<const InfluenceScore> scores, std::span<const NodeIndex> group);

/// Per-user p_peer at the activation window (0 for seeds and users that
/// never activate), the endogenous mass used by the model-based influence.
std::vector<double> endogenous_mass(std::span<const ResponsibilityScore> scores, std::size_t n_users);

}  // namespace cascadex
