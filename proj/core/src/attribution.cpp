#include "cascadex/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cascadex {

std::string_view to_string(ResponsibilityVariant v) noexcept {
  switch (v) {
    case ResponsibilityVariant::Ratio: return "ratio";
    case ResponsibilityVariant::Softmax: return "softmax";
    case ResponsibilityVariant::Multiply: return "multiply";
  }
  return "ratio";
}

ResponsibilityVariant parse_responsibility_variant(std::string_view name) {
  if (name == "ratio") return ResponsibilityVariant::Ratio;
  if (name == "softmax") return ResponsibilityVariant::Softmax;
  if (name == "multiply") return ResponsibilityVariant::Multiply;
  throw std::invalid_argument("unknown responsibility variant '" + std::string(name) + "'");
}

double responsibility_value(double p_ext, double p_peer, ResponsibilityVariant variant, bool* impossible) {
  if (impossible) *impossible = p_ext + p_peer <= 0.0;
  switch (variant) {
    case ResponsibilityVariant::Ratio:
      return p_ext + p_peer > 0.0 ? p_ext / (p_ext + p_peer) : 0.5;
    case ResponsibilityVariant::Softmax: {
      const double m = std::max(p_ext, p_peer);
      const double a = std::exp(p_ext - m);
      const double b = std::exp(p_peer - m);
      return a / (a + b);
    }
    case ResponsibilityVariant::Multiply:
      return p_ext * (1.0 - p_peer);
  }
  return 0.0;
}

std::vector<ResponsibilityScore> responsibility(const EndogenousModel& model, const ExogenousSeries& series,
                                                const SocialGraph& g, const Cascade& c,
                                                ResponsibilityVariant variant) {
  if (series.size() != c.horizon()) throw std::invalid_argument("responsibility: series length differs from horizon");
  std::vector<ResponsibilityScore> out;
  out.reserve(c.n_activated());
  for (std::size_t t = 0; t < c.horizon(); ++t) {
    const auto users = c.activated_in(static_cast<Window>(t));
    if (users.empty()) continue;
    const auto p_peer = peer_prob(g, c, static_cast<Window>(t), model);
    for (NodeIndex i : users) {
      ResponsibilityScore s;
      s.user = i;
      s.window = static_cast<Window>(t);
      s.p_peer = p_peer[i];
      s.p_ext = series[t];
      s.r = responsibility_value(s.p_ext, s.p_peer, variant, &s.impossible);
      out.push_back(s);
    }
  }
  return out;
}

std::vector<ResponsibilityScore> responsibility(const InferenceResult& result, const SocialGraph& g,
                                                const Cascade& c, ResponsibilityVariant variant) {
  return responsibility(result.model, result.series, g, c, variant);
}

CountSeries expected_counts(std::span<const ResponsibilityScore> scores, const Cascade& c) {
  CountSeries out;
  out.endogenous.assign(c.horizon(), 0.0);
  out.exogenous.assign(c.horizon(), 0.0);
  std::vector<double> activations(c.horizon(), 0.0);
  for (const auto& s : scores) {
    const auto t = static_cast<std::size_t>(s.window);
    out.exogenous[t] += s.r;
    activations[t] += 1.0;
  }
  for (std::size_t t = 0; t < c.horizon(); ++t) out.endogenous[t] = activations[t] - out.exogenous[t];
  return out;
}

CountSeries expected_counts(const InferenceResult& result, const SocialGraph& g, const Cascade& c) {
  const auto scores = responsibility(result, g, c, ResponsibilityVariant::Ratio);
  return expected_counts(scores, c);
}

std::vector<BaselineScore> baseline_scores(const SocialGraph& g, const Cascade& c) {
  if (g.n_nodes() != c.n_users()) throw std::invalid_argument("baseline_scores: graph/cascade size mismatch");
  std::vector<BaselineScore> out;
  out.reserve(c.n_activated());
  for (std::size_t t = 0; t < c.horizon(); ++t) {
    for (NodeIndex i : c.activated_in(static_cast<Window>(t))) {
      std::uint32_t a = 0;
      for (NodeIndex j : g.peers(i)) {
        a += c.activated(j) && c.window(j) < static_cast<Window>(t);
      }
      out.push_back({i, static_cast<Window>(t), a, -static_cast<double>(a)});
    }
  }
  return out;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: scores and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc_auc: need at least one positive and one negative label");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  roc.tpr.push_back(0.0);
  roc.fpr.push_back(0.0);
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      labels[order[k]] ? ++tp : ++fp;
      ++k;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(positives);
    const double fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    area += (fpr - roc.fpr.back()) * (tpr + roc.tpr.back()) / 2.0;
    roc.thresholds.push_back(threshold);
    roc.tpr.push_back(tpr);
    roc.fpr.push_back(fpr);
  }
  roc.auc = area;
  return roc;
}

std::optional<bool> exogenous_label(ReferralClass c) noexcept {
  switch (c) {
    case ReferralClass::External: return true;
    case ReferralClass::Share: return false;
    default: return std::nullopt;
  }
}

std::string_view to_string(InfluenceWeighting w) noexcept {
  return w == InfluenceWeighting::Uniform ? "uniform" : "exp-decay";
}

InfluenceWeighting parse_influence_weighting(std::string_view name) {
  if (name == "uniform") return InfluenceWeighting::Uniform;
  if (name == "exp-decay" || name == "exp") return InfluenceWeighting::ExpDecay;
  throw std::invalid_argument("unknown influence weighting '" + std::string(name) + "'");
}

std::vector<InfluenceScore> individual_influence(const SocialGraph& g, const Cascade& c,
                                                 std::span<const double> endo_prob,
                                                 InfluenceWeighting weighting, double lambda) {
  const std::size_t n = g.n_nodes();
  if (c.n_users() != n || endo_prob.size() != n) {
    throw std::invalid_argument("individual_influence: graph, cascade and endo_prob sizes differ");
  }
  auto weight = [&](Window claimant, Window target) {
    return weighting == InfluenceWeighting::Uniform ? 1.0 : std::exp(-lambda * static_cast<double>(target - claimant));
  };

  std::vector<InfluenceScore> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].user = static_cast<NodeIndex>(i);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const auto j = static_cast<NodeIndex>(jj);
    if (!c.activated(j) || endo_prob[jj] == 0.0) continue;
    const Window tj = c.window(j);
    double denominator = 0.0;
    for (NodeIndex m : g.peers(j)) {
      if (c.activated(m) && c.window(m) < tj) denominator += weight(c.window(m), tj);
    }
    if (denominator <= 0.0) continue;
    for (NodeIndex m : g.peers(j)) {
      if (c.activated(m) && c.window(m) < tj) {
        out[m].value += weight(c.window(m), tj) / denominator * endo_prob[jj];
      }
    }
  }
  return out;
}

double collective_influence(std::span<const InfluenceScore> scores, std::span<const NodeIndex> group) {
  if (group.empty()) throw std::invalid_argument("collective_influence: empty group");
  double sum = 0.0;
  for (NodeIndex i : group) {
    if (i >= scores.size()) throw std::out_of_range("collective_influence: user out of range");
    sum += scores[i].value;
  }
  return sum / static_cast<double>(group.size());
}

std::vector<double> endogenous_mass(std::span<const ResponsibilityScore> scores, std::size_t n_users) {
  std::vector<double> out(n_users, 0.0);
  for (const auto& s : scores) {
    if (s.user >= n_users) throw std::out_of_range("endogenous_mass: user out of range");
    out[s.user] = s.window > 0 ? s.p_peer : 0.0;
  }
  return out;
}

}  // namespace cascadex
