#include "cascadex/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cascadex {

namespace {

constexpr double kProbCeil = 1.0 - kProbFloor;

void check_p_ext(double p_ext) {
  if (!(p_ext >= 0.0 && p_ext <= 1.0)) throw std::invalid_argument("p_ext must lie in [0, 1]");
}

/// log of an activation probability, floored at kProbFloor.
double log_activation(double q, std::size_t& clamp_hits) {
  if (!(q >= kProbFloor)) {
    ++clamp_hits;
    q = kProbFloor;
  } else if (q > kProbCeil) {
    q = kProbCeil;
  }
  return std::log(q);
}

double pairwise_sum_range(const double* x, std::size_t n) noexcept {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(x, half) + pairwise_sum_range(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  return pairwise_sum_range(values.data(), values.size());
}

double correction_factor(const CorrectionConfig& cfg, std::size_t n_inactive) {
  if (!(cfg.alpha >= 0.0)) throw std::invalid_argument("correction alpha must be >= 0");
  if (cfg.alpha == 0.0) return 1.0;
  if (!cfg.n_all) throw std::invalid_argument("correction_factor: n_all is not set");
  if (n_inactive == 0) {
    throw std::invalid_argument("correction_factor: window has no inactive users");
  }
  return 1.0 + cfg.alpha * (static_cast<double>(*cfg.n_all) / static_cast<double>(n_inactive));
}

WindowLikelihood window_loglik(const SocialGraph& g, const Cascade& c, Window t,
                               const EndogenousModel& model, double p_ext,
                               const CorrectionConfig& cfg) {
  check_p_ext(p_ext);
  model.validate();
  const auto masks = activity_masks(c, t);
  EndogenousModel capped = model;
  capped.p0 = std::min(model.p0, kProbCeil);
  const auto log_keep = peer_log_survival(g, c, t, capped);
  const double pe = std::min(p_ext, kProbCeil);

  WindowLikelihood out;
  double activated = 0.0;
  if (t > 0) {
    for (std::size_t i = 0; i < c.n_users(); ++i) {
      if (!masks.activated_in[i]) continue;
      ++out.n_activated;
      activated += log_activation(-std::expm1(log_keep[i] + std::log1p(-pe)), out.clamp_hits);
    }
  }
  double inactive = 0.0;
  for (std::size_t i = 0; i < c.n_users(); ++i) {
    if (!masks.inactive[i]) continue;
    ++out.n_inactive;
    inactive += log_keep[i] + std::log1p(-pe);
  }
  if (out.n_inactive > 0) out.c = correction_factor(cfg.resolved(g.n_nodes()), out.n_inactive);
  out.value = activated + out.c * inactive;
  return out;
}

double total_loglik(const SocialGraph& g, const Cascade& c, const EndogenousModel& model,
                    const ExogenousSeries& series, const CorrectionConfig& cfg) {
  if (series.size() != c.horizon()) {
    throw std::invalid_argument("total_loglik: series length " + std::to_string(series.size()) +
                                " != horizon " + std::to_string(c.horizon()));
  }
  return LikelihoodEvaluator(g, c, cfg).total(model, series.p_ext);
}

LikelihoodEvaluator::LikelihoodEvaluator(const SocialGraph& g, const Cascade& c, CorrectionConfig cfg) {
  if (g.n_nodes() != c.n_users()) {
    throw std::invalid_argument("LikelihoodEvaluator: graph has " + std::to_string(g.n_nodes()) +
                                " nodes but cascade has " + std::to_string(c.n_users()) + " users");
  }
  cfg = cfg.resolved(g.n_nodes());
  const std::size_t horizon = c.horizon();
  const std::size_t n = g.n_nodes();
  windows_.resize(horizon);

  auto end_of = [&](NodeIndex i) -> std::size_t {
    return c.activated(i) ? static_cast<std::size_t>(c.window(i)) : horizon;
  };

  // Inactive exposure by elapsed windows. A pair (inactive i, active peer j)
  // exists for t in [w_j + 1, end_i); difference arrays along each source
  // window keep this O(E + T^2).
  std::vector<std::int32_t> diff(horizon * (horizon + 1), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ni = static_cast<NodeIndex>(i);
    const std::size_t end_i = end_of(ni);
    for (NodeIndex j : g.peers(ni)) {
      if (!c.activated(j)) continue;
      const auto wj = static_cast<std::size_t>(c.window(j));
      if (wj + 1 >= end_i) continue;
      diff[wj * (horizon + 1) + wj + 1] += 1;
      diff[wj * (horizon + 1) + end_i] -= 1;
    }
  }
  std::vector<std::vector<std::uint64_t>> elapsed(horizon);
  for (std::size_t s = 0; s < horizon; ++s) {
    std::int64_t running = 0;
    for (std::size_t t = s + 1; t < horizon; ++t) {
      running += diff[s * (horizon + 1) + t];
      if (running == 0) continue;
      auto& row = elapsed[t];
      if (row.size() <= t - s) row.resize(t - s + 1, 0);
      row[t - s] += static_cast<std::uint64_t>(running);
    }
  }
  diff = {};

  // Active-peer count histograms of inactive users, and the exposure
  // profiles of users at their activation window.
  std::vector<std::vector<std::uint32_t>> active_hist(horizon);
  std::vector<std::uint32_t> peer_windows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ni = static_cast<NodeIndex>(i);
    peer_windows.clear();
    for (NodeIndex j : g.peers(ni)) {
      if (c.activated(j)) peer_windows.push_back(static_cast<std::uint32_t>(c.window(j)));
    }
    std::sort(peer_windows.begin(), peer_windows.end());
    const std::size_t end_i = end_of(ni);
    std::size_t ptr = 0;
    std::uint32_t a = 0;
    for (std::size_t t = 0; t < end_i; ++t) {
      while (ptr < peer_windows.size() && peer_windows[ptr] < t) {
        ++a;
        ++ptr;
      }
      auto& hist = active_hist[t];
      if (hist.size() <= a) hist.resize(a + 1, 0);
      ++hist[a];
      max_active_ = std::max<std::size_t>(max_active_, a);
    }
  }

  for (std::size_t t = 0; t < horizon; ++t) {
    WindowTerms& w = windows_[t];
    w.n_inactive = c.n_inactive_at(static_cast<Window>(t));
    if (w.n_inactive > 0) w.correction = correction_factor(cfg, w.n_inactive);
    for (std::size_t d = 0; d < elapsed[t].size(); ++d) {
      if (elapsed[t][d] == 0) continue;
      w.inactive_elapsed.emplace_back(static_cast<std::uint32_t>(d), elapsed[t][d]);
      w.inactive_exposure += elapsed[t][d];
    }
    for (std::size_t a = 0; a < active_hist[t].size(); ++a) {
      if (active_hist[t][a] != 0) w.inactive_active.emplace_back(static_cast<std::uint32_t>(a), active_hist[t][a]);
    }
    if (t == 0) continue;  // seeds are conditioned on

    std::vector<std::uint32_t> ds;
    for (NodeIndex i : c.activated_in(static_cast<Window>(t))) {
      ds.clear();
      for (NodeIndex j : g.peers(i)) {
        if (c.activated(j) && static_cast<std::size_t>(c.window(j)) < t) {
          ds.push_back(static_cast<std::uint32_t>(t - static_cast<std::size_t>(c.window(j))));
        }
      }
      std::sort(ds.begin(), ds.end());
      w.activated.push_back(i);
      w.activated_active.push_back(static_cast<std::uint32_t>(ds.size()));
      max_active_ = std::max(max_active_, ds.size());
      for (std::size_t k = 0; k < ds.size();) {
        std::size_t run = k;
        while (run < ds.size() && ds[run] == ds[k]) ++run;
        w.profile_elapsed.push_back(ds[k]);
        w.profile_count.push_back(static_cast<std::uint32_t>(run - k));
        k = run;
      }
      w.profile_offsets.push_back(w.profile_elapsed.size());
    }
  }
}

std::vector<double> LikelihoodEvaluator::elapsed_table(const EndogenousModel& model,
                                                       std::size_t upto) const {
  std::vector<double> table;
  if (model.kind != ModelKind::EXP) return table;
  const double p0 = std::min(model.p0, kProbCeil);
  table.resize(upto + 1);
  for (std::size_t d = 0; d <= upto; ++d) {
    table[d] = survival::exp_term(static_cast<std::int64_t>(d), p0, model.lambda);
  }
  return table;
}

double LikelihoodEvaluator::activated_survival(const WindowTerms& w, std::size_t k,
                                               const EndogenousModel& model,
                                               std::span<const double> table) const {
  switch (model.kind) {
    case ModelKind::SI:
      return survival::si(w.activated_active[k], std::min(model.p0, kProbCeil));
    case ModelKind::LOG:
      return survival::logistic(w.activated_active[k], model.k, model.a0);
    case ModelKind::EXP: {
      double s = 0.0;
      for (std::size_t e = w.profile_offsets[k]; e < w.profile_offsets[k + 1]; ++e) {
        s += static_cast<double>(w.profile_count[e]) * table[w.profile_elapsed[e]];
      }
      return s;
    }
  }
  return 0.0;
}

WindowLikelihood LikelihoodEvaluator::evaluate(const WindowTerms& w, const EndogenousModel& model,
                                               double p_ext, std::span<const double> table) const {
  WindowLikelihood out;
  out.n_activated = w.activated.size();
  out.n_inactive = w.n_inactive;
  out.c = w.correction;
  const double log_pe = std::log1p(-std::min(p_ext, kProbCeil));

  double activated = 0.0;
  for (std::size_t k = 0; k < w.activated.size(); ++k) {
    const double s = activated_survival(w, k, model, table) + log_pe;
    activated += log_activation(-std::expm1(s), out.clamp_hits);
  }

  double inactive = 0.0;
  switch (model.kind) {
    case ModelKind::SI:
      inactive = survival::si(1, std::min(model.p0, kProbCeil)) * static_cast<double>(w.inactive_exposure);
      break;
    case ModelKind::EXP:
      for (const auto& [d, count] : w.inactive_elapsed) inactive += static_cast<double>(count) * table[d];
      break;
    case ModelKind::LOG:
      for (const auto& [a, users] : w.inactive_active) {
        inactive += static_cast<double>(users) * survival::logistic(a, model.k, model.a0);
      }
      break;
  }
  inactive += static_cast<double>(w.n_inactive) * log_pe;
  out.value = activated + out.c * inactive;
  return out;
}

WindowLikelihood LikelihoodEvaluator::window(Window t, const EndogenousModel& model, double p_ext) const {
  if (t < 0 || static_cast<std::size_t>(t) >= horizon()) throw std::out_of_range("window out of range");
  check_p_ext(p_ext);
  const auto table = elapsed_table(model, static_cast<std::size_t>(t));
  return evaluate(windows_[static_cast<std::size_t>(t)], model, p_ext, table);
}

std::vector<double> LikelihoodEvaluator::window_values(const EndogenousModel& model,
                                                       std::span<const double> p_ext,
                                                       std::size_t* clamp_hits) const {
  if (p_ext.size() != horizon()) {
    throw std::invalid_argument("series length " + std::to_string(p_ext.size()) + " != horizon " +
                                std::to_string(horizon()));
  }
  const auto table = elapsed_table(model, horizon());
  std::vector<double> values(horizon());
  std::size_t hits = 0;
  for (std::size_t t = 0; t < horizon(); ++t) {
    check_p_ext(p_ext[t]);
    const auto w = evaluate(windows_[t], model, p_ext[t], table);
    values[t] = w.value;
    hits += w.clamp_hits;
  }
  if (clamp_hits) *clamp_hits = hits;
  return values;
}

double LikelihoodEvaluator::total(const EndogenousModel& model, std::span<const double> p_ext,
                                  std::size_t* clamp_hits) const {
  const auto values = window_values(model, p_ext, clamp_hits);
  return pairwise_sum(values);
}

std::vector<double> LikelihoodEvaluator::activation_log_survival(Window t,
                                                                 const EndogenousModel& model) const {
  const auto& w = windows_.at(static_cast<std::size_t>(t));
  const auto table = elapsed_table(model, static_cast<std::size_t>(t));
  std::vector<double> out(w.activated.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = activated_survival(w, k, model, table);
  return out;
}

}  // namespace cascadex
