#include "cascadex/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cascadex/rng.hpp"

namespace cascadex {

std::string_view to_string(TruthLabel l) noexcept {
  switch (l) {
    case TruthLabel::Endogenous: return "endogenous";
    case TruthLabel::Exogenous: return "exogenous";
    case TruthLabel::Seed: return "seed";
    case TruthLabel::Never: return "never";
  }
  return "never";
}

namespace {

enum Draw : std::uint32_t { kEndogenous = 0, kExogenous = 1, kTieBreak = 2, kMinute = 3 };

std::int64_t minute_in_window(std::size_t t, double width, double u) {
  const auto lo = static_cast<std::int64_t>(std::ceil(static_cast<double>(t) * width));
  auto hi = static_cast<std::int64_t>(std::ceil(static_cast<double>(t + 1) * width)) - 1;
  hi = std::max(hi, lo);
  return lo + std::min<std::int64_t>(static_cast<std::int64_t>(u * static_cast<double>(hi - lo + 1)), hi - lo);
}

}  // namespace

SimOutcome simulate(const SocialGraph& g, const SimConfig& cfg) {
  if (cfg.n_seeds < 1) throw std::invalid_argument("simulate: n_seeds must be >= 1");
  if (cfg.horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
  if (!(cfg.window_width >= 1.0)) throw std::invalid_argument("simulate: window width must be >= 1 minute");
  cfg.model.validate();
  const std::size_t n = g.n_nodes();
  if (cfg.n_seeds > n) throw std::invalid_argument("simulate: more seeds than nodes");

  const ExogenousSeries p_ext = render_profile(cfg.profile, cfg.horizon);
  const RandomStream draws(cfg.seed, 0x53494d);

  std::vector<Window> window(n, kNever);
  std::vector<std::int64_t> minutes(n, -1);
  std::vector<TruthLabel> truth(n, TruthLabel::Never);
  std::vector<std::size_t> endo(cfg.horizon, 0), exo(cfg.horizon, 0);

  // Seeds: partial Fisher-Yates over user indices.
  {
    RandomStream pick(cfg.seed, 0x53454544);
    std::vector<NodeIndex> pool(n);
    std::iota(pool.begin(), pool.end(), NodeIndex{0});
    for (std::size_t k = 0; k < cfg.n_seeds; ++k) {
      const std::size_t r = k + pick.next_below(n - k);
      std::swap(pool[k], pool[r]);
      const NodeIndex s = pool[k];
      window[s] = 0;
      truth[s] = TruthLabel::Seed;
      minutes[s] = minute_in_window(0, cfg.window_width, draws.uniform(s, 0, kMinute));
    }
  }

  std::vector<std::uint8_t> active(n, 0);
  std::vector<double> log_survive(n, 0.0);
  for (std::size_t t = 1; t < cfg.horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) active[i] = window[i] != kNever && window[i] < static_cast<Window>(t);

    switch (cfg.model.kind) {
      case ModelKind::SI:
      case ModelKind::LOG: {
        const auto counts = active_peer_counts(g, active);
        for (std::size_t i = 0; i < n; ++i) {
          log_survive[i] = cfg.model.kind == ModelKind::SI ? survival::si(counts[i], cfg.model.p0)
                                                           : survival::logistic(counts[i], cfg.model.k, cfg.model.a0);
        }
        break;
      }
      case ModelKind::EXP:
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (NodeIndex j : g.peers(static_cast<NodeIndex>(i))) {
            if (active[j]) s += survival::exp_term(static_cast<std::int64_t>(t) - window[j], cfg.model.p0, cfg.model.lambda);
          }
          log_survive[i] = s;
        }
        break;
    }

    const double pe = p_ext[t];
    const auto tw = static_cast<std::uint32_t>(t);
    for (std::size_t ii = 0; ii < n; ++ii) {
      if (window[ii] != kNever) continue;
      const auto i = static_cast<NodeIndex>(ii);
      const double pp = -std::expm1(log_survive[ii]);
      const bool by_peer = draws.uniform(i, tw, kEndogenous) < pp;
      const bool by_ext = draws.uniform(i, tw, kExogenous) < pe;
      if (!by_peer && !by_ext) continue;
      bool endogenous = by_peer;
      if (by_peer && by_ext) endogenous = draws.uniform(i, tw, kTieBreak) < pp / (pp + pe);
      window[ii] = static_cast<Window>(t);
      minutes[ii] = minute_in_window(t, cfg.window_width, draws.uniform(i, tw, kMinute));
      truth[ii] = endogenous ? TruthLabel::Endogenous : TruthLabel::Exogenous;
      ++(endogenous ? endo[t] : exo[t]);
    }
  }

  std::vector<ReferralClass> labels(n, ReferralClass::Unknown);
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == TruthLabel::Endogenous) labels[i] = ReferralClass::Share;
    if (truth[i] == TruthLabel::Exogenous) labels[i] = ReferralClass::External;
  }
  SimOutcome out{Cascade(std::move(minutes), cfg.window_width, cfg.horizon, std::move(labels)),
                 std::move(truth), p_ext, std::move(endo), std::move(exo)};
  return out;
}

CountSeries ground_truth_series(const SimOutcome& outcome) {
  CountSeries out;
  out.endogenous.assign(outcome.true_endogenous.begin(), outcome.true_endogenous.end());
  out.exogenous.assign(outcome.true_exogenous.begin(), outcome.true_exogenous.end());
  return out;
}

SessionTable to_sessions(const SimOutcome& outcome, const SocialGraph& g) {
  const Cascade& c = outcome.cascade;
  if (c.n_users() != g.n_nodes()) throw std::invalid_argument("to_sessions: graph/cascade size mismatch");
  SessionTable table;
  table.has_labels = true;
  for (std::size_t t = 0; t < c.horizon(); ++t) {
    for (NodeIndex i : c.activated_in(static_cast<Window>(t))) {
      SessionRow row;
      row.user_id = g.external_id(i);
      row.time_login = c.minutes(i);
      switch (outcome.truth[i]) {
        case TruthLabel::Endogenous: row.referrer_class = "share"; break;
        case TruthLabel::Exogenous: row.referrer_class = "external"; break;
        default: row.referrer_class = "unknown"; break;
      }
      row.friend_count = static_cast<std::int64_t>(g.degree(i));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace cascadex
