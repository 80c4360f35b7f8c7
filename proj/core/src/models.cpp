#include "cascadex/models.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "cascadex/error.hpp"

namespace cascadex {

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::SI: return "si";
    case ModelKind::EXP: return "exp";
    case ModelKind::LOG: return "log";
  }
  return "si";
}

ModelKind parse_model_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "si") return ModelKind::SI;
  if (lower == "exp") return ModelKind::EXP;
  if (lower == "log") return ModelKind::LOG;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "' (expected si, exp or log)");
}

void EndogenousModel::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  switch (kind) {
    case ModelKind::EXP:
      require(lambda >= 0.0 && std::isfinite(lambda), "EXP model: lambda must be finite and >= 0");
      [[fallthrough]];
    case ModelKind::SI:
      require(p0 >= 0.0 && p0 <= 1.0, "p0 must lie in [0, 1]");
      break;
    case ModelKind::LOG:
      require(std::isfinite(k), "LOG model: k must be finite");
      require(a0 >= 0.0 && std::isfinite(a0), "LOG model: a0 must be finite and >= 0");
      break;
  }
}

namespace {

void check_p0(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("p0 must lie in [0, 1]");
}

std::vector<std::uint8_t> active_before_mask(const Cascade& c, Window t) {
  std::vector<std::uint8_t> mask(c.n_users(), 0);
  for (std::size_t i = 0; i < c.n_users(); ++i) {
    const Window w = c.window(static_cast<NodeIndex>(i));
    mask[i] = w != kNever && w < t;
  }
  return mask;
}

}  // namespace

std::vector<double> peer_prob_si(const SocialGraph& g, std::span<const std::uint32_t> active_counts,
                                 double p0) {
  check_p0(p0);
  if (active_counts.size() != g.n_nodes()) {
    throw std::invalid_argument("peer_prob_si: count vector length differs from node count");
  }
  std::vector<double> out(active_counts.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -std::expm1(survival::si(active_counts[i], p0));
  return out;
}

std::vector<double> peer_prob_exp(const SocialGraph& g, const Cascade& c, Window t, double p0,
                                  double lambda) {
  check_p0(p0);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and >= 0");
  }
  if (c.n_users() != g.n_nodes()) throw std::invalid_argument("peer_prob_exp: cascade/graph size mismatch");
  if (t < 0 || static_cast<std::size_t>(t) >= c.horizon()) throw std::out_of_range("peer_prob_exp: window out of range");

  const auto mask = active_before_mask(c, t);
  if (lambda == 0.0) return peer_prob_si(g, active_peer_counts(g, mask), p0);

  std::vector<double> out(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    double log_survive = 0.0;
    for (NodeIndex j : g.peers(static_cast<NodeIndex>(i))) {
      if (mask[j]) log_survive += survival::exp_term(t - c.window(j), p0, lambda);
    }
    out[i] = -std::expm1(log_survive);
  }
  return out;
}

std::vector<double> peer_prob_log(std::span<const std::uint32_t> active_counts, double k, double a0) {
  std::vector<double> out(active_counts.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-k * (static_cast<double>(active_counts[i]) - a0)));
  }
  return out;
}

std::vector<double> peer_prob(const SocialGraph& g, const Cascade& c, Window t,
                              const EndogenousModel& model) {
  switch (model.kind) {
    case ModelKind::SI:
      return peer_prob_si(g, active_peer_counts(g, active_before_mask(c, t)), model.p0);
    case ModelKind::EXP:
      return peer_prob_exp(g, c, t, model.p0, model.lambda);
    case ModelKind::LOG:
      return peer_prob_log(active_peer_counts(g, active_before_mask(c, t)), model.k, model.a0);
  }
  return {};
}

std::vector<double> peer_log_survival(const SocialGraph& g, const Cascade& c, Window t,
                                      const EndogenousModel& model) {
  model.validate();
  if (c.n_users() != g.n_nodes()) throw std::invalid_argument("peer_log_survival: cascade/graph size mismatch");
  if (t < 0 || static_cast<std::size_t>(t) >= c.horizon()) throw std::out_of_range("peer_log_survival: window out of range");
  const auto mask = active_before_mask(c, t);
  std::vector<double> out(g.n_nodes(), 0.0);
  if (model.kind != ModelKind::EXP) {
    const auto counts = active_peer_counts(g, mask);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = model.kind == ModelKind::SI ? survival::si(counts[i], model.p0)
                                           : survival::logistic(counts[i], model.k, model.a0);
    }
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (NodeIndex j : g.peers(static_cast<NodeIndex>(i))) {
      if (mask[j]) out[i] += survival::exp_term(t - c.window(j), model.p0, model.lambda);
    }
  }
  return out;
}

std::string_view to_string(ProfileShape s) noexcept {
  switch (s) {
    case ProfileShape::SpikeExponential: return "spike-exponential";
    case ProfileShape::Constant: return "constant";
    case ProfileShape::LinearDecay: return "linear-decay";
    case ProfileShape::Sinusoidal: return "sinusoidal";
    case ProfileShape::Custom: return "custom";
  }
  return "constant";
}

ProfileShape parse_profile_shape(std::string_view name) {
  for (auto s : {ProfileShape::SpikeExponential, ProfileShape::Constant, ProfileShape::LinearDecay,
                 ProfileShape::Sinusoidal, ProfileShape::Custom}) {
    if (name == to_string(s)) return s;
  }
  if (name == "spikes" || name == "spike") return ProfileShape::SpikeExponential;
  throw std::invalid_argument("unknown exogenous profile shape '" + std::string(name) + "'");
}

ExogenousSeries render_profile(const ExogenousProfile& profile, std::size_t horizon) {
  ExogenousSeries out;
  out.p_ext.assign(horizon, 0.0);
  std::size_t clipped = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const double x = static_cast<double>(t);
    double v = 0.0;
    switch (profile.shape) {
      case ProfileShape::SpikeExponential:
        v = profile.level;
        for (const auto& e : profile.events) {
          if (x >= e.start) v += e.peak * std::exp(-e.rate * (x - e.start));
        }
        break;
      case ProfileShape::Constant:
        v = profile.level;
        break;
      case ProfileShape::LinearDecay:
        v = profile.duration > 0 ? profile.level * std::max(0.0, 1.0 - x / profile.duration) : 0.0;
        break;
      case ProfileShape::Sinusoidal:
        v = profile.level * (1.0 + std::sin(profile.omega * x + profile.phase)) / 2.0;
        break;
      case ProfileShape::Custom:
        v = t < profile.series.size() ? profile.series[t] : 0.0;
        break;
    }
    if (v > 1.0 || v < 0.0 || std::isnan(v)) {
      ++clipped;
      v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    }
    out.p_ext[t] = v;
  }
  if (clipped > 0) {
    std::clog << "warning: exogenous profile clipped into [0, 1] at " << clipped << " window(s)\n";
  }
  return out;
}

ExogenousSeries load_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open series file " + path.string());
  ExogenousSeries out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string field = line.substr(b, e - b + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      if (out.p_ext.empty() && line_no == 1) continue;  // header
      throw ParseError(path.string(), line_no, "'" + field + "' is not a number");
    }
    if (v < 0.0 || v > 1.0) throw ParseError(path.string(), line_no, "probability outside [0, 1]");
    out.p_ext.push_back(v);
  }
  return out;
}

}  // namespace cascadex
