#include "cascadex/infer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace cascadex {

std::string_view to_string(LatticeMode m) noexcept {
  switch (m) {
    case LatticeMode::Never: return "never";
    case LatticeMode::Auto: return "auto";
    case LatticeMode::Always: return "always";
  }
  return "auto";
}

LatticeMode parse_lattice_mode(std::string_view name) {
  if (name == "never") return LatticeMode::Never;
  if (name == "auto") return LatticeMode::Auto;
  if (name == "always") return LatticeMode::Always;
  throw std::invalid_argument("unknown lattice mode '" + std::string(name) + "'");
}

namespace {

constexpr double kMonotoneSlack = 1e-9;

/// One searchable parameter: probabilities are searched as log(p).
struct Coordinate {
  optimize::Bound natural;
  bool log_scale = false;

  optimize::Bound search() const {
    return log_scale ? optimize::Bound{std::log(natural.lo), std::log(natural.hi)} : natural;
  }
  double to_search(double x) const { return log_scale ? std::log(natural.clamp(x)) : natural.clamp(x); }
  double from_search(double u) const { return natural.clamp(log_scale ? std::exp(u) : u); }
};

std::vector<Coordinate> coordinates(ModelKind kind, const OptimizerSpec& spec, std::size_t max_degree) {
  const auto bounds = parameter_bounds(kind, spec, max_degree);
  std::vector<Coordinate> out;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const bool is_probability = kind != ModelKind::LOG && k == 0;
    out.push_back({bounds[k], is_probability});
  }
  return out;
}

std::vector<double> params_of(const EndogenousModel& m) {
  switch (m.kind) {
    case ModelKind::SI: return {m.p0};
    case ModelKind::EXP: return {m.p0, m.lambda};
    case ModelKind::LOG: return {m.k, m.a0};
  }
  return {};
}

EndogenousModel model_from(ModelKind kind, std::span<const double> p) {
  switch (kind) {
    case ModelKind::SI: return EndogenousModel::si(p[0]);
    case ModelKind::EXP: return EndogenousModel::exp(p[0], p[1]);
    case ModelKind::LOG: return EndogenousModel::log(p[0], p[1]);
  }
  return {};
}

EndogenousModel clamp_model(const EndogenousModel& m, const std::vector<Coordinate>& coords) {
  auto p = params_of(m);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = coords[k].natural.clamp(p[k]);
  return model_from(m.kind, p);
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Best p_ext for one window under a fixed model.
optimize::ScalarResult best_p_ext(const LikelihoodEvaluator& eval, Window t, const EndogenousModel& model,
                                  const OptimizerSpec& spec) {
  const Coordinate coord{spec.p_ext, true};
  auto objective = [&](double u) { return -eval.window(t, model, coord.from_search(u)).value; };
  auto r = optimize::brent_minimize(objective, coord.search(), spec.tolerance, spec.max_inner);
  r.x = coord.from_search(r.x);
  return r;
}

/// Searches the endogenous parameters of `objective` (a negated
/// log-likelihood over natural parameters) starting from `start`.
struct EndogenousSearch {
  std::vector<double> params;
  double value = std::numeric_limits<double>::infinity();
  bool fallback = false;
};

EndogenousSearch search_endogenous(const std::function<double(std::span<const double>)>& objective,
                                   const std::vector<Coordinate>& coords, std::vector<double> start,
                                   const OptimizerSpec& spec) {
  auto in_search = [&](std::span<const double> u) {
    std::vector<double> p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) p[k] = coords[k].from_search(u[k]);
    return p;
  };
  EndogenousSearch best;
  auto consider = [&](std::vector<double> p, double v, bool fallback) {
    if (v < best.value) {
      best.params = std::move(p);
      best.value = v;
      best.fallback = fallback;
    }
  };

  if (coords.size() == 1) {
    auto f = [&](double u) {
      const double x = u;
      return objective(in_search(std::span<const double>(&x, 1)));
    };
    const auto r = optimize::brent_minimize(f, coords[0].search(), spec.tolerance, spec.max_inner);
    consider({coords[0].from_search(r.x)}, r.fx, false);
    return best;
  }

  auto f_search = [&](std::span<const double> u) { return objective(in_search(u)); };
  std::vector<double> u0(start.size());
  for (std::size_t k = 0; k < start.size(); ++k) u0[k] = coords[k].to_search(start[k]);
  std::vector<optimize::Bound> box;
  for (const auto& c : coords) box.push_back(c.search());
  optimize::NelderMeadOptions nm;
  nm.max_evaluations = 20 * spec.max_inner;
  nm.xtol = std::max(spec.tolerance, 1e-9);
  nm.ftol = 1e-10;

  bool simplex_ok = false;
  if (spec.lattice != LatticeMode::Always) {
    const auto r = optimize::nelder_mead(f_search, u0, box, nm);
    simplex_ok = r.converged && std::isfinite(r.fx);
    consider(in_search(r.x), r.fx, false);
  }
  const bool use_lattice =
      spec.lattice == LatticeMode::Always || (spec.lattice == LatticeMode::Auto && !simplex_ok);
  if (use_lattice) {
    // Second parameter fixed on a lattice, 1-D search over the first.
    const auto& fixed = coords[1].natural;
    std::vector<double> lattice;
    if (coords[0].log_scale) {  // EXP: log-spaced decay rates
      lattice = optimize::log_space(std::max(fixed.lo, 1e-3), std::max(fixed.hi, 1e-3), spec.lattice_size);
      if (fixed.lo < 1e-3) lattice.insert(lattice.begin(), fixed.lo);
    } else {  // LOG: evenly spaced thresholds
      lattice = optimize::lin_space(fixed.lo, fixed.hi, spec.lattice_size);
    }
    EndogenousSearch grid;
    for (double second : lattice) {
      auto f = [&](double u) {
        const std::vector<double> p{coords[0].from_search(u), second};
        return objective(p);
      };
      const auto r = optimize::brent_minimize(f, coords[0].search(), spec.tolerance, spec.max_inner);
      if (r.fx < grid.value) {
        grid.params = {coords[0].from_search(r.x), second};
        grid.value = r.fx;
      }
    }
    consider(grid.params, grid.value, true);
    // Polish the best lattice point.
    std::vector<double> ug(2);
    for (std::size_t k = 0; k < 2; ++k) ug[k] = coords[k].to_search(grid.params[k]);
    const auto r = optimize::nelder_mead(f_search, ug, box, nm);
    consider(in_search(r.x), r.fx, true);
  }
  return best;
}

}  // namespace

std::vector<optimize::Bound> parameter_bounds(ModelKind kind, const OptimizerSpec& spec,
                                              std::size_t max_degree) {
  switch (kind) {
    case ModelKind::SI: return {spec.p0};
    case ModelKind::EXP: return {spec.p0, spec.lambda};
    case ModelKind::LOG:
      return {spec.k, spec.a0.value_or(optimize::Bound{0.0, static_cast<double>(std::max<std::size_t>(max_degree, 1))})};
  }
  return {};
}

InitResult init_per_window(const LikelihoodEvaluator& eval, ModelKind kind,
                           const InferenceSettings& settings, std::size_t max_degree) {
  const auto& spec = settings.optimizer;
  const auto coords = coordinates(kind, spec, max_degree);
  const std::size_t horizon = eval.horizon();

  std::vector<double> lower(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) lower[k] = coords[k].natural.lo;
  const EndogenousModel floor_model = model_from(kind, lower);

  // Default search start: mid-scale endogenous influence.
  std::vector<double> start;
  switch (kind) {
    case ModelKind::SI: start = {0.01}; break;
    case ModelKind::EXP: start = {0.01, 0.5}; break;
    case ModelKind::LOG: start = {1.0, std::min(2.0, coords[1].natural.hi)}; break;
  }
  for (std::size_t k = 0; k < start.size(); ++k) start[k] = coords[k].natural.clamp(start[k]);

  InitResult out;
  out.windows.resize(horizon);
  out.series.p_ext.assign(horizon, spec.p_ext.lo);

  parallel_for(horizon, settings.workers, [&](std::size_t ti) {
    const auto t = static_cast<Window>(ti);
    WindowEstimate& est = out.windows[ti];
    if (eval.n_activated(t) == 0) {
      // Only inactive terms: the likelihood is maximized at the lower bounds.
      est.model = floor_model;
      est.p_ext = spec.p_ext.lo;
      est.loglik = eval.window(t, floor_model, est.p_ext).value;
      return;
    }
    auto profile = [&](std::span<const double> p) {
      const auto m = model_from(kind, p);
      return best_p_ext(eval, t, m, spec).fx;
    };
    auto search = search_endogenous(profile, coords, start, spec);
    est.model = model_from(kind, search.params);
    const auto pe = best_p_ext(eval, t, est.model, spec);
    est.p_ext = pe.x;
    est.loglik = -pe.fx;
    est.identified = true;
    est.fallback = search.fallback;
  });

  std::vector<std::vector<double>> per_param(coords.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    out.series.p_ext[t] = out.windows[t].p_ext;
    out.fallbacks += out.windows[t].fallback;
    if (!out.windows[t].identified) continue;
    const auto p = params_of(out.windows[t].model);
    for (std::size_t k = 0; k < p.size(); ++k) per_param[k].push_back(p[k]);
  }
  std::vector<double> med(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    med[k] = per_param[k].empty() ? coords[k].natural.lo : median(per_param[k]);
  }
  out.start = model_from(kind, med);
  return out;
}

EndogenousModel fit_endogenous_given_ext(const LikelihoodEvaluator& eval, const EndogenousModel& current,
                                         const ExogenousSeries& series, const OptimizerSpec& spec,
                                         std::size_t max_degree, std::size_t* fallbacks) {
  if (series.size() != eval.horizon()) {
    throw std::invalid_argument("fit_endogenous_given_ext: series length differs from horizon");
  }
  const auto coords = coordinates(current.kind, spec, max_degree);
  const EndogenousModel start = clamp_model(current, coords);
  auto objective = [&](std::span<const double> p) {
    return -eval.total(model_from(current.kind, p), series.p_ext);
  };
  const double start_value = objective(params_of(start));
  auto search = search_endogenous(objective, coords, params_of(start), spec);
  if (fallbacks && search.fallback) ++*fallbacks;
  if (!(search.value < start_value)) return start;
  return model_from(current.kind, search.params);
}

ExogenousSeries fit_ext_given_endogenous(const LikelihoodEvaluator& eval, const EndogenousModel& model,
                                         const ExogenousSeries& current, const OptimizerSpec& spec,
                                         std::size_t workers) {
  if (current.size() != eval.horizon()) {
    throw std::invalid_argument("fit_ext_given_endogenous: series length differs from horizon");
  }
  ExogenousSeries out = current;
  parallel_for(eval.horizon(), workers, [&](std::size_t ti) {
    const auto t = static_cast<Window>(ti);
    const double kept = spec.p_ext.clamp(current[ti]);
    const double kept_value = eval.window(t, model, kept).value;
    const auto r = best_p_ext(eval, t, model, spec);
    out.p_ext[ti] = -r.fx > kept_value ? r.x : kept;
  });
  return out;
}

InferenceResult alternate(const SocialGraph& g, const Cascade& c, ModelKind kind,
                          const InferenceSettings& settings) {
  const LikelihoodEvaluator eval(g, c, settings.correction);
  return alternate(eval, kind, settings, g.max_degree());
}

InferenceResult alternate(const LikelihoodEvaluator& eval, ModelKind kind,
                          const InferenceSettings& settings, std::size_t max_degree) {
  if (!(settings.epsilon > 0.0)) throw std::invalid_argument("alternate: epsilon must be > 0");
  const auto& spec = settings.optimizer;

  InferenceResult out;
  out.init = init_per_window(eval, kind, settings, max_degree);
  out.fallbacks = out.init.fallbacks;

  EndogenousModel model = clamp_model(out.init.start, coordinates(kind, spec, max_degree));
  ExogenousSeries series = out.init.series;
  double loglik = eval.total(model, series.p_ext);
  out.initial_loglik = loglik;
  out.halfstep_loglik.push_back(loglik);

  auto record = [&](double next) {
    if (next < loglik - kMonotoneSlack) ++out.monotonicity_violations;
    out.halfstep_loglik.push_back(next);
    loglik = next;
  };

  for (int iter = 1; iter <= settings.max_outer; ++iter) {
    IterationTrace trace;
    trace.iteration = iter;

    const EndogenousModel next_model =
        fit_endogenous_given_ext(eval, model, series, spec, max_degree, &out.fallbacks);
    record(eval.total(next_model, series.p_ext));
    trace.loglik_after_endogenous = loglik;

    ExogenousSeries next_series = fit_ext_given_endogenous(eval, next_model, series, spec, settings.workers);
    record(eval.total(next_model, next_series.p_ext));
    trace.loglik_after_exogenous = loglik;

    const auto before = params_of(model);
    const auto after = params_of(next_model);
    for (std::size_t k = 0; k < before.size(); ++k) {
      trace.delta_peer = std::max(trace.delta_peer, std::abs(after[k] - before[k]));
    }
    for (std::size_t t = 0; t < series.size(); ++t) {
      trace.delta_ext += std::abs(next_series[t] - series[t]);
    }
    model = next_model;
    series = std::move(next_series);
    trace.model = model;
    out.trace.push_back(trace);
    out.iterations = iter;
    if (trace.delta_peer < settings.epsilon && trace.delta_ext < settings.epsilon) {
      out.converged = true;
      break;
    }
  }

  out.model = model;
  out.series = std::move(series);
  out.loglik = eval.total(out.model, out.series.p_ext, &out.clamp_hits);
  return out;
}

}  // namespace cascadex
