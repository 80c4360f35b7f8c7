#include "cascadex/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cascadex::optimize {

namespace {

double finite_or_max(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

}  // namespace

ScalarResult brent_minimize(const std::function<double(double)>& f, Bound bound, double xtol,
                            int max_iter) {
  if (!(bound.lo <= bound.hi)) throw std::invalid_argument("brent_minimize: empty interval");
  ScalarResult r;
  if (bound.lo == bound.hi) {
    r.x = bound.lo;
    r.fx = finite_or_max(f(r.x));
    r.evaluations = 1;
    r.converged = true;
    return r;
  }

  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double sqrt_eps = std::sqrt(2.2e-16);
  double a = bound.lo;
  double b = bound.hi;
  double fulc = a + golden * (b - a);
  double nfc = fulc;
  double xf = fulc;
  double rat = 0.0;
  double e = 0.0;
  double x = xf;
  double fx = finite_or_max(f(x));
  int evals = 1;
  double fu = std::numeric_limits<double>::max();
  double ffulc = fx;
  double fnfc = fx;
  double xm = 0.5 * (a + b);
  double tol1 = sqrt_eps * std::abs(xf) + xtol / 3.0;
  double tol2 = 2.0 * tol1;

  while (std::abs(xf - xm) > (tol2 - 0.5 * (b - a))) {
    if (evals >= max_iter) {
      r.x = xf;
      r.fx = fx;
      r.evaluations = evals;
      r.converged = false;
      return r;
    }
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      golden_step = false;
      double rr = (xf - nfc) * (fx - ffulc);
      double q = (xf - fulc) * (fx - fnfc);
      double p = (xf - fulc) * q - (xf - nfc) * rr;
      q = 2.0 * (q - rr);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      rr = e;
      e = rat;
      if (std::abs(p) < std::abs(0.5 * q * rr) && p > q * (a - xf) && p < q * (b - xf)) {
        rat = p / q;
        x = xf + rat;
        if ((x - a) < tol2 || (b - x) < tol2) {
          const double si = xm - xf >= 0 ? 1.0 : -1.0;
          rat = tol1 * si;
        }
      } else {
        golden_step = true;
      }
    }
    if (golden_step) {
      e = xf >= xm ? a - xf : b - xf;
      rat = golden * e;
    }
    const double si = rat >= 0 ? 1.0 : -1.0;
    x = xf + si * std::max(std::abs(rat), tol1);
    x = bound.clamp(x);
    fu = finite_or_max(f(x));
    ++evals;

    if (fu <= fx) {
      if (x >= xf) {
        a = xf;
      } else {
        b = xf;
      }
      fulc = nfc;
      ffulc = fnfc;
      nfc = xf;
      fnfc = fx;
      xf = x;
      fx = fu;
    } else {
      if (x < xf) {
        a = x;
      } else {
        b = x;
      }
      if (fu <= fnfc || nfc == xf) {
        fulc = nfc;
        ffulc = fnfc;
        nfc = x;
        fnfc = fu;
      } else if (fu <= ffulc || fulc == xf || fulc == nfc) {
        fulc = x;
        ffulc = fu;
      }
    }
    xm = 0.5 * (a + b);
    tol1 = sqrt_eps * std::abs(xf) + xtol / 3.0;
    tol2 = 2.0 * tol1;
  }

  // The interior search never probes the end points; a monotone objective
  // has its minimum there. A flat objective settles on the lower bound.
  for (double edge : {bound.lo, bound.hi}) {
    const double fe = finite_or_max(f(edge));
    ++evals;
    if (fe < fx || (edge == bound.lo && fe <= fx)) {
      fx = fe;
      xf = edge;
    }
  }
  r.x = xf;
  r.fx = fx;
  r.evaluations = evals;
  r.converged = true;
  return r;
}

Result nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                   std::span<const Bound> bounds, const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  if (bounds.size() != dim) throw std::invalid_argument("nelder_mead: bounds size mismatch");
  auto project = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < dim; ++k) x[k] = bounds[k].clamp(x[k]);
  };
  project(x0);

  Result r;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return finite_or_max(f(x));
  };

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  std::vector<double> fvals(dim + 1);
  for (std::size_t k = 0; k < dim; ++k) {
    const double width = bounds[k].hi - bounds[k].lo;
    double step = options.initial_step * width;
    if (step == 0.0) step = 1e-4;
    auto& v = simplex[k + 1];
    v[k] = x0[k] + step;
    if (v[k] > bounds[k].hi) v[k] = x0[k] - step;
    project(v);
  }
  for (std::size_t i = 0; i <= dim; ++i) fvals[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  bool converged = false;
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    {
      std::vector<std::vector<double>> s2(dim + 1);
      std::vector<double> f2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        s2[i] = simplex[order[i]];
        f2[i] = fvals[order[i]];
      }
      simplex.swap(s2);
      fvals.swap(f2);
    }

    double xspread = 0.0;
    double fspread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      fspread = std::max(fspread, std::abs(fvals[i] - fvals[0]));
      for (std::size_t k = 0; k < dim; ++k) xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[0][k]));
    }
    if (xspread <= options.xtol && fspread <= options.ftol) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);
    }
    auto along = [&](double coef, std::vector<double>& out) {
      for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + coef * (simplex[dim][k] - centroid[k]);
      project(out);
    };

    along(-1.0, trial);
    const double fr = eval(trial);
    if (fr < fvals[0]) {
      along(-2.0, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[dim] = trial2;
        fvals[dim] = fe;
      } else {
        simplex[dim] = trial;
        fvals[dim] = fr;
      }
      continue;
    }
    if (fr < fvals[dim - 1]) {
      simplex[dim] = trial;
      fvals[dim] = fr;
      continue;
    }
    const bool outside = fr < fvals[dim];
    along(outside ? -0.5 : 0.5, trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : fvals[dim])) {
      simplex[dim] = trial2;
      fvals[dim] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
      project(simplex[i]);
      fvals[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fvals.begin(), fvals.end()) - fvals.begin());
  r.x = simplex[best];
  r.fx = fvals[best];
  r.evaluations = evals;
  r.converged = converged;
  return r;
}

Result grid_minimize(const std::function<double(std::span<const double>)>& f,
                     std::span<const std::vector<double>> axes) {
  Result r;
  r.fx = std::numeric_limits<double>::infinity();
  if (axes.empty()) return r;
  for (const auto& axis : axes) {
    if (axis.empty()) throw std::invalid_argument("grid_minimize: empty axis");
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<double> x(axes.size());
  for (;;) {
    for (std::size_t k = 0; k < axes.size(); ++k) x[k] = axes[k][idx[k]];
    const double v = finite_or_max(f(x));
    ++r.evaluations;
    if (v < r.fx) {
      r.fx = v;
      r.x = x;
    }
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
      if (k == 0) {
        r.converged = true;
        return r;
      }
    }
  }
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("log_space: need 0 < lo <= hi");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace cascadex::optimize
