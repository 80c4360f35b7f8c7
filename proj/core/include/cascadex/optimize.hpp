#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cascadex::optimize {

struct Bound {
  double lo = 0.0;
  double hi = 1.0;

  double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct ScalarResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Bounded scalar minimization: golden-section search with parabolic
/// interpolation (Brent), same scheme as scipy's `fminbound`. Never
/// evaluates `f` outside [lo, hi].
ScalarResult brent_minimize(const std::function<double(double)>& f, Bound bound,
                            double xtol = 1e-10, int max_iter = 500);

struct Result {
  std::vector<double> x;
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double xtol = 1e-8;
  double ftol = 1e-10;
  double initial_step = 0.05;  // fraction of each bound's width
};

/// Nelder-Mead simplex search with every vertex projected into the box.
/// `converged` is false when the evaluation budget ran out first.
Result nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                   std::span<const Bound> bounds, const NelderMeadOptions& options = {});

/// Exhaustive search over the Cartesian product of `axes`; ties keep the
/// first lattice point in row-major order.
Result grid_minimize(const std::function<double(std::span<const double>)>& f,
                     std::span<const std::vector<double>> axes);

/// `count` values spaced evenly on a log scale over [lo, hi] (lo > 0).
std::vector<double> log_space(double lo, double hi, std::size_t count);
std::vector<double> lin_space(double lo, double hi, std::size_t count);

}  // namespace cascadex::optimize
