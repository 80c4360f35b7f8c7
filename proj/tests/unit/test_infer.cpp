#include <cascadex/infer.hpp>
#include <cascadex/simulate.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"

using namespace cascadex;
using testing_support::make_graph;

namespace {

SimOutcome sim(const SocialGraph& g, EndogenousModel m, double q, std::size_t T, std::uint64_t seed,
               std::size_t seeds = 10) {
  SimConfig cfg;
  cfg.model = m;
  cfg.profile = ExogenousProfile::constant(q);
  cfg.horizon = T;
  cfg.seed = seed;
  cfg.n_seeds = seeds;
  return simulate(g, cfg);
}

void expect_within_bounds(const InferenceResult& r, const OptimizerSpec& spec, std::size_t max_degree) {
  const auto b = parameter_bounds(r.model.kind, spec, max_degree);
  switch (r.model.kind) {
    case ModelKind::SI: EXPECT_TRUE(b[0].contains(r.model.p0)); break;
    case ModelKind::EXP:
      EXPECT_TRUE(b[0].contains(r.model.p0));
      EXPECT_TRUE(b[1].contains(r.model.lambda));
      break;
    case ModelKind::LOG:
      EXPECT_TRUE(b[0].contains(r.model.k));
      EXPECT_TRUE(b[1].contains(r.model.a0));
      break;
  }
  for (double p : r.series.p_ext) EXPECT_TRUE(spec.p_ext.contains(p));
}

}  // namespace

TEST(Init, EmptyWindowAtBoundary) {
  auto g = make_graph(4, {{0, 1}});
  Cascade c({0, 2, -1, -1}, 1.0);
  LikelihoodEvaluator ev(g, c, {});
  InferenceSettings st;
  auto init = init_per_window(ev, ModelKind::SI, st, g.max_degree());
  ASSERT_EQ(init.windows.size(), 3u);
  EXPECT_FALSE(init.windows[1].identified);
  EXPECT_EQ(init.series[1], st.optimizer.p_ext.lo);
  EXPECT_EQ(init.series[0], st.optimizer.p_ext.lo);
  EXPECT_TRUE(init.windows[2].identified);
}

TEST(Init, BernoulliFraction) {
  std::vector<std::int64_t> minutes(101, -1);
  minutes[0] = 0;
  for (int i = 1; i <= 10; ++i) minutes[static_cast<std::size_t>(i)] = 1;
  auto g = make_graph(101, {});
  Cascade c(minutes, 1.0, 2);
  LikelihoodEvaluator ev(g, c, {});
  auto init = init_per_window(ev, ModelKind::SI, {}, 0);
  EXPECT_NEAR(init.series[1], 0.1, 1e-6);
  auto ext = fit_ext_given_endogenous(ev, EndogenousModel::si(0.5), init.series, {});
  EXPECT_NEAR(ext[1], 0.1, 1e-6);
}

TEST(FitEndogenous, NoEdgesGoesToLowerBound) {
  auto g = make_graph(200, {});
  auto out = sim(g, EndogenousModel::si(0.1), 0.02, 20, 3);
  LikelihoodEvaluator ev(g, out.cascade, {});
  OptimizerSpec spec;
  auto m = fit_endogenous_given_ext(ev, EndogenousModel::si(0.05), out.p_ext, spec, 0);
  // no peer exposure at all: likelihood flat in p0, search must not move upward
  EXPECT_LE(m.p0, 0.05);
  auto r = alternate(g, out.cascade, ModelKind::SI, {});
  EXPECT_NEAR(r.model.p0, spec.p0.lo, 1e-6);
}

TEST(FitEndogenous, NeverWorseThanStart) {
  auto g = powerlaw_cluster_graph(300, 3, 0.1, 5);
  auto out = sim(g, EndogenousModel::exp(0.1, 0.5), 0.003, 30, 5);
  LikelihoodEvaluator ev(g, out.cascade, {});
  for (auto mode : {LatticeMode::Never, LatticeMode::Auto, LatticeMode::Always}) {
    OptimizerSpec spec;
    spec.lattice = mode;
    const auto start = EndogenousModel::exp(0.02, 2.0);
    std::size_t fb = 0;
    auto m = fit_endogenous_given_ext(ev, start, out.p_ext, spec, g.max_degree(), &fb);
    EXPECT_GE(ev.total(m, out.p_ext.p_ext), ev.total(start, out.p_ext.p_ext));
    if (mode == LatticeMode::Always) EXPECT_EQ(fb, 1u);
    if (mode == LatticeMode::Never) EXPECT_EQ(fb, 0u);
  }
}

TEST(Alternate, PureEndogenousData) {
  auto g = powerlaw_cluster_graph(1000, 3, 0.1, 2);
  auto out = sim(g, EndogenousModel::si(0.02), 0.0, 40, 2);
  auto r = alternate(g, out.cascade, ModelKind::SI, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.model.p0, 0.02, 0.3 * 0.02);
  auto sorted = r.series.p_ext;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_LT(sorted[20], 1e-4);
  EXPECT_EQ(r.monotonicity_violations, 0u);
  expect_within_bounds(r, {}, g.max_degree());
}

TEST(Alternate, SeedsOnly) {
  auto g = powerlaw_cluster_graph(100, 2, 0.1, 1);
  std::vector<std::int64_t> minutes(100, -1);
  for (int i = 0; i < 5; ++i) minutes[static_cast<std::size_t>(i)] = 0;
  Cascade c(minutes, 1.0, 10);
  InferenceSettings st;
  auto r = alternate(g, c, ModelKind::SI, st);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.model.p0, st.optimizer.p0.lo, 1e-7);
  for (double p : r.series.p_ext) EXPECT_NEAR(p, 0.0, 1e-6);
}

TEST(Alternate, ExpWithoutDecay) {
  auto g = powerlaw_cluster_graph(1000, 3, 0.1, 4);
  auto out = sim(g, EndogenousModel::exp(0.02, 0.0), 0.002, 40, 4);
  auto r = alternate(g, out.cascade, ModelKind::EXP, {});
  EXPECT_LT(r.model.lambda, 0.1);
  EXPECT_NEAR(r.model.p0, 0.02, 0.4 * 0.02);
  EXPECT_EQ(r.monotonicity_violations, 0u);
  expect_within_bounds(r, {}, g.max_degree());
}

TEST(Alternate, LogModelMonotone) {
  auto g = powerlaw_cluster_graph(500, 3, 0.1, 6);
  auto out = sim(g, EndogenousModel::log(1.5, 3.0), 0.002, 30, 6);
  InferenceSettings st;
  auto r = alternate(g, out.cascade, ModelKind::LOG, st);
  EXPECT_EQ(r.monotonicity_violations, 0u);
  for (std::size_t k = 1; k < r.halfstep_loglik.size(); ++k) {
    EXPECT_GE(r.halfstep_loglik[k], r.halfstep_loglik[k - 1] - 1e-9);
  }
  EXPECT_GE(r.loglik, r.initial_loglik);
  expect_within_bounds(r, st.optimizer, g.max_degree());
}

TEST(Alternate, DeterministicAcrossWorkers) {
  auto g = powerlaw_cluster_graph(400, 3, 0.1, 8);
  auto out = sim(g, EndogenousModel::exp(0.05, 0.4), 0.003, 30, 8);
  InferenceSettings a, b;
  b.workers = 4;
  auto ra = alternate(g, out.cascade, ModelKind::EXP, a);
  auto rb = alternate(g, out.cascade, ModelKind::EXP, b);
  EXPECT_EQ(ra.model, rb.model);
  EXPECT_EQ(ra.series.p_ext, rb.series.p_ext);
  EXPECT_EQ(ra.loglik, rb.loglik);
  EXPECT_EQ(ra.iterations, rb.iterations);
}

TEST(Alternate, NonConvergenceFlagged) {
  auto g = powerlaw_cluster_graph(400, 3, 0.1, 9);
  auto out = sim(g, EndogenousModel::si(0.03), 0.003, 30, 9);
  InferenceSettings st;
  st.max_outer = 1;
  st.epsilon = 1e-300;
  auto r = alternate(g, out.cascade, ModelKind::SI, st);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.halfstep_loglik.size(), 3u);
  st.epsilon = 0;
  EXPECT_THROW(alternate(g, out.cascade, ModelKind::SI, st), std::invalid_argument);
}

TEST(Alternate, AllInWindowZero) {
  auto g = powerlaw_cluster_graph(50, 2, 0.1, 1);
  std::vector<std::int64_t> minutes(50, 0);
  Cascade c(minutes, 1.0);
  auto r = alternate(g, c, ModelKind::EXP, {});
  EXPECT_TRUE(std::isfinite(r.loglik));
  EXPECT_EQ(r.series.size(), 1u);
}

TEST(Lattice, ParseModes) {
  EXPECT_EQ(parse_lattice_mode("always"), LatticeMode::Always);
  EXPECT_EQ(to_string(LatticeMode::Never), "never");
  EXPECT_THROW(parse_lattice_mode("sometimes"), std::invalid_argument);
}
