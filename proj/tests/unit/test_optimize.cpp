#include <cascadex/optimize.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace cascadex::optimize;

TEST(Brent, InteriorMinimum) {
  int outside = 0;
  auto f = [&](double x) {
    if (x < -1 || x > 4) ++outside;
    return (x - 1.3) * (x - 1.3) + 0.5;
  };
  auto r = brent_minimize(f, {-1, 4});
  EXPECT_NEAR(r.x, 1.3, 1e-7);
  EXPECT_NEAR(r.fx, 0.5, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(outside, 0);
}

TEST(Brent, BoundaryMinimum) {
  auto r = brent_minimize([](double x) { return x; }, {2, 5});
  EXPECT_NEAR(r.x, 2.0, 1e-8);
  auto s = brent_minimize([](double x) { return -std::log(x); }, {0.1, 0.9});
  EXPECT_NEAR(s.x, 0.9, 1e-8);
  auto d = brent_minimize([](double x) { return x * x; }, {3, 3});
  EXPECT_EQ(d.x, 3.0);
  EXPECT_THROW(brent_minimize([](double x) { return x; }, {1, 0}), std::invalid_argument);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  std::vector<Bound> b{{-2, 2}, {-1, 3}};
  NelderMeadOptions o;
  o.max_evaluations = 5000;
  o.xtol = 1e-10;
  o.ftol = 1e-14;
  o.initial_step = 0.1;
  auto r = nelder_mead(f, {-1.2, 1.0}, b, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, RespectsBox) {
  bool outside = false;
  auto f = [&](std::span<const double> x) {
    if (x[0] < 0 || x[0] > 1 || x[1] < 0 || x[1] > 1) outside = true;
    return (x[0] + 3) * (x[0] + 3) + (x[1] - 7) * (x[1] - 7);
  };
  std::vector<Bound> b{{0, 1}, {0, 1}};
  auto r = nelder_mead(f, {0.5, 0.5}, b);
  EXPECT_FALSE(outside);
  EXPECT_NEAR(r.x[0], 0.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
  EXPECT_THROW(nelder_mead(f, {0.5}, b), std::invalid_argument);
}

TEST(Grid, ExhaustiveAndSpacing) {
  auto ax = lin_space(0, 1, 5);
  EXPECT_EQ(ax, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  auto lg = log_space(1e-3, 10, 5);
  ASSERT_EQ(lg.size(), 5u);
  EXPECT_NEAR(lg[0], 1e-3, 1e-18);
  EXPECT_NEAR(lg[2], 0.1, 1e-15);
  EXPECT_NEAR(lg[4], 10, 1e-12);
  EXPECT_THROW(log_space(0, 1, 3), std::invalid_argument);
  std::vector<std::vector<double>> axes{ax, lg};
  auto r = grid_minimize([](std::span<const double> x) { return std::abs(x[0] - 0.7) + std::abs(std::log10(x[1])); },
                         axes);
  EXPECT_EQ(r.x[0], 0.75);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
  EXPECT_EQ(r.evaluations, 25);
}
