#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "krorder/portfolio.hpp"

using namespace krorder;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::MalformedInput;
}

Scenario random_scenario(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<std::vector<double>> r(m, std::vector<double>(n));
  for (auto& row : r) {
    for (double& x : row) x = uniform(rng, -1.0, 1.5);
  }
  std::vector<double> p(m);
  double t = 0.0;
  for (double& x : p) t += x = uniform(rng, 0.1, 1.0);
  for (double& x : p) x /= t;
  return {r, p};
}

PiecewiseLinearUtility random_concave(Rng& rng) {
  const std::size_t k = uniform_index(rng, 1, 3);
  std::vector<double> b(k), s(k + 1);
  for (double& x : b) x = uniform(rng, -1.0, 1.0);
  std::sort(b.begin(), b.end());
  for (double& x : s) x = uniform(rng, -0.5, 2.0);
  std::sort(s.begin(), s.end(), std::greater<>());
  return {b, s, uniform(rng, -1.0, 1.0)};
}

Box cube(std::size_t n, double lo, double hi) { return {std::vector<double>(n, lo), std::vector<double>(n, hi)}; }

// Independent piecewise linear evaluation: walk from 0 segment by segment.
double u_by_hand(const PiecewiseLinearUtility& u, double x) {
  const auto& b = u.breakpoints();
  const auto& s = u.slopes();
  auto slope_at = [&](double t) {
    std::size_t j = 0;
    while (j < b.size() && t >= b[j]) ++j;
    return s[j];
  };
  // Fine midpoint rule is exact for piecewise constant slopes except at
  // cells straddling a breakpoint; use many cells and compare loosely.
  const int cells = 200000;
  double v = u.value_at_zero();
  for (int c = 0; c < cells; ++c) v += slope_at(x * (c + 0.5) / cells) * x / cells;
  return v;
}

}  // namespace

TEST(Utility, EvaluationAndSubgradients) {
  PiecewiseLinearUtility u({0.0, 1.0}, {2.0, 1.0, -0.5}, 0.0);
  EXPECT_DOUBLE_EQ(u(0.0), 0.0);
  EXPECT_DOUBLE_EQ(u(-1.0), -2.0);
  EXPECT_DOUBLE_EQ(u(0.5), 0.5);
  EXPECT_DOUBLE_EQ(u(3.0), 1.0 - 1.0);
  EXPECT_DOUBLE_EQ(u.lip(), 2.0);
  EXPECT_TRUE(u.is_concave());
  EXPECT_DOUBLE_EQ(u.subgradient(0.0), 1.5);
  EXPECT_DOUBLE_EQ(u.subgradient(1.0), 0.25);
  EXPECT_DOUBLE_EQ(u.subgradient(0.3), 1.0);
  EXPECT_FALSE(PiecewiseLinearUtility({0.0}, {0.5, 1.0}).is_concave());
  EXPECT_EQ(code_of([] { PiecewiseLinearUtility({1.0, 0.0}, {1, 1, 1}); }), ErrorCode::MalformedInput);
  EXPECT_EQ(code_of([] { PiecewiseLinearUtility({1.0}, {1}); }), ErrorCode::DimensionMismatch);

  Rng rng(71);
  for (int t = 0; t < 50; ++t) {
    auto v = random_concave(rng);
    const double x = uniform(rng, -3.0, 3.0);
    EXPECT_NEAR(v(x), u_by_hand(v, x), 1e-4);
  }
}

TEST(Utility, KinkSelectionInsideClarkeInterval) {
  Rng rng(72);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = uniform_index(rng, 1, 4);
    std::vector<double> b(k), s(k + 1);
    for (double& x : b) x = uniform(rng, -2.0, 2.0);
    std::sort(b.begin(), b.end());
    for (double& x : s) x = uniform(rng, -2.0, 2.0);
    PiecewiseLinearUtility u(b, s);
    for (std::size_t i = 0; i < k; ++i) {
      const double g = u.subgradient(b[i]);
      EXPECT_GE(g, std::min(s[i], s[i + 1]));
      EXPECT_LE(g, std::max(s[i], s[i + 1]));
    }
  }
}

TEST(EvalF, Examples) {
  Scenario one({{1.0, 2.0}}, {1.0});
  auto id = PiecewiseLinearUtility::linear();
  EXPECT_DOUBLE_EQ(eval_F({0.0, 0.0}, one, id), 0.0);
  PiecewiseLinearUtility u({0.0}, {2.0, 1.0});
  EXPECT_DOUBLE_EQ(eval_F({1.0, -1.0}, one, u), -2.0);
  // Two scenarios by hand: 0.25 u(1) + 0.75 u(-1) = 0.25 - 1.5.
  Scenario two({{1.0}, {-1.0}}, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(eval_F({1.0}, two, u), 0.25 * 1.0 + 0.75 * -2.0);
  EXPECT_EQ(code_of([&] { eval_F({1.0}, one, u); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { Scenario({{1.0}}, {0.5}); }), ErrorCode::NotProbability);
}

TEST(LipschitzBoundF, ExamplesAndSampling) {
  EXPECT_DOUBLE_EQ(lipschitz_bound_F(Scenario({{0.0, 0.0}}, {1.0}), PiecewiseLinearUtility::linear()), 0.0);
  EXPECT_DOUBLE_EQ(lipschitz_bound_F(Scenario({{0.6, 0.8}}, {1.0}), PiecewiseLinearUtility::linear()), 1.0);
  Rng rng(73);
  auto sc = random_scenario(rng, 6, 3);
  PiecewiseLinearUtility u({-0.5, 0.2, 1.0}, {0.3, 1.7, -0.8, 0.4});
  const double K = lipschitz_bound_F(sc, u);
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> a(3), b(3), d(3);
    for (std::size_t i = 0; i < 3; ++i) {
      a[i] = uniform(rng, -3, 3);
      b[i] = uniform(rng, -3, 3);
      d[i] = a[i] - b[i];
    }
    const double dist = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    EXPECT_LE(std::abs(eval_F(a, sc, u) - eval_F(b, sc, u)), K * dist * (1 + 1e-12) + 1e-15);
  }
}

TEST(Maximize, LinearUtilityMatchesLP) {
  Rng rng(74);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = uniform_index(rng, 1, 4);
    auto sc = random_scenario(rng, uniform_index(rng, 1, 6), n);
    std::vector<double> prices(n);
    for (double& p : prices) p = uniform(rng, 0.5, 2.0);
    const Box box = cube(n, 0.0, 5.0);
    const auto u = PiecewiseLinearUtility::linear();
    const double W = uniform(rng, 0.5, 3.0);
    const auto res = maximize_portfolio(sc, u, prices, W, box);
    const auto lp = portfolio_lp(sc, u, prices, W, box);
    ASSERT_EQ(lp.status, LPStatus::Optimal);
    EXPECT_NEAR(res.value, lp.objective, 1e-4 * (1 + std::abs(lp.objective)));
    EXPECT_TRUE(res.certified) << res.certificate_norm;
  }
}

TEST(Maximize, OneAssetConcaveMatchesGrid) {
  // u has its kink at 0.5; scenario returns 1 and -0.2.
  Scenario sc({{1.0}, {-0.2}}, {0.5, 0.5});
  PiecewiseLinearUtility u({0.5}, {1.0, -2.0});
  for (double W : {0.2, 1.0, 5.0}) {
    const auto res = maximize_portfolio(sc, u, {1.0}, W);
    double best = -1e300;
    for (int i = -200000; i <= 200000; ++i) {
      const double a = i * 1e-5 * 5;
      if (a > W) break;
      best = std::max(best, eval_F({a}, sc, u));
    }
    EXPECT_NEAR(res.value, best, 1e-4 * (1 + std::abs(best))) << "W=" << W;
    EXPECT_LE(res.alpha[0], W + 1e-9);
    EXPECT_TRUE(res.certified) << res.certificate_norm;
  }
}

TEST(Maximize, RandomConcaveMatchesLP) {
  Rng rng(75);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = uniform_index(rng, 1, 3);
    auto sc = random_scenario(rng, uniform_index(rng, 2, 6), n);
    auto u = random_concave(rng);
    std::vector<double> prices(n);
    for (double& p : prices) p = uniform(rng, 0.2, 2.0);
    const double W = uniform(rng, 0.0, 2.0);
    const Box box = cube(n, -2.0, 3.0);
    const auto lp = portfolio_lp(sc, u, prices, W, box);
    ASSERT_EQ(lp.status, LPStatus::Optimal);
    const auto res = maximize_portfolio(sc, u, prices, W, box);
    EXPECT_NEAR(res.value, lp.objective, 1e-4 * (1 + std::abs(lp.objective)));
    EXPECT_LE(res.value, lp.objective + 1e-9 * (1 + std::abs(lp.objective)));
    EXPECT_TRUE(res.certified) << res.certificate_norm;
    for (std::size_t r = 1; r < res.best_trace.size(); ++r) EXPECT_GE(res.best_trace[r], res.best_trace[r - 1]);
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST(Maximize, UnboundedAndBoundedWithoutBox) {
  // Positive mean return and free short sales of the second asset.
  Scenario sc({{1.0, 0.0}, {0.5, 0.1}}, {0.5, 0.5});
  const auto lin = PiecewiseLinearUtility::linear();
  EXPECT_EQ(code_of([&] { maximize_portfolio(sc, lin, {1.0, 1.0}, 1.0); }), ErrorCode::Unbounded);
  // Satiation: u peaks at 1, bounded on every set.
  PiecewiseLinearUtility peak({1.0}, {1.0, -1.0});
  const auto res = maximize_portfolio(sc, peak, {1.0, 1.0}, 1.0);
  const auto lp = portfolio_lp(sc, peak, {1.0, 1.0}, 1.0);
  ASSERT_EQ(lp.status, LPStatus::Optimal);
  EXPECT_NEAR(res.value, lp.objective, 1e-4 * (1 + std::abs(lp.objective)));
}

TEST(Maximize, Errors) {
  Scenario sc({{1.0}}, {1.0});
  PiecewiseLinearUtility convex({0.0}, {0.5, 2.0});
  EXPECT_EQ(code_of([&] { maximize_portfolio(sc, convex, {1.0}, 1.0); }), ErrorCode::MissingBox);
  EXPECT_EQ(code_of([&] { maximize_portfolio(sc, convex, {1.0}, 0.0, cube(1, 1.0, 2.0)); }), ErrorCode::Infeasible);
  EXPECT_EQ(code_of([&] { maximize_portfolio(sc, convex, {1.0, 1.0}, 1.0, cube(1, 0.0, 1.0)); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] { maximize_portfolio(sc, convex, {0.0}, 1.0, cube(1, 0.0, 1.0)); }),
            ErrorCode::PreconditionViolated);
}

TEST(Maximize, ZeroWealthNoShorting) {
  Scenario sc({{1.0, 2.0}, {-0.5, 0.3}}, {0.4, 0.6});
  Box box{{0.0, 0.0}, {INFINITY, INFINITY}};
  const auto res = maximize_portfolio(sc, PiecewiseLinearUtility::linear(), {1.0, 2.0}, 0.0, box);
  EXPECT_NEAR(res.alpha[0], 0.0, 1e-12);
  EXPECT_NEAR(res.alpha[1], 0.0, 1e-12);
  EXPECT_NEAR(res.value, 0.0, 1e-12);
  EXPECT_TRUE(res.certified);
}

TEST(Maximize, NonConcaveMultistartFindsGridOptimum) {
  // Two humps in one asset: a local peak at 1 and a higher one at 3.
  Scenario sc({{1.0}}, {1.0});
  PiecewiseLinearUtility u({1.0, 2.0, 3.0}, {1.0, -1.0, 2.0, -1.0});
  const Box box = cube(1, 0.0, 4.0);
  PortfolioOptions opt;
  opt.seed = 3;
  const auto res = maximize_portfolio(sc, u, {1.0}, 10.0, box, opt);
  EXPECT_FALSE(res.concave);
  EXPECT_EQ(res.starts, 8u);
  EXPECT_NEAR(res.alpha[0], 3.0, 1e-4);
  EXPECT_NEAR(res.value, u(3.0), 1e-4);
  // Same seed, same answer.
  const auto again = maximize_portfolio(sc, u, {1.0}, 10.0, box, opt);
  EXPECT_EQ(again.alpha, res.alpha);
  opt.threads = 4;
  EXPECT_EQ(maximize_portfolio(sc, u, {1.0}, 10.0, box, opt).alpha, res.alpha);
}
