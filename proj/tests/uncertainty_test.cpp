#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "krorder/uncertainty.hpp"

using namespace krorder;

namespace {

MetricSpace xy() { return discrete_space(2); }

Act random_act(Rng& rng, const MetricSpace& s, std::size_t states) {
  std::vector<ProbMeasure> ms;
  for (std::size_t w = 0; w < states; ++w) ms.push_back(random_prob_mixed(rng, s));
  return Act(ms);
}

std::vector<double> random_prior(Rng& rng, std::size_t states) {
  std::vector<double> a(states);
  double t = 0.0;
  for (double& x : a) t += x = uniform(rng, 0.05, 1.0);
  for (double& x : a) x /= t;
  return a;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::MalformedInput;
}

}  // namespace

TEST(CompareActs, Examples) {
  auto s = xy();
  const auto dx = ProbMeasure::dirac(s, 0), dy = ProbMeasure::dirac(s, 1);
  auto U = StateUtilityFamily::from_values(s, {{{0, 1}, {0, 2}}});
  const Act f({dy, dx}), g({dx, dy});
  // f is worth 1 + 0, g is worth 0 + 2.
  EXPECT_EQ(compare_acts(U, f, g), ComparisonResult::StrictWorse);
  EXPECT_EQ(compare_acts(U, f, f), ComparisonResult::Indifferent);
  EXPECT_DOUBLE_EQ(act_distance(f, g), 2.0);
  EXPECT_EQ(code_of([&] { compare_acts(U, f, Act({dx})); }), ErrorCode::DimensionMismatch);
}

TEST(CompareActs, SingleStateReducesToCompare) {
  Rng rng(61);
  for (int t = 0; t < 200; ++t) {
    auto s = random_space(rng, uniform_index(rng, 2, 5));
    auto fs = random_functions(rng, s, uniform_index(rng, 1, 3));
    UtilityFamily U(s, fs);
    std::vector<StateUtility> members;
    for (const auto& f : fs) members.push_back({f});
    StateUtilityFamily SU(s, 1, members);
    auto p = random_prob_mixed(rng, s), q = random_prob_mixed(rng, s);
    EXPECT_EQ(compare_acts(SU, Act({p}), Act({q})), compare(U, p, q));
  }
}

// Mixing both acts with a common third act never changes the ranking.
TEST(CompareActs, AffineInActs) {
  Rng rng(62);
  for (int t = 0; t < 300; ++t) {
    auto s = random_space(rng, uniform_index(rng, 2, 4));
    const std::size_t S = uniform_index(rng, 1, 3);
    std::vector<StateUtility> members;
    for (std::size_t m = 0, k = uniform_index(rng, 1, 3); m < k; ++m) members.push_back(random_functions(rng, s, S));
    StateUtilityFamily U(s, S, members);
    auto f = random_act(rng, s, S), g = random_act(rng, s, S), h = random_act(rng, s, S);
    const double lambda = uniform(rng, 0.0, 0.9);
    // Skip pairs whose gaps sit in the tolerance band after shrinking.
    bool near_tie = false;
    for (const auto& u : U.members()) {
      if (std::abs(act_value(u, f) - act_value(u, g)) < 20 * act_tolerance(u) / (1 - lambda)) near_tie = true;
    }
    if (near_tie) continue;
    EXPECT_EQ(compare_acts(U, f, g), compare_acts(U, mix(f, h, lambda), mix(g, h, lambda)));
  }
}

TEST(ReduceAct, Examples) {
  auto s = xy();
  const auto dx = ProbMeasure::dirac(s, 0), dy = ProbMeasure::dirac(s, 1);
  const Act f({dx, dy});
  const auto r = reduce_act(f, {0.5, 0.5});
  EXPECT_TRUE(r.is_constant());
  EXPECT_DOUBLE_EQ(r[0][0], 0.5);
  EXPECT_DOUBLE_EQ(r[1][1], 0.5);
  const auto d = reduce_act(f, {0.0, 1.0});
  EXPECT_EQ(d[0].weights(), dy.weights());
  Rng rng(63);
  auto p = random_prob(rng, s);
  const auto c = reduce_act(Act::constant(p, 3), random_prior(rng, 3));
  for (std::size_t w = 0; w < 3; ++w) {
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(c[w][i], p[i], 1e-15);
  }
  EXPECT_EQ(code_of([&] { reduce_act(f, {0.7, 0.7}); }), ErrorCode::NotProbability);
  EXPECT_EQ(code_of([&] { reduce_act(f, {1.0}); }), ErrorCode::DimensionMismatch);
}

TEST(ExtractPrior, Examples) {
  auto s = xy();
  auto one = StateUtilityFamily::from_values(s, {{{0, 1}}, {{0, -2}}});
  const auto e1 = extract_prior(one);
  EXPECT_EQ(e1.prior, (std::vector<double>{1.0}));
  EXPECT_EQ(e1.base.size(), 2u);

  auto synth = StateUtilityFamily::from_values(s, {{{0, 0.3}, {0, 0.7}}});
  const auto e2 = extract_prior(synth);
  EXPECT_NEAR(e2.prior[0], 0.3, 1e-15);
  EXPECT_NEAR(e2.prior[1], 0.7, 1e-15);

  auto neg = StateUtilityFamily::from_values(s, {{{0, 1}, {0, -1}}});
  EXPECT_EQ(code_of([&] { extract_prior(neg); }), ErrorCode::NotRankOne);

  auto s3 = discrete_space(3);
  auto skew = StateUtilityFamily::from_values(s3, {{{0, 1, 0}, {0, 0, 1}}});
  EXPECT_EQ(code_of([&] { extract_prior(skew); }), ErrorCode::NotRankOne);

  auto mismatch = StateUtilityFamily::from_values(s, {{{0, 1}, {0, 1}}, {{0, 1}, {0, 3}}});
  EXPECT_EQ(code_of([&] { extract_prior(mismatch); }), ErrorCode::PriorMismatch);

  auto zero = StateUtilityFamily::from_values(s, {{{0, 0}, {0, 0}}});
  EXPECT_EQ(code_of([&] { extract_prior(zero); }), ErrorCode::TrivialFamily);
}

TEST(ExtractPrior, RoundTrip) {
  Rng rng(64);
  for (int t = 0; t < 300; ++t) {
    auto s = random_space(rng, uniform_index(rng, 2, 5));
    const std::size_t S = uniform_index(rng, 1, 4);
    auto mu = random_prior(rng, S);
    UtilityFamily base(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
    auto U = StateUtilityFamily::from_prior(mu, base);
    const auto e = extract_prior(U);
    for (std::size_t w = 0; w < S; ++w) EXPECT_NEAR(e.prior[w], mu[w], 1e-12);
    for (int k = 0; k < 5; ++k) {
      auto f = random_act(rng, s, S), g = random_act(rng, s, S);
      // Single-prior formula: compare the mu-mixtures under the base family.
      EXPECT_EQ(compare_acts(U, f, g), compare(e.base, reduce_act(f, mu)[0], reduce_act(g, mu)[0]));
    }
  }
}

TEST(LocalSophistication, Examples) {
  auto s = xy();
  const auto dx = ProbMeasure::dirac(s, 0), dy = ProbMeasure::dirac(s, 1);
  // Each member cares about one state only: member one needs alpha_1 = 1,
  // member two needs alpha_1 = 0.
  auto adversarial = StateUtilityFamily::from_values(s, {{{0, 1}, {0, 0}}, {{0, 0}, {0, 1}}});
  const Act f({dy, dx});
  EXPECT_FALSE(is_locally_prob_sophisticated(adversarial, f).has_value());
  const auto c = is_locally_prob_sophisticated(adversarial, Act::constant(dx, 2));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, (std::vector<double>{0.5, 0.5}));
}

TEST(LocalSophistication, SinglePriorFamiliesReturnThePrior) {
  Rng rng(65);
  for (int t = 0; t < 200; ++t) {
    auto s = random_space(rng, uniform_index(rng, 2, 5));
    const std::size_t S = uniform_index(rng, 2, 4);
    auto mu = random_prior(rng, S);
    UtilityFamily base(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
    auto U = StateUtilityFamily::from_prior(mu, base);
    auto f = random_act(rng, s, S);
    const auto alpha = is_locally_prob_sophisticated(U, f);
    ASSERT_TRUE(alpha.has_value());
    if (!f.is_constant()) {
      for (std::size_t w = 0; w < S; ++w) EXPECT_NEAR((*alpha)[w], mu[w], 1e-12);
    }
    // Without the candidate the LP still finds some reducing prior.
    const auto lp_alpha = is_locally_prob_sophisticated(U, f, std::vector<std::vector<double>>{});
    ASSERT_TRUE(lp_alpha.has_value());
    EXPECT_EQ(compare_acts(U, f, reduce_act(f, *lp_alpha)), ComparisonResult::Indifferent);
  }
}

TEST(ActWitness, RecoversSinglePriorFamily) {
  Rng rng(66);
  for (int t = 0; t < 20; ++t) {
    auto s = random_space(rng, uniform_index(rng, 2, 4));
    const std::size_t S = 2;
    auto mu = random_prior(rng, S);
    UtilityFamily base(s, random_functions(rng, s, 1));
    auto U = StateUtilityFamily::from_prior(mu, base);
    std::vector<std::pair<Act, Act>> panel;
    for (int k = 0; k < 6; ++k) panel.emplace_back(random_act(rng, s, S), random_act(rng, s, S));
    ActCone C(s, S);
    for (const auto& [f, g] : panel) {
      const auto r = compare_acts(U, f, g);
      if (r == ComparisonResult::StrictBetter || r == ComparisonResult::Indifferent) C.add_pair(f, g);
      if (r == ComparisonResult::StrictWorse || r == ComparisonResult::Indifferent) C.add_pair(g, f);
    }
    const auto V = represent_acts(C, panel);
    for (const auto& [f, g] : panel) EXPECT_EQ(compare_acts(V, f, g), compare_acts(U, f, g));
  }
}

TEST(ActWitness, EmptyConeSeparatesDistinctActs) {
  auto s = xy();
  const auto dx = ProbMeasure::dirac(s, 0), dy = ProbMeasure::dirac(s, 1);
  ActCone C(s, 2);
  const auto r = act_separating_witness(C, Act({dy, dx}), Act({dx, dx}));
  ASSERT_TRUE(r.witness.has_value());
  // The best unit-Lipschitz tuple gains the full distance in state one.
  EXPECT_NEAR(r.optimum, 1.0, 1e-12);
  EXPECT_FALSE(act_separating_witness(C, Act({dx, dx}), Act({dx, dx})).witness.has_value());
}
