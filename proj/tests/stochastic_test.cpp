#include <gtest/gtest.h>

#include <vector>

#include "krorder/stochastic.hpp"

using namespace krorder;

namespace {

// Brute-force check over every subset: keep the downward closed ones.
bool dominates_by_subsets(const ProbMeasure& p, const ProbMeasure& q, const FinitePoset& poset) {
  const std::size_t n = poset.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> S;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) S.push_back(i);
    if (!is_lower_set(S, poset)) continue;
    double ps = 0, qs = 0;
    for (std::size_t i : S) {
      ps += p[i];
      qs += q[i];
    }
    if (ps > qs + 1e-12) return false;
  }
  return true;
}

MetricSpace random_metric_for(Rng& rng, std::size_t n) {
  return coin(rng) ? discrete_space(n, uniform(rng, 0.5, 2)) : random_space(rng, n);
}

}  // namespace

TEST(Univariate, Examples) {
  auto s = line_space({1, 2, 3});
  ProbMeasure p(s, {0.2, 0.3, 0.5}), q(s, {0.5, 0.3, 0.2});
  EXPECT_TRUE(fosd_univariate(p, p));
  EXPECT_TRUE(fosd_univariate(ProbMeasure::dirac(s, 2), ProbMeasure::dirac(s, 0)));
  EXPECT_FALSE(fosd_univariate(ProbMeasure::dirac(s, 0), ProbMeasure::dirac(s, 2)));
  // CDFs (0.2, 0.5, 1.0) <= (0.5, 0.8, 1.0).
  EXPECT_TRUE(fosd_univariate(p, q));
  EXPECT_FALSE(fosd_univariate(q, p));
}

TEST(Univariate, NonNumericLabels) {
  auto s = validate_metric({"x", "y"}, Matrix::from_rows({{0, 1}, {1, 0}}), 0);
  EXPECT_THROW(fosd_univariate(ProbMeasure::uniform(s), ProbMeasure::uniform(s)), Error);
}

TEST(Univariate, MutualDominanceMeansEquality) {
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> x(2 + t % 6);
    for (double& v : x) v = uniform(rng, -2, 2);
    auto s = line_space(x);
    auto [p, q] = random_dominating_pair(rng, chain_by_labels(s));
    ASSERT_TRUE(fosd_univariate(p, q));
    if (fosd_univariate(q, p)) {
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-11);
    }
  }
}

TEST(LowerSets, AntichainEverySubset) {
  auto s = discrete_space(5);
  auto poset = FinitePoset::antichain(s);
  EXPECT_EQ(enumerate_lower_sets(poset).size(), 32u);
  Rng rng(2);
  auto p = random_prob(rng, s), q = random_prob(rng, s);
  EXPECT_TRUE(stochastic_order_poset(p, p, poset));
  EXPECT_FALSE(stochastic_order_poset(p, q, poset));
  const auto r = dominance_check(p, q, poset);
  ASSERT_TRUE(r.violating_set);
  EXPECT_GT(p.mass_of(*r.violating_set), q.mass_of(*r.violating_set));
}

TEST(LowerSets, ChainReducesToUnivariate) {
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(1 + t % 8);
    for (double& v : x) v = uniform(rng, -3, 3);
    auto s = line_space(x);
    auto chain = chain_by_labels(s);
    EXPECT_EQ(enumerate_lower_sets(chain).size(), s.size() + 1);
    auto [p, q] = coin(rng) ? random_dominating_pair(rng, chain)
                            : std::pair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
    EXPECT_EQ(stochastic_order_poset(p, q, chain), fosd_univariate(p, q));
    EXPECT_EQ(stochastic_order_poset(q, p, chain), fosd_univariate(q, p));
  }
}

TEST(LowerSets, TopDominatesBottom) {
  auto s = discrete_space(4);
  // 0 below everything, 3 above everything, 1 and 2 incomparable.
  FinitePoset diamond(s, {{true, true, true, true},
                          {false, true, false, true},
                          {false, false, true, true},
                          {false, false, false, true}});
  EXPECT_EQ(enumerate_lower_sets(diamond).size(), 6u);
  EXPECT_TRUE(stochastic_order_poset(ProbMeasure::dirac(s, 3), ProbMeasure::dirac(s, 0), diamond));
  EXPECT_FALSE(stochastic_order_poset(ProbMeasure::dirac(s, 0), ProbMeasure::dirac(s, 3), diamond));
  EXPECT_FALSE(stochastic_order_poset(ProbMeasure::dirac(s, 1), ProbMeasure::dirac(s, 2), diamond));
}

TEST(LowerSets, MatchesSubsetBruteForce) {
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 7;
    FinitePoset poset(discrete_space(n), random_order_relation(rng, n, 0.4));
    std::size_t brute = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (is_lower_set(mask_to_points(mask, n), poset)) ++brute;
    }
    EXPECT_EQ(enumerate_lower_sets(poset).size(), brute);
    auto [p, q] = coin(rng) ? random_dominating_pair(rng, poset)
                            : std::pair{random_prob_mixed(rng, poset.space()),
                                        random_prob_mixed(rng, poset.space())};
    EXPECT_EQ(stochastic_order_poset(p, q, poset), dominates_by_subsets(p, q, poset));
  }
}

TEST(LowerSets, TooManyPoints) {
  auto s = discrete_space(21);
  EXPECT_THROW(enumerate_lower_sets(FinitePoset::antichain(s)), Error);
}

TEST(Witnesses, Examples) {
  auto s = line_space({0, 1});
  auto chain = chain_by_labels(s);
  // S = X gives the zero function, dropped as a constant.
  const auto all = distance_to_set(s, {0, 1});
  EXPECT_EQ(all, (std::vector<double>{0, 0}));
  const auto fam = witness_family_lower_sets(chain, {100});
  EXPECT_TRUE(fam.valid);
  EXPECT_EQ(fam.lower_sets, 3u);
  ASSERT_EQ(fam.family.size(), 1u);
  EXPECT_EQ(fam.family.members()[0].values(), (std::vector<double>{0, 1}));
}

TEST(Witnesses, InvalidMetricIsFlagged) {
  // 0 <= 1 <= 2 as a chain, but 2 sits right next to 0 in the metric, so
  // d(., {0}) is not increasing.
  auto s = validate_metric({}, Matrix::from_rows({{0, 2, 1}, {2, 0, 2}, {1, 2, 0}}), 0);
  const auto fam = witness_family_lower_sets(FinitePoset::chain(s), {10});
  EXPECT_FALSE(fam.valid);
}

TEST(Witnesses, AgreeWithEnumerationOnValidPosets) {
  Rng rng(5);
  std::size_t instances = 0, pairs = 0;
  while (instances < 60) {
    const std::size_t n = 2 + instances % 4 + 1;
    auto s = random_metric_for(rng, n);
    FinitePoset poset(s, random_order_relation(rng, n, 0.45));
    const auto fam = witness_family_lower_sets(poset, {sufficient_scale(s)});
    if (!fam.valid) continue;
    ++instances;
    for (int k = 0; k < 20; ++k) {
      auto [p, q] = k % 2 ? random_dominating_pair(rng, poset)
                          : std::pair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
      EXPECT_EQ(weakly_prefers(fam.family, p, q), stochastic_order_poset(p, q, poset));
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 1200u);
}

TEST(Witnesses, UnivariateFamilyMatchesCdfTest) {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> x(2 + t % 6);
    for (double& v : x) v = uniform(rng, 0, 5);
    auto s = line_space(x);
    const auto U = univariate_witness_family(s, sufficient_scale(s));
    auto [p, q] = coin(rng) ? random_dominating_pair(rng, chain_by_labels(s))
                            : std::pair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
    EXPECT_EQ(weakly_prefers(U, p, q), fosd_univariate(p, q));
  }
}

TEST(Dominance, PartialOrderAndAffinity) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 5;
    FinitePoset poset(discrete_space(n), random_order_relation(rng, n, 0.5));
    auto [p, q] = random_dominating_pair(rng, poset);
    EXPECT_TRUE(stochastic_order_poset(p, p, poset));
    ASSERT_TRUE(stochastic_order_poset(p, q, poset));
    // Chain a second upward move for transitivity.
    std::vector<double> w = p.weights();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (x != y && poset.leq(x, y) && w[x] > 0) {
          const double m = 0.5 * w[x];
          w[x] -= m;
          w[y] += m;
        }
    ProbMeasure pp(poset.space(), w);
    EXPECT_TRUE(stochastic_order_poset(pp, p, poset));
    EXPECT_TRUE(stochastic_order_poset(pp, q, poset));
    if (stochastic_order_poset(q, p, poset)) {
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], q[i], 1e-11);
    }
    auto r = random_prob_mixed(rng, poset.space());
    for (double lambda : {0.0, 0.3, 0.7, 0.95}) {
      EXPECT_TRUE(stochastic_order_poset(mix(p, r, lambda), mix(q, r, lambda), poset));
    }
  }
}
