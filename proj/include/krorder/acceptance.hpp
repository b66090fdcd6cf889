#pragma once

// Property and oracle checks behind `krorder selftest` and the acceptance
// binary. Each check is seeded, so its metrics are reproducible; wall time
// is reported separately and only feeds the runtime limits.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "krorder/choice.hpp"
#include "krorder/portfolio.hpp"
#include "krorder/preorder.hpp"
#include "krorder/random.hpp"
#include "krorder/separation.hpp"
#include "krorder/stochastic.hpp"
#include "krorder/transport.hpp"
#include "krorder/uncertainty.hpp"

namespace krorder::acceptance {

struct Metric {
  std::string name;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<Metric> metrics;
  double seconds = 0.0;  // not part of the reproducible output
};

namespace detail {

inline Rng rng_for(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return Rng(seq);
}

inline PreferenceCone random_cone(Rng& rng, const MetricSpace& s, std::size_t k) {
  PreferenceCone c(s);
  for (std::size_t i = 0; i < k; ++i) c.add_pair(random_prob_mixed(rng, s), random_prob_mixed(rng, s));
  return c;
}

// (p, q) with q - p a random nonnegative combination of the generators.
inline MeasurePair in_cone_query(Rng& rng, const PreferenceCone& C) {
  std::vector<double> w(C.space().size(), 0.0);
  for (const auto& g : C.generators()) {
    const double c = uniform(rng, 0, 2);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * g[i];
  }
  w.back() -= compensated_sum(w);
  auto split = jordan_split(SignedMeasure(C.space(), w));
  if (!split) return {ProbMeasure::uniform(C.space()), ProbMeasure::uniform(C.space())};
  return {split->negative, split->positive};
}

inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> a(n);
  double t = 0.0;
  for (double& x : a) t += x = uniform(rng, 0.05, 1.0);
  for (double& x : a) x /= t;
  return a;
}

inline Scenario random_scenario(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<std::vector<double>> r(m, std::vector<double>(n));
  for (auto& row : r) {
    for (double& x : row) x = uniform(rng, -1.0, 1.5);
  }
  return {r, random_simplex(rng, m)};
}

inline PiecewiseLinearUtility random_utility(Rng& rng, bool concave) {
  const std::size_t k = uniform_index(rng, 1, 3);
  std::vector<double> b(k), s(k + 1);
  for (double& x : b) x = uniform(rng, -1.0, 1.0);
  std::sort(b.begin(), b.end());
  for (double& x : s) x = uniform(rng, -0.5, 2.0);
  if (concave) std::sort(s.begin(), s.end(), std::greater<>());
  return {b, s, uniform(rng, -1.0, 1.0)};
}

// Exact one-asset optimum: F is piecewise linear in a, so the maximum sits
// at an end of the feasible interval or where some a * r_k hits a kink.
inline double one_asset_optimum(const Scenario& sc, const PiecewiseLinearUtility& u, double price,
                                double wealth, double lo, double hi) {
  const double top = price > 0.0 ? std::min(hi, wealth / price) : hi;
  std::vector<double> cands = {lo, top};
  for (const auto& r : sc.returns) {
    if (r[0] == 0.0) continue;
    for (double b : u.breakpoints()) cands.push_back(b / r[0]);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double a : cands) {
    if (a >= lo && a <= top) best = std::max(best, eval_F({a}, sc, u));
  }
  return best;
}

// A random base-normalized function far from every multiple of u.
inline LipschitzFunction independent_of(Rng& rng, const LipschitzFunction& u) {
  const auto& space = u.space();
  double uu = 0.0;
  for (double x : u.values()) uu += x * x;
  for (;;) {
    auto f = random_function(rng, space).base_normalized();
    double fu = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      fu += f[i] * u[i];
      ff += f[i] * f[i];
    }
    // Squared sine of the angle between f and u.
    if (ff > 0.0 && (uu == 0.0 || 1.0 - fu * fu / (ff * uu) > 1e-2)) return f;
  }
}

template <class F>
CriterionResult timed(int id, std::string name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace detail

/// Primal transport cost against the dual potential value.
inline CriterionResult kr_duality(std::uint64_t seed, std::size_t instances = 1000) {
  auto r = detail::timed(1, "KR duality: primal and dual W1 agree", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 1);
    double worst = 0.0;
    std::size_t bad = 0;
    for (std::size_t t = 0; t < instances; ++t) {
      auto s = random_space(rng, uniform_index(rng, 1, 15));
      auto p = random_prob_mixed(rng, s), q = random_prob_mixed(rng, s);
      const double primal = w1_primal(p, q).cost;
      const double dual = w1_dual(p, q).value;
      const double rel = std::abs(primal - dual) / (1.0 + primal);
      worst = std::max(worst, rel);
      if (rel > 1e-8) ++bad;
    }
    out.metrics = {{"instances", double(instances)}, {"violations", double(bad)}, {"worst_relative_gap", worst}};
    out.pass = bad == 0;
  });
  r.pass = r.pass && r.seconds < 30.0;
  return r;
}

inline CriterionResult norm_identity(std::uint64_t seed, std::size_t instances = 1000) {
  return detail::timed(2, "KR norm of alpha (p - q) equals alpha W1", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 2);
    double worst = 0.0;
    std::size_t bad = 0;
    for (std::size_t t = 0; t < instances; ++t) {
      auto s = random_space(rng, uniform_index(rng, 1, 12));
      auto p = random_prob_mixed(rng, s), q = random_prob_mixed(rng, s);
      const double alpha = uniform(rng, 0.0, 5.0);
      const double lhs = kr_norm(kr_element(p, q, alpha));
      const double rhs = alpha * w1(p, q);
      const double err = std::abs(lhs - rhs) / (1.0 + rhs);
      worst = std::max(worst, err);
      if (err > 1e-8) ++bad;
    }
    out.metrics = {{"instances", double(instances)}, {"violations", double(bad)}, {"worst_relative_error", worst}};
    out.pass = bad == 0;
  });
}

/// Mixtures below the Lipschitz bound never repair a failed comparison.
inline CriterionResult lipschitz_margin_axiom(std::uint64_t seed, std::size_t draws = 100000) {
  auto r = detail::timed(3, "Lipschitz axiom holds below the margin bound", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 3);
    std::size_t checked = 0, violations = 0, inconclusive = 0, families = 0;
    LipschitzAxiomOptions opts;
    opts.trials = 200;
    while (checked < draws) {
      auto s = random_space(rng, uniform_index(rng, 2, 6));
      UtilityFamily U(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
      if (U.empty()) continue;
      auto p = random_prob_mixed(rng, s), q = random_prob_mixed(rng, s);
      if (weakly_prefers(U, q, p)) std::swap(p, q);
      if (weakly_prefers(U, q, p)) continue;
      const auto rep = certify_lipschitz_axiom(U, p, q, opts, rng);
      checked += rep.checked;
      violations += rep.violations;
      inconclusive += rep.inconclusive;
      ++families;
    }
    out.metrics = {{"draws", double(checked)},
                   {"families", double(families)},
                   {"violations", double(violations)},
                   {"inconclusive", double(inconclusive)}};
    out.pass = violations == 0;
  });
  r.pass = r.pass && r.seconds < 120.0;
  return r;
}

/// Membership of q - p in the cone and a witness separating p above q are
/// mutually exclusive, and one holds outside the reporting band.
inline CriterionResult farkas_dichotomy(std::uint64_t seed, std::size_t queries = 10000) {
  return detail::timed(4, "Farkas dichotomy between membership and witness", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 4);
    std::size_t both = 0, neither = 0, in_band = 0;
    const double band = tolerances().band;
    for (std::size_t t = 0; t < queries; ++t) {
      auto s = random_space(rng, uniform_index(rng, 2, 8));
      auto C = detail::random_cone(rng, s, uniform_index(rng, 1, 4));
      auto [p, q] = t % 2 == 0 ? detail::in_cone_query(rng, C)
                               : MeasurePair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
      const bool member = cone_membership(C, kr_element(q, p)).member;
      const auto w = separating_witness(C, p, q);
      const bool separated = w.witness.has_value();
      if (member && separated) ++both;
      if (w.optimum > tolerances().boundary && w.optimum <= band) {
        ++in_band;
        continue;
      }
      if (!member && !separated) ++neither;
    }
    out.metrics = {{"queries", double(queries)},
                   {"both_affirm", double(both)},
                   {"neither_outside_band", double(neither)},
                   {"in_band", double(in_band)}};
    out.pass = both == 0 && neither == 0;
  });
}

inline CriterionResult representation_round_trip(std::uint64_t seed, std::size_t cones = 500) {
  return detail::timed(5, "Witness representation reproduces cone membership", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 5);
    std::size_t pairs = 0, mismatches = 0;
    for (std::size_t t = 0; t < cones; ++t) {
      auto s = random_space(rng, uniform_index(rng, 2, 7));
      auto C = detail::random_cone(rng, s, uniform_index(rng, 1, 4));
      std::vector<MeasurePair> panel;
      for (int k = 0; k < 12; ++k) {
        panel.push_back(k % 3 == 0 ? detail::in_cone_query(rng, C)
                                   : MeasurePair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)});
      }
      const auto rep = represent(C, panel);
      for (const auto& [p, q] : panel) {
        pairs += 2;
        if (weakly_prefers(rep.family, p, q) != cone_membership(C, kr_element(p, q)).member) ++mismatches;
        if (weakly_prefers(rep.family, q, p) != cone_membership(C, kr_element(q, p)).member) ++mismatches;
      }
    }
    out.metrics = {{"cones", double(cones)}, {"classified_pairs", double(pairs)}, {"mismatches", double(mismatches)}};
    out.pass = mismatches == 0;
  });
}

/// Lower-set enumeration against the witness family on valid posets, and
/// chains against the univariate CDF test.
inline CriterionResult stochastic_equivalence(std::uint64_t seed, std::size_t pairs = 1000) {
  return detail::timed(6, "Stochastic order equals the lower-set witness order", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 6);
    std::size_t checked = 0, mismatches = 0, posets = 0, skipped = 0;
    while (checked < pairs) {
      const std::size_t n = uniform_index(rng, 2, 8);
      auto s = coin(rng) ? discrete_space(n, uniform(rng, 0.5, 2.0)) : random_space(rng, n);
      FinitePoset poset(s, random_order_relation(rng, n, uniform(rng, 0.2, 0.6)));
      const auto fam = witness_family_lower_sets(poset, {sufficient_scale(s)});
      if (!fam.valid) {
        ++skipped;
        continue;
      }
      ++posets;
      for (int k = 0; k < 10; ++k) {
        auto [p, q] = k % 2 ? random_dominating_pair(rng, poset)
                            : std::pair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
        ++checked;
        if (weakly_prefers(fam.family, p, q) != stochastic_order_poset(p, q, poset)) ++mismatches;
      }
    }
    std::size_t chain_checked = 0, chain_mismatches = 0;
    for (std::size_t t = 0; t < pairs; ++t) {
      std::vector<double> x(uniform_index(rng, 1, 8));
      for (double& v : x) v = uniform(rng, -3, 3);
      auto s = line_space(x);
      auto chain = chain_by_labels(s);
      auto [p, q] = coin(rng) ? random_dominating_pair(rng, chain)
                              : std::pair{random_prob_mixed(rng, s), random_prob_mixed(rng, s)};
      chain_checked += 2;
      if (stochastic_order_poset(p, q, chain) != fosd_univariate(p, q)) ++chain_mismatches;
      if (stochastic_order_poset(q, p, chain) != fosd_univariate(q, p)) ++chain_mismatches;
    }
    out.metrics = {{"measure_pairs", double(checked)},
                   {"valid_posets", double(posets)},
                   {"skipped_invalid_posets", double(skipped)},
                   {"mismatches", double(mismatches)},
                   {"chain_pairs", double(chain_checked)},
                   {"chain_mismatches", double(chain_mismatches)}};
    out.pass = mismatches == 0 && chain_mismatches == 0;
  });
}

/// lower <= MAX <= upper on random choice problems. The upper side is
/// checked against the most generous reading, argmaxes over the convex hull
/// of U; the finite-U count is reported alongside.
inline CriterionResult sandwich(std::uint64_t seed, std::size_t problems = 1000) {
  return detail::timed(7, "Scalarization sandwich around the maximal set", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 7);
    std::size_t lower_bad = 0, upper_bad = 0, upper_finite_bad = 0;
    for (std::size_t t = 0; t < problems; ++t) {
      auto s = random_space(rng, uniform_index(rng, 2, 6));
      UtilityFamily U(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
      std::vector<ProbMeasure> P;
      for (std::size_t k = 0, m = uniform_index(rng, 2, 6); k < m; ++k) P.push_back(random_prob_mixed(rng, s));
      const auto problem = ChoiceProblem::with_proper_family(P, U);
      const auto M = max_set(problem.P(), problem.U());
      const auto b = scalarization_bounds(problem);
      if (!is_subset(b.lower, M)) ++lower_bad;
      if (!is_subset(M, b.upper_convex)) ++upper_bad;
      if (!is_subset(M, b.upper)) ++upper_finite_bad;
    }
    out.metrics = {{"problems", double(problems)},
                   {"lower_violations", double(lower_bad)},
                   {"upper_violations", double(upper_bad)},
                   {"upper_violations_finite_family", double(upper_finite_bad)}};
    out.pass = lower_bad == 0 && upper_bad == 0;
  });
}

/// Prior recovery on rank-one families, and NotRankOne on planted sign and
/// independence violations.
inline CriterionResult prior_round_trip(std::uint64_t seed, std::size_t families = 1000) {
  return detail::timed(8, "Single prior recovered; violations rejected", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 8);
    double worst = 0.0;
    std::size_t planted = 0, rejected = 0, wrong_error = 0;
    auto expect_not_rank_one = [&](const StateUtilityFamily& F) {
      ++planted;
      try {
        extract_prior(F);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NotRankOne) {
          ++rejected;
        } else {
          ++wrong_error;
        }
      }
    };
    for (std::size_t t = 0; t < families; ++t) {
      auto s = random_space(rng, uniform_index(rng, 2, 5));
      const std::size_t S = uniform_index(rng, 2, 4);
      auto mu = detail::random_simplex(rng, S);
      UtilityFamily base(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
      if (base.empty()) continue;
      const auto U = StateUtilityFamily::from_prior(mu, base);
      const auto e = extract_prior(U);
      for (std::size_t w = 0; w < S; ++w) worst = std::max(worst, std::abs(e.prior[w] - mu[w]));

      const std::size_t w = uniform_index(rng, 0, S - 1);
      auto members = U.members();
      // Sign: one state weighs the utility negatively.
      auto flipped = members;
      flipped[0][w] = flipped[0][w].affine(-1.0, 0.0);
      expect_not_rank_one(StateUtilityFamily(s, S, flipped));
      // Independence: one state carries a utility that is not a multiple of
      // the others. Needs three points; on two, Lip0 is one-dimensional.
      if (s.size() >= 3) {
        auto mixed = members;
        mixed[0][w] = detail::independent_of(rng, members[0][w]);
        expect_not_rank_one(StateUtilityFamily(s, S, mixed));
      }
    }
    out.metrics = {{"families", double(families)},
                   {"worst_prior_error", worst},
                   {"planted_violations", double(planted)},
                   {"rejected_not_rank_one", double(rejected)},
                   {"other_errors", double(wrong_error)}};
    out.pass = worst <= 1e-12 && rejected == planted;
  });
}

/// Sampled Lipschitz bound of the expected utility, and the concave optimum
/// against the LP and exact one-asset oracles.
inline CriterionResult portfolio(std::uint64_t seed, std::size_t pairs = 10000, std::size_t instances = 100) {
  return detail::timed(9, "Portfolio Lipschitz bound and concave optimum", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 9);
    std::size_t lip_bad = 0;
    for (std::size_t t = 0; t < pairs; ++t) {
      const std::size_t n = uniform_index(rng, 1, 4);
      auto sc = detail::random_scenario(rng, uniform_index(rng, 1, 8), n);
      auto u = detail::random_utility(rng, coin(rng));
      const double K = lipschitz_bound_F(sc, u);
      std::vector<double> a(n), b(n), d(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = uniform(rng, -3, 3);
        b[i] = uniform(rng, -3, 3);
        d[i] = a[i] - b[i];
      }
      double dist = 0.0;
      for (double x : d) dist += x * x;
      dist = std::sqrt(dist);
      if (std::abs(eval_F(a, sc, u) - eval_F(b, sc, u)) > K * dist * (1 + 1e-12) + 1e-15) ++lip_bad;
    }
    double worst = 0.0;
    std::size_t opt_bad = 0, uncertified = 0;
    for (std::size_t t = 0; t < instances; ++t) {
      const bool one = t % 4 == 0;
      const std::size_t n = one ? 1 : uniform_index(rng, 2, 4);
      auto sc = detail::random_scenario(rng, uniform_index(rng, 2, 8), n);
      auto u = detail::random_utility(rng, true);
      std::vector<double> prices(n);
      for (double& p : prices) p = uniform(rng, 0.2, 2.0);
      const double W = uniform(rng, 0.0, 2.0);
      const Box box{std::vector<double>(n, -2.0), std::vector<double>(n, 3.0)};
      double oracle;
      if (one) {
        oracle = detail::one_asset_optimum(sc, u, prices[0], W, -2.0, 3.0);
      } else {
        const auto lp = portfolio_lp(sc, u, prices, W, box);
        if (lp.status != LPStatus::Optimal) throw Error(ErrorCode::NumericalBreakdown, "portfolio LP oracle failed");
        oracle = lp.objective;
      }
      const auto res = maximize_portfolio(sc, u, prices, W, box);
      const double rel = std::abs(res.value - oracle) / (1.0 + std::abs(oracle));
      worst = std::max(worst, rel);
      if (rel > 1e-4) ++opt_bad;
      if (!res.certified) ++uncertified;
    }
    out.metrics = {{"lipschitz_pairs", double(pairs)},
                   {"lipschitz_violations", double(lip_bad)},
                   {"optimization_instances", double(instances)},
                   {"optimum_mismatches", double(opt_bad)},
                   {"worst_relative_gap", worst},
                   {"uncertified", double(uncertified)}};
    out.pass = lip_bad == 0 && opt_bad == 0;
  });
}

inline CriterionResult affinity(std::uint64_t seed, std::size_t draws = 10000) {
  return detail::timed(10, "Affinity biconditional and mixture lemma", [&](CriterionResult& out) {
    Rng rng = detail::rng_for(seed, 10);
    std::size_t done = 0, checked = 0, bicond = 0, mixture = 0, inconclusive = 0;
    while (done < draws) {
      auto s = random_space(rng, uniform_index(rng, 2, 6));
      UtilityFamily U(s, random_functions(rng, s, uniform_index(rng, 1, 3)));
      const std::size_t trials = std::min<std::size_t>(100, draws - done);
      const auto rep = check_affinity(U, trials, rng);
      done += trials;
      checked += rep.checked;
      bicond += rep.biconditional_violations;
      mixture += rep.mixture_violations;
      inconclusive += rep.inconclusive;
    }
    out.metrics = {{"draws", double(done)},
                   {"checked", double(checked)},
                   {"biconditional_violations", double(bicond)},
                   {"mixture_violations", double(mixture)},
                   {"inconclusive", double(inconclusive)}};
    out.pass = bicond == 0 && mixture == 0;
  });
}

/// Criteria 1-10 in order. Determinism (11) needs the CLI and lives in the
/// acceptance binary.
inline std::vector<CriterionResult> run_all(std::uint64_t seed) {
  return {kr_duality(seed),        norm_identity(seed),        lipschitz_margin_axiom(seed),
          farkas_dichotomy(seed),  representation_round_trip(seed), stochastic_equivalence(seed),
          sandwich(seed),          prior_round_trip(seed),     portfolio(seed),
          affinity(seed)};
}

}  // namespace krorder::acceptance
