#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/measures.hpp"
#include "krorder/random.hpp"
#include "krorder/transport.hpp"

namespace krorder {

enum class ComparisonResult { StrictBetter, Indifferent, Incomparable, StrictWorse };

inline const char* to_string(ComparisonResult r) {
  switch (r) {
    case ComparisonResult::StrictBetter: return "StrictBetter";
    case ComparisonResult::Indifferent: return "Indifferent";
    case ComparisonResult::Incomparable: return "Incomparable";
    case ComparisonResult::StrictWorse: return "StrictWorse";
  }
  return "?";
}

inline ComparisonResult swapped(ComparisonResult r) {
  if (r == ComparisonResult::StrictBetter) return ComparisonResult::StrictWorse;
  if (r == ComparisonResult::StrictWorse) return ComparisonResult::StrictBetter;
  return r;
}

using MeasurePair = std::pair<ProbMeasure, ProbMeasure>;

/// A finite family of Lipschitz utilities on one space, inducing
/// p >= q iff every member has E_u[p] >= E_u[q].
///
/// Members are stored base-normalized. Constant members are dropped; if
/// nothing is left the family induces universal indifference.
class UtilityFamily {
 public:
  UtilityFamily() = default;
  UtilityFamily(MetricSpace space, const std::vector<LipschitzFunction>& members)
      : space_(std::move(space)) {
    if (members.empty()) throw Error(ErrorCode::EmptyFamily, "utility family has no members");
    for (const auto& u : members) {
      require_same_space(space_, u.space());
      if (u.is_constant()) {
        ++dropped_;
        continue;
      }
      members_.push_back(u.base_normalized());
    }
  }

  static UtilityFamily from_values(const MetricSpace& space,
                                   const std::vector<std::vector<double>>& values) {
    std::vector<LipschitzFunction> fs;
    for (const auto& v : values) {
      require_length(space, v.size(), "utility");
      fs.emplace_back(space, v);
    }
    return {space, fs};
  }

  // The family with no nonconstant members: everything is indifferent.
  static UtilityFamily indifference(MetricSpace space) {
    UtilityFamily f;
    f.space_ = std::move(space);
    return f;
  }

  const MetricSpace& space() const { return space_; }
  const std::vector<LipschitzFunction>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t dropped_constants() const { return dropped_; }

 private:
  MetricSpace space_;
  std::vector<LipschitzFunction> members_;
  std::size_t dropped_ = 0;
};

// Comparison slack for one utility: scales with the largest value gap it
// can produce on the space.
inline double comparison_tolerance(const LipschitzFunction& u) {
  return tolerances().compare * (1.0 + u.lip() * u.space().diameter());
}

struct Comparison {
  ComparisonResult result = ComparisonResult::Indifferent;
  std::vector<double> margins;  // E_u[p] - E_u[q] per member
  bool p_over_q = true;
  bool q_over_p = true;
};

inline Comparison compare_detailed(const UtilityFamily& family, const ProbMeasure& p,
                                   const ProbMeasure& q) {
  require_same_space(family.space(), p.space());
  require_same_space(p.space(), q.space());
  Comparison c;
  for (const auto& u : family.members()) {
    const double m = expectation_gap(u, p, q);
    const double eps = comparison_tolerance(u);
    c.margins.push_back(m);
    if (m < -eps) c.p_over_q = false;
    if (m > eps) c.q_over_p = false;
  }
  if (c.p_over_q && c.q_over_p) {
    c.result = ComparisonResult::Indifferent;
  } else if (c.p_over_q) {
    c.result = ComparisonResult::StrictBetter;
  } else if (c.q_over_p) {
    c.result = ComparisonResult::StrictWorse;
  } else {
    c.result = ComparisonResult::Incomparable;
  }
  return c;
}

inline ComparisonResult compare(const UtilityFamily& family, const ProbMeasure& p,
                                const ProbMeasure& q) {
  return compare_detailed(family, p, q).result;
}

// p >= q in the induced preorder.
inline bool weakly_prefers(const UtilityFamily& family, const ProbMeasure& p,
                           const ProbMeasure& q) {
  return compare_detailed(family, p, q).p_over_q;
}

struct Margin {
  double K = 0.0;
  std::size_t member = 0;  // utility attaining the maximum ratio
};

/// Margin of a failed comparison q >= p: the largest normalized gap
/// (E_u[p] - E_u[q]) / L(u) over the family. Positive by construction.
inline Margin lipschitz_margin(const UtilityFamily& family, const ProbMeasure& p,
                               const ProbMeasure& q) {
  if (weakly_prefers(family, q, p)) {
    throw Error(ErrorCode::PreconditionViolated,
                "margin is defined only when q >= p fails, but q >= p holds");
  }
  Margin best;
  best.K = -1.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& u = family.members()[k];
    const double ratio = expectation_gap(u, p, q) / u.lip();
    if (ratio > best.K) best = {ratio, k};
  }
  return best;
}

struct LipschitzAxiomOptions {
  std::size_t trials = 1000;
  // Mixing weights as fractions of the bound K / (K + W1(p', q')).
  std::vector<double> bound_fractions = {0.0, 0.25, 0.5, 0.75, 0.9, 0.99};
  // Extra absolute weights; only those strictly below the bound are used.
  std::vector<double> lambda_grid;
  bool adversarial = true;
};

struct AxiomViolation {
  std::size_t trial = 0;
  double lambda = 0.0;
  double bound = 0.0;
};

struct LipschitzAxiomReport {
  double K = 0.0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  // Draws whose guaranteed margin sits inside the comparison tolerance band.
  std::size_t inconclusive = 0;
  std::vector<AxiomViolation> examples;  // first few violations
};

/// Mixes p with p' and q with q' at weights below K / (K + W1(p', q')) and
/// checks that q-side >= p-side keeps failing.
inline LipschitzAxiomReport certify_lipschitz_axiom(const UtilityFamily& family,
                                                    const ProbMeasure& p, const ProbMeasure& q,
                                                    const LipschitzAxiomOptions& opts, Rng& rng) {
  const Margin margin = lipschitz_margin(family, p, q);
  const auto& space = p.space();
  const auto& witness = family.members()[margin.member];
  const double eps = comparison_tolerance(witness);
  LipschitzAxiomReport report;
  report.K = margin.K;

  std::size_t argmin = 0, argmax = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (witness[i] < witness[argmin]) argmin = i;
    if (witness[i] > witness[argmax]) argmax = i;
  }

  auto check = [&](std::size_t trial, const ProbMeasure& pp, const ProbMeasure& qq) {
    const double dist = w1(pp, qq);
    const double bound = margin.K / (margin.K + dist);
    std::vector<double> lambdas;
    for (double f : opts.bound_fractions) lambdas.push_back(f * bound);
    for (double l : opts.lambda_grid) {
      if (l >= 0.0 && l < bound) lambdas.push_back(l);
    }
    for (double lambda : lambdas) {
      if (!(lambda < bound)) continue;
      // Lower bound on the witness gap after mixing: (1 - l) K - l W1, in
      // the witness's own units.
      const double guaranteed = witness.lip() * (margin.K - lambda * (margin.K + dist));
      ++report.checked;
      const bool holds = weakly_prefers(family, mix(q, qq, lambda), mix(p, pp, lambda));
      if (!holds) continue;
      if (guaranteed <= 2.0 * eps) {
        ++report.inconclusive;
        continue;
      }
      ++report.violations;
      if (report.examples.size() < 8) report.examples.push_back({trial, lambda, bound});
    }
  };

  for (std::size_t t = 0; t < opts.trials; ++t) {
    check(t, random_prob_mixed(rng, space), random_prob_mixed(rng, space));
  }
  if (opts.adversarial) {
    // p' at the witness's minimum, q' at its maximum: the mixture that works
    // hardest against the original failure.
    check(opts.trials, ProbMeasure::dirac(space, argmin), ProbMeasure::dirac(space, argmax));
  }
  return report;
}

struct ProperFamily {
  UtilityFamily family;
  LipschitzFunction v;  // sum of 2^-n u_n over the unit-normalized members
  std::size_t N = 0;
  bool panel_agrees = false;
  bool strictly_increasing_on_panel = false;
};

namespace detail {

inline UtilityFamily build_proper(const std::vector<LipschitzFunction>& unit,
                                  const LipschitzFunction& v, std::size_t N) {
  std::vector<LipschitzFunction> members;
  for (const auto& u : unit) {
    for (std::size_t n = 1; n <= N; ++n) {
      std::vector<double> w(u.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + v[i] / static_cast<double>(n);
      members.emplace_back(u.space(), std::move(w));
    }
  }
  return {unit.front().space(), members};
}

}  // namespace detail

/// Truncated proper multi-utility {u + v/n : u in U, n <= N}. N starts at
/// `initial_N` and doubles until the panel classifications match U, up to
/// `max_N`.
inline ProperFamily make_proper_family(const UtilityFamily& family,
                                       const std::vector<MeasurePair>& panel,
                                       std::size_t initial_N = 16, std::size_t max_N = 1 << 16) {
  if (family.empty()) throw Error(ErrorCode::EmptyFamily, "no nonconstant members");
  std::vector<LipschitzFunction> unit;
  for (const auto& u : family.members()) unit.push_back(u.unit_normalized());
  std::vector<double> v(family.space().size(), 0.0);
  double weight = 0.5;
  for (const auto& u : unit) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += weight * u[i];
    weight *= 0.5;
  }
  ProperFamily out{UtilityFamily(), LipschitzFunction(family.space(), v), 0, false, false};
  for (std::size_t N = std::max<std::size_t>(1, initial_N);; N *= 2) {
    out.family = detail::build_proper(unit, out.v, N);
    out.N = N;
    out.panel_agrees = true;
    for (const auto& [p, q] : panel) {
      if (compare(family, p, q) != compare(out.family, p, q)) {
        out.panel_agrees = false;
        break;
      }
    }
    if (out.panel_agrees || N * 2 > max_N) break;
  }
  out.strictly_increasing_on_panel = true;
  for (const auto& [p, q] : panel) {
    const auto r = compare(family, p, q);
    if (r != ComparisonResult::StrictBetter && r != ComparisonResult::StrictWorse) continue;
    const double sign = r == ComparisonResult::StrictBetter ? 1.0 : -1.0;
    for (const auto& w : out.family.members()) {
      if (!(sign * expectation_gap(w, p, q) > 0.0)) out.strictly_increasing_on_panel = false;
    }
  }
  return out;
}

struct PreorderDisagreement {
  ProbMeasure p;
  ProbMeasure q;
  // True when the first family ranks p >= q and the second does not.
  bool first_prefers = false;
};

struct PreorderEquivalence {
  bool same = true;
  std::optional<PreorderDisagreement> certificate;
};

namespace detail {

// Is u = sum c_k v_k + beta with c >= 0? When not, the Farkas ray of that
// system is a zero-mass mu with E_v[mu] >= 0 for all v and E_u[mu] < 0;
// its positive and negative parts give a pair ranked differently. A ray
// whose disagreement stays inside the comparison band counts as membership.
inline std::optional<MeasurePair> cone_escape(const LipschitzFunction& u, const UtilityFamily& V) {
  const auto& space = u.space();
  const std::size_t n = space.size();
  LinearProgram lp;
  for (std::size_t k = 0; k < V.size(); ++k) lp.add_variable(0.0);
  lp.add_variable(0.0, VarKind::Free);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(V.size() + 1, 1.0);
    for (std::size_t k = 0; k < V.size(); ++k) row[k] = V.members()[k][i];
    lp.add_row(std::move(row), Relation::Equal, u[i]);
  }
  const auto sol = solve_lp(lp);
  if (sol.status == LPStatus::Optimal) return std::nullopt;
  if (sol.status != LPStatus::Infeasible) {
    throw Error(ErrorCode::NumericalBreakdown, "cone expressibility program unbounded");
  }
  std::vector<double> pos(n), neg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = -sol.farkas[i];
    pos[i] = std::max(0.0, m);
    neg[i] = std::max(0.0, -m);
  }
  const double a = compensated_sum(pos), b = compensated_sum(neg);
  if (a == 0.0 || b == 0.0) return std::nullopt;
  for (double& x : pos) x /= a;
  for (double& x : neg) x /= b;
  MeasurePair pair{ProbMeasure(space, std::move(pos)), ProbMeasure(space, std::move(neg))};
  if (expectation_gap(u, pair.first, pair.second) >= -comparison_tolerance(u)) return std::nullopt;
  if (!weakly_prefers(V, pair.first, pair.second)) return std::nullopt;
  return pair;
}

}  // namespace detail

/// Decides whether two families induce the same preorder by checking that
/// each member of one lies in the convex cone spanned by the other plus the
/// constants. On failure returns a pair ranked differently by the two.
inline PreorderEquivalence same_preorder(const UtilityFamily& U, const UtilityFamily& V) {
  require_same_space(U.space(), V.space());
  PreorderEquivalence out;
  for (const auto& u : U.members()) {
    if (auto pair = detail::cone_escape(u, V)) {
      // V ranks p >= q, u does not.
      out.same = false;
      out.certificate = PreorderDisagreement{pair->first, pair->second, false};
      return out;
    }
  }
  for (const auto& v : V.members()) {
    if (auto pair = detail::cone_escape(v, U)) {
      out.same = false;
      out.certificate = PreorderDisagreement{pair->first, pair->second, true};
      return out;
    }
  }
  return out;
}

/// True iff every nonconstant member is a positive affine transformation of
/// every other, i.e. the induced preorder is complete.
inline bool is_total(const UtilityFamily& family) {
  if (family.size() <= 1) return true;
  const auto first = family.members().front().unit_normalized();
  const double tol = tolerances().compare * (1.0 + family.space().diameter());
  for (const auto& u : family.members()) {
    const auto g = u.unit_normalized();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(g[i] - first[i]) > tol) return false;
    }
  }
  return true;
}

struct AffinityReport {
  std::size_t checked = 0;
  std::size_t biconditional_violations = 0;
  std::size_t mixture_violations = 0;
  // Draws with a margin too close to the tolerance band to classify.
  std::size_t inconclusive = 0;
};

namespace detail {

// Draws q, then p with p >= q by rejection; falls back to p = q.
inline MeasurePair draw_ranked_pair(const UtilityFamily& family, Rng& rng) {
  const auto& space = family.space();
  auto q = random_prob_mixed(rng, space);
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto p = random_prob_mixed(rng, space);
    if (weakly_prefers(family, p, q)) return {std::move(p), std::move(q)};
  }
  return {q, q};
}

inline bool margins_clear(const UtilityFamily& family, const ProbMeasure& p,
                          const ProbMeasure& q, double shrink) {
  for (const auto& u : family.members()) {
    const double m = std::abs(expectation_gap(u, p, q));
    const double eps = comparison_tolerance(u);
    if (m != 0.0 && m * shrink <= 10.0 * eps) return false;
  }
  return true;
}

}  // namespace detail

/// Random check of p >= q iff p(+)_l r >= q(+)_l r, and of the mixture
/// property p >= q, p' >= q' => p(+)_l p' >= q(+)_l q'.
inline AffinityReport check_affinity(const UtilityFamily& family, std::size_t trials, Rng& rng,
                                     const std::vector<double>& lambdas = {0.0, 0.1, 0.25, 0.5,
                                                                           0.75, 0.9}) {
  AffinityReport report;
  const auto& space = family.space();
  for (std::size_t t = 0; t < trials; ++t) {
    const double lambda = lambdas[t % lambdas.size()];
    // Biconditional on an arbitrary pair.
    auto p = random_prob_mixed(rng, space), q = random_prob_mixed(rng, space),
         r = random_prob_mixed(rng, space);
    if (!detail::margins_clear(family, p, q, 1.0 - lambda)) {
      ++report.inconclusive;
    } else {
      ++report.checked;
      const bool before = weakly_prefers(family, p, q);
      const bool after = weakly_prefers(family, mix(p, r, lambda), mix(q, r, lambda));
      if (before != after) ++report.biconditional_violations;
    }
    // Mixture property on two ranked pairs.
    auto [a, b] = detail::draw_ranked_pair(family, rng);
    auto [c, d] = detail::draw_ranked_pair(family, rng);
    ++report.checked;
    if (!weakly_prefers(family, mix(a, c, lambda), mix(b, d, lambda))) {
      ++report.mixture_violations;
    }
  }
  return report;
}

}  // namespace krorder
