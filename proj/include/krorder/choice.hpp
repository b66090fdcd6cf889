#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/preorder.hpp"
#include "krorder/separation.hpp"

namespace krorder {

/// Indices of the maximal lotteries: no other member of P is strictly better.
inline std::vector<std::size_t> max_set(const std::vector<ProbMeasure>& P,
                                        const UtilityFamily& family) {
  if (P.empty()) throw Error(ErrorCode::EmptyChoiceSet, "choice set is empty");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < P.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < P.size() && !dominated; ++j) {
      if (j != i && compare(family, P[j], P[i]) == ComparisonResult::StrictBetter) {
        dominated = true;
      }
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

/// A choice set with two representations of one preorder: a compact family U
/// and a family V that is strictly increasing on the strict pairs of P.
class ChoiceProblem {
 public:
  ChoiceProblem(std::vector<ProbMeasure> P, UtilityFamily U, UtilityFamily V)
      : P_(std::move(P)), U_(std::move(U)), V_(std::move(V)) {
    if (P_.empty()) throw Error(ErrorCode::EmptyChoiceSet, "choice set is empty");
    require_same_space(U_.space(), V_.space());
    for (const auto& p : P_) require_same_space(U_.space(), p.space());
    for (std::size_t i = 0; i < P_.size(); ++i) {
      for (std::size_t j = 0; j < P_.size(); ++j) {
        if (compare(U_, P_[i], P_[j]) != ComparisonResult::StrictBetter) continue;
        for (const auto& v : V_.members()) {
          if (!(expectation_gap(v, P_[i], P_[j]) > 0.0)) {
            throw Error(ErrorCode::PreconditionViolated,
                        "proper family is not strictly increasing on pair " +
                            detail::index_pair(i, j));
          }
        }
      }
    }
  }

  // V built from U by the proper-family construction, checked on P x P.
  static ChoiceProblem with_proper_family(std::vector<ProbMeasure> P, const UtilityFamily& U) {
    std::vector<MeasurePair> panel;
    for (const auto& p : P) {
      for (const auto& q : P) panel.emplace_back(p, q);
    }
    auto proper = make_proper_family(U, panel);
    return {std::move(P), U, std::move(proper.family)};
  }

  const std::vector<ProbMeasure>& P() const { return P_; }
  const UtilityFamily& U() const { return U_; }
  const UtilityFamily& V() const { return V_; }

 private:
  std::vector<ProbMeasure> P_;
  UtilityFamily U_;
  UtilityFamily V_;
};

namespace detail {

// Union over members of the maximizers of E_u on P, ties within tolerance.
inline std::vector<std::size_t> argmax_union(const std::vector<ProbMeasure>& P,
                                             const UtilityFamily& family) {
  std::vector<bool> hit(P.size(), false);
  for (const auto& u : family.members()) {
    std::vector<double> vals(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) vals[i] = expectation(u, P[i]);
    const double best = *std::max_element(vals.begin(), vals.end());
    const double eps = comparison_tolerance(u);
    for (std::size_t i = 0; i < P.size(); ++i) {
      if (vals[i] >= best - eps) hit[i] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (hit[i]) out.push_back(i);
  }
  return out;
}

// Does P[i] maximize some convex combination of the members? LP feasibility
// in the mixing weights.
inline bool maximizes_some_mixture(const std::vector<ProbMeasure>& P, const UtilityFamily& family,
                                   std::size_t i) {
  const std::size_t k = family.size();
  LinearProgram lp;
  for (std::size_t m = 0; m < k; ++m) lp.add_variable(0.0);
  lp.add_row(std::vector<double>(k, 1.0), Relation::Equal, 1.0);
  double eps = 0.0;
  for (const auto& u : family.members()) eps = std::max(eps, comparison_tolerance(u));
  for (std::size_t j = 0; j < P.size(); ++j) {
    if (j == i) continue;
    std::vector<double> row(k);
    for (std::size_t m = 0; m < k; ++m) row[m] = expectation_gap(family.members()[m], P[i], P[j]);
    lp.add_row(std::move(row), Relation::GreaterEqual, -eps);
  }
  return solve_lp(lp).status == LPStatus::Optimal;
}

}  // namespace detail

struct ScalarizationBounds {
  std::vector<std::size_t> lower;  // union of argmaxes over V
  std::vector<std::size_t> upper;  // union of argmaxes over U
  // Union of argmaxes over the convex hull of U.
  std::vector<std::size_t> upper_convex;
};

inline ScalarizationBounds scalarization_bounds(const ChoiceProblem& problem) {
  ScalarizationBounds out;
  out.lower = detail::argmax_union(problem.P(), problem.V());
  out.upper = detail::argmax_union(problem.P(), problem.U());
  if (problem.U().empty()) {
    for (std::size_t i = 0; i < problem.P().size(); ++i) out.upper_convex.push_back(i);
  } else {
    for (std::size_t i = 0; i < problem.P().size(); ++i) {
      if (detail::maximizes_some_mixture(problem.P(), problem.U(), i)) {
        out.upper_convex.push_back(i);
      }
    }
  }
  if (problem.V().empty()) {
    for (std::size_t i = 0; i < problem.P().size(); ++i) out.lower.push_back(i);
  }
  return out;
}

inline bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](std::size_t x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

enum class FunctionalForm { Linear, MinOfLinear, MaxOfLinear };

inline const char* to_string(FunctionalForm f) {
  switch (f) {
    case FunctionalForm::Linear: return "linear";
    case FunctionalForm::MinOfLinear: return "min";
    case FunctionalForm::MaxOfLinear: return "max";
  }
  return "?";
}

// phi(p) = E_u[p] for one utility, or the min / max of E_u[p] over several.
struct Functional {
  FunctionalForm form = FunctionalForm::Linear;
  std::vector<LipschitzFunction> utilities;

  double operator()(const ProbMeasure& p) const {
    double v = form == FunctionalForm::MaxOfLinear ? -std::numeric_limits<double>::infinity()
                                                   : std::numeric_limits<double>::infinity();
    for (const auto& u : utilities) {
      const double e = expectation(u, p);
      v = form == FunctionalForm::MaxOfLinear ? std::max(v, e) : std::min(v, e);
    }
    return v;
  }

  double lip() const {
    double l = 0.0;
    for (const auto& u : utilities) l = std::max(l, u.lip());
    return l;
  }
};

/// A preorder given by a list of functionals: p >= q iff phi(p) >= phi(q)
/// for every phi. Non-linear forms make it non-affine in general.
class FunctionalOracle {
 public:
  FunctionalOracle(MetricSpace space, std::vector<Functional> functionals,
                   std::optional<double> lipschitz_bound = std::nullopt)
      : space_(std::move(space)), functionals_(std::move(functionals)), bound_(lipschitz_bound) {
    for (const auto& f : functionals_) {
      if (f.utilities.empty()) throw Error(ErrorCode::EmptyFamily, "functional without utilities");
      if (f.form == FunctionalForm::Linear && f.utilities.size() != 1) {
        throw Error(ErrorCode::MalformedInput, "linear functional takes exactly one utility");
      }
      for (const auto& u : f.utilities) require_same_space(space_, u.space());
    }
  }

  bool weakly_prefers(const ProbMeasure& p, const ProbMeasure& q) const {
    for (const auto& f : functionals_) {
      const double eps = tolerances().compare * (1.0 + f.lip() * space_.diameter());
      if (f(p) < f(q) - eps) return false;
    }
    return true;
  }

  // Largest sampled quotient |phi(dx) - phi(dy)| / d(x, y) over Dirac pairs.
  double sampled_lipschitz() const {
    double worst = 0.0;
    const std::size_t n = space_.size();
    for (const auto& f : functionals_) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
          const double d = std::abs(f(ProbMeasure::dirac(space_, x)) - f(ProbMeasure::dirac(space_, y)));
          worst = std::max(worst, d / space_.dist(x, y));
        }
      }
    }
    return worst;
  }

  const MetricSpace& space() const { return space_; }
  const std::vector<Functional>& functionals() const { return functionals_; }
  const std::optional<double>& lipschitz_bound() const { return bound_; }

 private:
  MetricSpace space_;
  std::vector<Functional> functionals_;
  std::optional<double> bound_;
};

inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 8; ++k) g.push_back(k / 8.0);
  return g;
}

// All Diracs followed by the extra measures.
inline std::vector<ProbMeasure> default_probes(const MetricSpace& space,
                                               const std::vector<ProbMeasure>& extra) {
  std::vector<ProbMeasure> probes;
  for (std::size_t i = 0; i < space.size(); ++i) probes.push_back(ProbMeasure::dirac(space, i));
  probes.insert(probes.end(), extra.begin(), extra.end());
  return probes;
}

struct AffineCoreResult {
  bool holds = true;
  // Always true: finitely many probes only give a necessary condition.
  bool approximate = true;
  std::optional<std::size_t> failing_probe;
  double failing_lambda = 0.0;
};

/// Tests p (+)_l r >= q (+)_l r for every probe r and grid weight l. Passing
/// is necessary for p to be above q in the affine core, not sufficient.
inline AffineCoreResult affine_core_approx(const FunctionalOracle& oracle, const ProbMeasure& p,
                                           const ProbMeasure& q,
                                           const std::vector<ProbMeasure>& probes,
                                           const std::vector<double>& lambdas) {
  AffineCoreResult out;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    for (double lambda : lambdas) {
      if (!oracle.weakly_prefers(mix(p, probes[k], lambda), mix(q, probes[k], lambda))) {
        out.holds = false;
        out.failing_probe = k;
        out.failing_lambda = lambda;
        return out;
      }
    }
  }
  return out;
}

struct AffineCoreRepresentation {
  Representation representation;
  PreferenceCone cone;
  // core[i][side]: panel pair i passes the test as p >= q (side 0) or q >= p.
  std::vector<std::array<bool, 2>> core;
};

/// Approximate affine core on the panel, turned into a cone and represented
/// by separating witnesses.
inline AffineCoreRepresentation affine_core_represent(const FunctionalOracle& oracle,
                                                      const std::vector<MeasurePair>& panel,
                                                      const std::vector<ProbMeasure>& probes,
                                                      const std::vector<double>& lambdas) {
  if (oracle.lipschitz_bound()) {
    const double sampled = oracle.sampled_lipschitz();
    if (sampled > *oracle.lipschitz_bound() * (1.0 + tolerances().lipschitz)) {
      throw Error(ErrorCode::OracleNotLipschitz,
                  "sampled quotient " + std::to_string(sampled) + " exceeds declared bound " +
                      std::to_string(*oracle.lipschitz_bound()));
    }
  }
  AffineCoreRepresentation out;
  out.cone = PreferenceCone(oracle.space());
  for (const auto& [p, q] : panel) {
    const bool pq = affine_core_approx(oracle, p, q, probes, lambdas).holds;
    const bool qp = affine_core_approx(oracle, q, p, probes, lambdas).holds;
    out.core.push_back({pq, qp});
    if (pq) out.cone.add_pair(p, q);
    if (qp) out.cone.add_pair(q, p);
  }
  out.representation = represent(out.cone, panel);
  return out;
}

}  // namespace krorder
