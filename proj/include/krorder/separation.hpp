#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/measures.hpp"
#include "krorder/preorder.hpp"

namespace krorder {

/// Convex cone in KR(X) spanned by differences p_i - q_i of declared
/// comparisons p_i >= q_i.
class PreferenceCone {
 public:
  PreferenceCone() = default;
  explicit PreferenceCone(MetricSpace space) : space_(std::move(space)) {}
  PreferenceCone(MetricSpace space, std::vector<SignedMeasure> generators)
      : space_(std::move(space)) {
    for (auto& g : generators) add_generator(std::move(g));
  }

  static PreferenceCone from_pairs(const MetricSpace& space, const std::vector<MeasurePair>& pairs) {
    PreferenceCone c(space);
    for (const auto& [p, q] : pairs) c.add_pair(p, q);
    return c;
  }

  void add_generator(SignedMeasure g) {
    require_same_space(space_, g.space());
    if (!g.is_kr_element()) {
      throw Error(ErrorCode::NonzeroTotalMass, "cone generator must have zero total mass");
    }
    generators_.push_back(std::move(g));
  }

  // Declares p >= q.
  void add_pair(const ProbMeasure& p, const ProbMeasure& q) { add_generator(kr_element(p, q)); }

  const MetricSpace& space() const { return space_; }
  const std::vector<SignedMeasure>& generators() const { return generators_; }
  std::size_t size() const { return generators_.size(); }

 private:
  MetricSpace space_;
  std::vector<SignedMeasure> generators_;
};

struct ConeMembership {
  bool member = false;
  std::vector<double> coefficients;  // c_k >= 0 with mu ~ sum c_k g_k
  double residual = 0.0;             // KR norm of mu - sum c_k g_k, minimized
  bool boundary = false;
};

/// Decides mu in C by minimizing the KR norm of mu - sum c_k g_k over c >= 0.
/// The residual is written as a transport flow, so the program is linear;
/// by duality its optimum equals the separating-witness optimum for the same
/// query.
inline ConeMembership cone_membership(const PreferenceCone& C, const SignedMeasure& mu) {
  require_same_space(C.space(), mu.space());
  if (!mu.is_kr_element()) {
    throw Error(ErrorCode::NonzeroTotalMass, "query measure must have zero total mass");
  }
  const auto& space = C.space();
  const std::size_t n = space.size();
  const std::size_t K = C.size();
  ConeMembership out;
  out.coefficients.assign(K, 0.0);
  if (mu.is_zero()) {
    out.member = true;
    return out;
  }

  LinearProgram lp;
  lp.sense = Sense::Minimize;
  for (std::size_t k = 0; k < K; ++k) lp.add_variable(0.0);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      lp.add_variable(space.dist(i, j));
      arcs.emplace_back(i, j);
    }
  }
  // One node balance is implied by zero total mass; the base row is dropped.
  for (std::size_t i = 0; i < n; ++i) {
    if (i == space.base()) continue;
    std::vector<double> row(lp.num_vars(), 0.0);
    for (std::size_t k = 0; k < K; ++k) row[k] = C.generators()[k][i];
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (arcs[a].first == i) row[K + a] += 1.0;
      if (arcs[a].second == i) row[K + a] -= 1.0;
    }
    lp.add_row(std::move(row), Relation::Equal, mu[i]);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "cone membership program not optimal");
  }
  for (std::size_t k = 0; k < K; ++k) out.coefficients[k] = sol.primal[k];
  out.residual = std::max(0.0, sol.objective);
  const auto& tol = tolerances();
  out.member = out.residual <= tol.witness;
  out.boundary = out.residual > tol.boundary && out.residual <= tol.band;
  return out;
}

struct Witness {
  LipschitzFunction u;  // base-normalized, L(u) <= 1
  double margin = 0.0;  // E_u[p] - E_u[q]
};

struct WitnessResult {
  std::optional<Witness> witness;
  double optimum = 0.0;
  // Optimum too small to separate but not clearly zero.
  bool boundary = false;
};

/// max E_f[p - q] over 1-Lipschitz f with f(base) = 0 and E_f[g] >= 0 on
/// every generator. A positive optimum separates q - p from the cone.
inline WitnessResult separating_witness(const PreferenceCone& C, const ProbMeasure& p,
                                        const ProbMeasure& q) {
  require_same_space(C.space(), p.space());
  require_same_space(p.space(), q.space());
  const auto& space = C.space();
  const std::size_t n = space.size();
  WitnessResult out;
  if (n == 1) return out;

  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = p[i] - q[i];
  auto lp = detail::kantorovich_dual_program(mu, space);
  for (const auto& g : C.generators()) {
    std::vector<double> row(lp.num_vars(), 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == space.base()) continue;
      row[k++] = g[i];
    }
    lp.add_row(std::move(row), Relation::GreaterEqual, 0.0);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "witness program not optimal");
  }
  out.optimum = sol.objective;
  const auto& tol = tolerances();
  if (out.optimum <= tol.witness) {
    out.boundary = out.optimum > tol.boundary;
    return out;
  }
  auto values = detail::expand_potential(sol, space);
  const double lip = lipschitz_number(values, space);
  if (lip > 1.0) {
    for (double& v : values) v /= lip;
  }
  LipschitzFunction u(space, std::move(values));
  const double margin = expectation_gap(u, p, q);
  out.boundary = out.optimum <= tol.band;
  out.witness = Witness{std::move(u), margin};
  return out;
}

struct Representation {
  UtilityFamily family;
  std::size_t witnesses = 0;
  std::size_t boundary_pairs = 0;
};

/// Builds a utility family from separating witnesses: for each panel pair
/// and each orientation in which the cone does not rank the pair, the
/// witness joins the family.
inline Representation represent(const PreferenceCone& C, const std::vector<MeasurePair>& panel) {
  std::vector<LipschitzFunction> members;
  Representation out;
  for (const auto& [p, q] : panel) {
    for (int side = 0; side < 2; ++side) {
      const auto r = side == 0 ? separating_witness(C, p, q) : separating_witness(C, q, p);
      if (r.boundary) ++out.boundary_pairs;
      if (r.witness) members.push_back(r.witness->u);
    }
  }
  out.witnesses = members.size();
  out.family = members.empty() ? UtilityFamily::indifference(C.space())
                               : UtilityFamily(C.space(), members);
  return out;
}

}  // namespace krorder
