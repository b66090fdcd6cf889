#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/measures.hpp"
#include "krorder/min_cost_flow.hpp"

namespace krorder {

struct TransportPlan {
  Matrix coupling;  // coupling(i, j): mass moved from point i (of p) to point j (of q)
  double cost = 0.0;
};

struct KantorovichPotential {
  LipschitzFunction f;  // base-normalized, L(f) <= 1
  double value = 0.0;   // integral of f against p - q
};

namespace detail {

inline double plan_cost(const Matrix& coupling, const MetricSpace& space) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < coupling.rows(); ++i) {
    for (std::size_t j = 0; j < coupling.cols(); ++j) {
      if (coupling(i, j) != 0.0) terms.push_back(coupling(i, j) * space.dist(i, j));
    }
  }
  return compensated_sum(terms);
}

inline TransportPlan solve_transport(const std::vector<double>& p, const std::vector<double>& q,
                                     const MetricSpace& space) {
  const std::size_t n = p.size();
  std::vector<double> supplies(2 * n, 0.0);
  std::vector<FlowEdge> edges;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints;
  for (std::size_t i = 0; i < n; ++i) {
    supplies[i] = p[i];
    supplies[n + i] = -q[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (q[j] <= 0.0) continue;
      edges.push_back({i, n + j, space.dist(i, j)});
      endpoints.emplace_back(i, j);
    }
  }
  const auto flow = min_cost_flow(supplies, edges);
  TransportPlan plan;
  plan.coupling = Matrix(n, n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    plan.coupling(endpoints[e].first, endpoints[e].second) = flow.flow[e];
  }
  plan.cost = plan_cost(plan.coupling, space);
  return plan;
}

}  // namespace detail

/// Optimal coupling of p and q (Wasserstein-1 primal).
///
/// The flow is always solved in one canonical orientation and transposed when
/// needed, so W1(p, q) and W1(q, p) agree bit for bit.
inline TransportPlan w1_primal(const ProbMeasure& p, const ProbMeasure& q) {
  require_same_space(p.space(), q.space());
  const auto& space = p.space();
  const std::size_t n = p.size();
  if (p.weights() == q.weights()) {
    TransportPlan plan;
    plan.coupling = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) plan.coupling(i, i) = p[i];
    return plan;
  }
  if (std::lexicographical_compare(q.weights().begin(), q.weights().end(), p.weights().begin(),
                                   p.weights().end())) {
    auto plan = detail::solve_transport(q.weights(), p.weights(), space);
    Matrix t(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t(i, j) = plan.coupling(j, i);
    }
    plan.coupling = std::move(t);
    return plan;
  }
  return detail::solve_transport(p.weights(), q.weights(), space);
}

inline double w1(const ProbMeasure& p, const ProbMeasure& q) { return w1_primal(p, q).cost; }

namespace detail {

// max sum_i f_i mu_i  s.t.  f_i - f_j <= d(i, j), f(base) = 0. The base
// variable is eliminated; the remaining n - 1 are free.
inline LinearProgram kantorovich_dual_program(const std::vector<double>& mu,
                                              const MetricSpace& space) {
  const std::size_t n = space.size();
  const std::size_t base = space.base();
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  std::vector<std::size_t> var(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == base) continue;
    var[i] = lp.add_variable(mu[i], VarKind::Free);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> row(lp.num_vars(), 0.0);
      if (var[i] < n) row[var[i]] += 1.0;
      if (var[j] < n) row[var[j]] -= 1.0;
      lp.add_row(std::move(row), Relation::LessEqual, space.dist(i, j));
    }
  }
  return lp;
}

inline std::vector<double> expand_potential(const LPSolution& sol, const MetricSpace& space) {
  std::vector<double> f(space.size(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (i == space.base()) continue;
    f[i] = sol.primal[k++];
  }
  return f;
}

}  // namespace detail

/// A Kantorovich potential: a 1-Lipschitz f with f(base) = 0 maximizing the
/// integral of f against p - q. Ties on the optimal face are broken by the
/// simplex pivoting order, so the potential is not canonical.
inline KantorovichPotential w1_dual(const ProbMeasure& p, const ProbMeasure& q) {
  require_same_space(p.space(), q.space());
  const auto& space = p.space();
  std::vector<double> mu(p.size());
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = p[i] - q[i];
  if (space.size() == 1) {
    return {LipschitzFunction(space, {0.0}), 0.0};
  }
  const auto sol = solve_lp(detail::kantorovich_dual_program(mu, space));
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "Kantorovich dual program not optimal");
  }
  auto values = detail::expand_potential(sol, space);
  // Pull back onto the unit Lipschitz ball if feasibility slack pushed it out.
  const double lip = lipschitz_number(values, space);
  if (lip > 1.0) {
    for (double& v : values) v /= lip;
  }
  LipschitzFunction f(space, std::move(values));
  const double value = expectation_gap(f, p, q);
  return {std::move(f), value};
}

/// KR norm of a zero-mass measure: alpha W1(p, q) for mu = alpha (p - q).
inline double kr_norm(const SignedMeasure& mu) {
  const auto split = jordan_split(mu);
  if (!split) return 0.0;
  return split->alpha * w1(split->positive, split->negative);
}

}  // namespace krorder
