#pragma once

// Seeded generators of random spaces, measures and utility families. Used by
// the randomized certification routines, the selftest and the test suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "krorder/measures.hpp"

namespace krorder {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return uniform(rng) < p; }

// Points drawn in the unit square, Euclidean distances.
inline MetricSpace random_euclidean_space(Rng& rng, std::size_t n, std::size_t dim = 2) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& x : p) x = uniform(rng);
  }
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d(i, j) = d(j, i) = std::max(std::sqrt(s), 1e-6);
    }
  }
  // Clamping tiny distances can break the triangle inequality; close it.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  return validate_metric({}, d, uniform_index(rng, 0, n - 1));
}

// Shortest-path metric of a complete graph with random edge lengths.
inline MetricSpace random_graph_metric(Rng& rng, std::size_t n) {
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = uniform(rng, 0.1, 1.0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  return validate_metric({}, d, uniform_index(rng, 0, n - 1));
}

inline MetricSpace random_space(Rng& rng, std::size_t n) {
  return coin(rng) ? random_euclidean_space(rng, n) : random_graph_metric(rng, n);
}

// Flat Dirichlet draw, optionally sparsified so supports differ.
inline ProbMeasure random_prob(Rng& rng, const MetricSpace& space, double keep = 1.0) {
  const std::size_t n = space.size();
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep < 1.0 && !coin(rng, keep)) continue;
    w[i] = expo(rng);
    total += w[i];
  }
  if (total == 0.0) {
    w[uniform_index(rng, 0, n - 1)] = 1.0;
    total = 1.0;
  }
  for (double& x : w) x /= total;
  return {space, std::move(w)};
}

inline ProbMeasure random_prob_mixed(Rng& rng, const MetricSpace& space) {
  const double r = uniform(rng);
  if (r < 0.15) return ProbMeasure::dirac(space, uniform_index(rng, 0, space.size() - 1));
  if (r < 0.5) return random_prob(rng, space, 0.5);
  return random_prob(rng, space);
}

inline LipschitzFunction random_function(Rng& rng, const MetricSpace& space) {
  std::vector<double> v(space.size());
  for (double& x : v) x = uniform(rng, -1.0, 1.0);
  return LipschitzFunction(space, std::move(v)).base_normalized();
}

inline std::vector<LipschitzFunction> random_functions(Rng& rng, const MetricSpace& space,
                                                       std::size_t count) {
  std::vector<LipschitzFunction> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_function(rng, space));
  return out;
}

// Random DAG relation on 0..n-1 closed transitively; returns leq[i][j].
inline std::vector<std::vector<bool>> random_order_relation(Rng& rng, std::size_t n,
                                                            double edge_prob) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (coin(rng, edge_prob)) leq[perm[a]][perm[b]] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (leq[i][k] && leq[k][j]) leq[i][j] = true;
      }
    }
  }
  return leq;
}

// A pair (p, q) with p above q in the stochastic order: q is random and p
// moves random amounts of mass upward along the order.
inline std::pair<ProbMeasure, ProbMeasure> random_dominating_pair(Rng& rng,
                                                                  const FinitePoset& poset) {
  const std::size_t n = poset.size();
  auto q = random_prob_mixed(rng, poset.space());
  std::vector<double> w = q.weights();
  const std::size_t moves = uniform_index(rng, 1, 2 * n);
  for (std::size_t k = 0; k < moves; ++k) {
    const std::size_t x = uniform_index(rng, 0, n - 1), y = uniform_index(rng, 0, n - 1);
    if (!poset.leq(x, y) || w[x] == 0.0) continue;
    const double t = uniform(rng) * w[x];
    w[x] -= t;
    w[y] += t;
  }
  for (double& v : w) v = std::max(0.0, v);
  return {ProbMeasure(poset.space(), std::move(w)), std::move(q)};
}

}  // namespace krorder
