#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "krorder/measures.hpp"
#include "krorder/preorder.hpp"

namespace krorder {

inline constexpr std::size_t kMaxPosetPoints = 20;

namespace detail {

inline const std::vector<double>& require_numeric(const MetricSpace& space) {
  if (!space.numeric_labels()) {
    throw Error(ErrorCode::NonNumericLabels, "univariate dominance needs real-valued labels");
  }
  return *space.numeric_labels();
}

inline std::vector<std::size_t> sorted_by_label(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  return order;
}

}  // namespace detail

/// First-order dominance of p over q on the real line: F_p <= F_q at every
/// support point.
inline bool fosd_univariate(const ProbMeasure& p, const ProbMeasure& q) {
  require_same_space(p.space(), q.space());
  const auto& x = detail::require_numeric(p.space());
  const auto order = detail::sorted_by_label(x);
  const double tol = tolerances().cdf;
  double F = 0.0, G = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    F += p[order[k]];
    G += q[order[k]];
    // Points with equal labels share one CDF value.
    if (k + 1 < order.size() && x[order[k + 1]] == x[order[k]]) continue;
    if (F > G + tol) return false;
  }
  return true;
}

/// The chain ordering points by their numeric labels.
inline FinitePoset chain_by_labels(const MetricSpace& space) {
  const auto& x = detail::require_numeric(space);
  const std::size_t n = space.size();
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) leq[i][j] = x[i] <= x[j];
  }
  return {space, std::move(leq)};
}

/// All lower sets of the poset as bitmasks, by depth-first search along a
/// linear extension: a point may join only when everything below it has.
inline std::vector<std::uint32_t> enumerate_lower_sets(const FinitePoset& poset) {
  const std::size_t n = poset.size();
  if (n > kMaxPosetPoints) {
    throw Error(ErrorCode::TooManyPoints,
                std::to_string(n) + " points; lower-set enumeration is capped at 20");
  }
  std::vector<std::uint32_t> below(n, 0);
  std::vector<std::size_t> order(n);
  for (std::size_t x = 0; x < n; ++x) {
    order[x] = x;
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x && poset.leq(y, x)) below[x] |= std::uint32_t{1} << y;
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::popcount(below[a]) < std::popcount(below[b]);
  });
  std::vector<std::uint32_t> out;
  auto dfs = [&](auto&& self, std::size_t k, std::uint32_t mask) -> void {
    if (k == n) {
      out.push_back(mask);
      return;
    }
    self(self, k + 1, mask);
    const std::size_t x = order[k];
    if ((below[x] & mask) == below[x]) self(self, k + 1, mask | (std::uint32_t{1} << x));
  };
  dfs(dfs, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::size_t> mask_to_points(std::uint32_t mask, std::size_t n) {
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask >> i) & 1u) pts.push_back(i);
  }
  return pts;
}

struct DominanceResult {
  bool dominates = true;
  std::optional<std::vector<std::size_t>> violating_set;  // lower set with p(S) > q(S)
  std::size_t lower_sets = 0;
};

/// p dominates q iff p(S) <= q(S) on every lower set S.
inline DominanceResult dominance_check(const ProbMeasure& p, const ProbMeasure& q,
                                       const FinitePoset& poset) {
  require_same_space(p.space(), q.space());
  require_same_space(p.space(), poset.space());
  const auto sets = enumerate_lower_sets(poset);
  DominanceResult out;
  out.lower_sets = sets.size();
  const double tol = tolerances().cdf;
  for (std::uint32_t mask : sets) {
    const auto pts = mask_to_points(mask, poset.size());
    if (p.mass_of(pts) > q.mass_of(pts) + tol) {
      out.dominates = false;
      out.violating_set = pts;
      return out;
    }
  }
  return out;
}

inline bool stochastic_order_poset(const ProbMeasure& p, const ProbMeasure& q,
                                   const FinitePoset& poset) {
  return dominance_check(p, q, poset).dominates;
}

// d(x, S) for every x; +inf everywhere for the empty set.
inline std::vector<double> distance_to_set(const MetricSpace& space,
                                           const std::vector<std::size_t>& S) {
  std::vector<double> d(space.size(), std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t s : S) d[x] = std::min(d[x], space.dist(x, s));
  }
  return d;
}

// Scale n past which min(n d(., S), 1) is the indicator of the complement of S.
inline std::size_t sufficient_scale(const MetricSpace& space) {
  if (space.size() < 2) return 1;
  return static_cast<std::size_t>(std::ceil(1.0 / space.min_separation()));
}

struct LowerSetWitnesses {
  UtilityFamily family;
  // Every d(., S) is increasing in the order, so each u_{S,n} is too.
  bool valid = true;
  std::size_t lower_sets = 0;
};

/// The family u_{S,n} = min(n d(., S), 1) over nonempty lower sets S and the
/// given scales. Constant members (S = X) are dropped by the family.
inline LowerSetWitnesses witness_family_lower_sets(const FinitePoset& poset,
                                                   const std::vector<std::size_t>& n_values) {
  const auto& space = poset.space();
  const std::size_t n = poset.size();
  const auto sets = enumerate_lower_sets(poset);
  LowerSetWitnesses out;
  out.lower_sets = sets.size();
  std::vector<LipschitzFunction> members;
  for (std::uint32_t mask : sets) {
    if (mask == 0) continue;
    const auto S = mask_to_points(mask, n);
    const auto d = distance_to_set(space, S);
    for (std::size_t x = 0; x < n && out.valid; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (poset.leq(x, y) && d[x] > d[y]) {
          out.valid = false;
          break;
        }
      }
    }
    for (std::size_t scale : n_values) {
      if (scale == 0) throw Error(ErrorCode::MalformedInput, "witness scale must be positive");
      std::vector<double> u(n);
      for (std::size_t x = 0; x < n; ++x) u[x] = std::min(static_cast<double>(scale) * d[x], 1.0);
      members.emplace_back(space, std::move(u));
    }
  }
  out.family = members.empty() ? UtilityFamily::indifference(space) : UtilityFamily(space, members);
  return out;
}

/// The univariate family u_{a,n}(x) = min(n (x - a)^+, 1) with a ranging
/// over the support grid. With n >= 1 / (smallest gap), u_{a,n} is the
/// indicator of (a, infinity) on the grid.
inline UtilityFamily univariate_witness_family(const MetricSpace& space, std::size_t scale) {
  const auto& x = detail::require_numeric(space);
  std::vector<LipschitzFunction> members;
  for (double a : x) {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      u[i] = std::min(static_cast<double>(scale) * std::max(0.0, x[i] - a), 1.0);
    }
    members.emplace_back(space, std::move(u));
  }
  return {space, members};
}

}  // namespace krorder
