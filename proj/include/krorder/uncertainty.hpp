#pragma once

// Anscombe-Aumann acts: state-indexed lotteries over one prize space,
// compared through per-state utility tuples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/preorder.hpp"
#include "krorder/transport.hpp"

namespace krorder {

class Act {
 public:
  Act() = default;
  Act(std::vector<std::string> states, std::vector<ProbMeasure> measures)
      : states_(std::move(states)), measures_(std::move(measures)) {
    if (measures_.empty()) throw Error(ErrorCode::DimensionMismatch, "act needs at least one state");
    if (states_.empty()) {
      for (std::size_t w = 0; w < measures_.size(); ++w) states_.push_back("s" + std::to_string(w));
    }
    if (states_.size() != measures_.size()) {
      throw Error(ErrorCode::DimensionMismatch, std::to_string(states_.size()) + " states but " +
                                                    std::to_string(measures_.size()) + " measures");
    }
    for (const auto& m : measures_) require_same_space(measures_.front().space(), m.space());
  }

  explicit Act(std::vector<ProbMeasure> measures) : Act({}, std::move(measures)) {}

  static Act constant(const ProbMeasure& p, std::size_t states) {
    return Act(std::vector<ProbMeasure>(states, p));
  }

  std::size_t num_states() const { return measures_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<ProbMeasure>& measures() const { return measures_; }
  const ProbMeasure& operator[](std::size_t w) const { return measures_[w]; }
  const MetricSpace& space() const { return measures_.front().space(); }

  bool is_constant() const {
    return std::all_of(measures_.begin(), measures_.end(),
                       [&](const ProbMeasure& m) { return m.weights() == measures_.front().weights(); });
  }

 private:
  std::vector<std::string> states_;
  std::vector<ProbMeasure> measures_;
};

inline void require_compatible(const Act& f, const Act& g) {
  if (f.num_states() != g.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "acts have " + std::to_string(f.num_states()) +
                                                  " and " + std::to_string(g.num_states()) + " states");
  }
  require_same_space(f.space(), g.space());
}

// State-wise mixture f (+)_l g.
inline Act mix(const Act& f, const Act& g, double lambda) {
  require_compatible(f, g);
  std::vector<ProbMeasure> out;
  for (std::size_t w = 0; w < f.num_states(); ++w) out.push_back(mix(f[w], g[w], lambda));
  return {f.states(), std::move(out)};
}

/// Sum over states of W1(f(w), g(w)).
inline double act_distance(const Act& f, const Act& g) {
  require_compatible(f, g);
  std::vector<double> terms;
  for (std::size_t w = 0; w < f.num_states(); ++w) terms.push_back(w1(f[w], g[w]));
  return compensated_sum(terms);
}

using StateUtility = std::vector<LipschitzFunction>;  // one function per state

/// Family of per-state utility tuples; f >= g iff every tuple gives
/// sum_w E_{u_w}[f(w)] >= sum_w E_{u_w}[g(w)].
class StateUtilityFamily {
 public:
  StateUtilityFamily() = default;
  StateUtilityFamily(MetricSpace space, std::size_t num_states, const std::vector<StateUtility>& members)
      : space_(std::move(space)), states_(num_states) {
    if (num_states == 0) throw Error(ErrorCode::DimensionMismatch, "no states");
    for (const auto& u : members) {
      if (u.size() != num_states) {
        throw Error(ErrorCode::DimensionMismatch, "member has " + std::to_string(u.size()) +
                                                      " coordinates, expected " + std::to_string(num_states));
      }
      StateUtility normalized;
      for (const auto& c : u) {
        require_same_space(space_, c.space());
        normalized.push_back(c.base_normalized());
      }
      members_.push_back(std::move(normalized));
    }
  }

  static StateUtilityFamily from_values(const MetricSpace& space,
                                        const std::vector<std::vector<std::vector<double>>>& values) {
    if (values.empty()) throw Error(ErrorCode::EmptyFamily, "state family has no members");
    std::vector<StateUtility> members;
    for (const auto& m : values) {
      StateUtility u;
      for (const auto& c : m) {
        require_length(space, c.size(), "state utility");
        u.emplace_back(space, c);
      }
      members.push_back(std::move(u));
    }
    return {space, values.front().size(), members};
  }

  // Tuples (mu(w) u)_w for a prior mu and a family of base utilities.
  static StateUtilityFamily from_prior(const std::vector<double>& mu, const UtilityFamily& base) {
    std::vector<StateUtility> members;
    for (const auto& u : base.members()) {
      StateUtility t;
      for (double a : mu) t.push_back(u.affine(a, 0.0));
      members.push_back(std::move(t));
    }
    return {base.space(), mu.size(), members};
  }

  const MetricSpace& space() const { return space_; }
  std::size_t num_states() const { return states_; }
  const std::vector<StateUtility>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  MetricSpace space_;
  std::size_t states_ = 0;
  std::vector<StateUtility> members_;
};

inline double act_value(const StateUtility& u, const Act& f) {
  std::vector<double> terms;
  for (std::size_t w = 0; w < f.num_states(); ++w) terms.push_back(expectation(u[w], f[w]));
  return compensated_sum(terms);
}

inline double act_tolerance(const StateUtility& u) {
  double spread = 0.0;
  for (const auto& c : u) spread += c.lip() * c.space().diameter();
  return tolerances().compare * (1.0 + spread);
}

inline ComparisonResult compare_acts(const StateUtilityFamily& family, const Act& f, const Act& g) {
  require_compatible(f, g);
  if (f.num_states() != family.num_states()) {
    throw Error(ErrorCode::DimensionMismatch, "act and family disagree on the number of states");
  }
  require_same_space(family.space(), f.space());
  bool fg = true, gf = true;
  for (const auto& u : family.members()) {
    const double gap = act_value(u, f) - act_value(u, g);
    const double eps = act_tolerance(u);
    if (gap < -eps) fg = false;
    if (gap > eps) gf = false;
  }
  if (fg && gf) return ComparisonResult::Indifferent;
  if (fg) return ComparisonResult::StrictBetter;
  if (gf) return ComparisonResult::StrictWorse;
  return ComparisonResult::Incomparable;
}

inline void validate_prior(const std::vector<double>& alpha, std::size_t states) {
  if (alpha.size() != states) {
    throw Error(ErrorCode::DimensionMismatch, "prior has " + std::to_string(alpha.size()) +
                                                  " entries for " + std::to_string(states) + " states");
  }
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::NotProbability, "negative prior weight");
    total += a;
  }
  if (std::abs(total - 1.0) > tolerances().mass * static_cast<double>(states) * 10.0) {
    throw Error(ErrorCode::NotProbability, "prior sums to " + std::to_string(total));
  }
}

/// The constant act whose value at every state is sum_w alpha(w) f(w).
inline Act reduce_act(const Act& f, const std::vector<double>& alpha) {
  validate_prior(alpha, f.num_states());
  std::vector<double> w(f.space().size(), 0.0);
  for (std::size_t s = 0; s < f.num_states(); ++s) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += alpha[s] * f[s][i];
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return {f.states(), std::vector<ProbMeasure>(f.num_states(), ProbMeasure(f.space(), std::move(w)))};
}

struct PriorExtraction {
  std::vector<double> prior;
  UtilityFamily base;  // one base utility per nonzero member
};

/// Writes each tuple as (a_w u_*)_w with a_w >= 0 and checks that the
/// normalized weights agree across members.
inline PriorExtraction extract_prior(const StateUtilityFamily& family) {
  const std::size_t S = family.num_states();
  const double tol = tolerances().prior;
  std::optional<std::vector<double>> mu;
  std::vector<LipschitzFunction> base;
  for (std::size_t m = 0; m < family.size(); ++m) {
    const auto& u = family.members()[m];
    auto sq = [](const LipschitzFunction& f) {
      double s = 0.0;
      for (double v : f.values()) s += v * v;
      return s;
    };
    // Largest coordinate as the reference keeps the ratios well conditioned.
    std::size_t ref = 0;
    for (std::size_t w = 1; w < S; ++w) {
      if (sq(u[w]) > sq(u[ref])) ref = w;
    }
    const double ref_sq = sq(u[ref]);
    if (ref_sq == 0.0) continue;
    const double ref_norm = std::sqrt(ref_sq);
    std::vector<double> a(S);
    for (std::size_t w = 0; w < S; ++w) {
      double dot = 0.0;
      for (std::size_t i = 0; i < u[w].size(); ++i) dot += u[w][i] * u[ref][i];
      a[w] = dot / ref_sq;
      double resid = 0.0;
      for (std::size_t i = 0; i < u[w].size(); ++i) {
        resid = std::max(resid, std::abs(u[w][i] - a[w] * u[ref][i]));
      }
      const double scale = std::sqrt(sq(u[w])) + ref_norm;
      if (resid > tol * scale) {
        throw Error(ErrorCode::NotRankOne, "member " + std::to_string(m) + ", state " +
                                               std::to_string(w) + " is not a multiple of state " +
                                               std::to_string(ref));
      }
      if (a[w] < -tol) {
        throw Error(ErrorCode::NotRankOne, "member " + std::to_string(m) + ", state " +
                                               std::to_string(w) + " is a negative multiple");
      }
      a[w] = std::max(0.0, a[w]);
    }
    double theta = 0.0;
    for (double x : a) theta += x;
    for (double& x : a) x /= theta;
    if (!mu) {
      mu = a;
    } else {
      for (std::size_t w = 0; w < S; ++w) {
        if (std::abs((*mu)[w] - a[w]) > tol) {
          throw Error(ErrorCode::PriorMismatch, "members 0 and " + std::to_string(m) +
                                                    " imply different priors at state " + std::to_string(w));
        }
      }
    }
    base.push_back(u[ref]);
  }
  if (!mu) throw Error(ErrorCode::TrivialFamily, "every member is zero");
  return {*mu, UtilityFamily(family.space(), base)};
}

/// A prior alpha with f ~ f^alpha, if one exists. Candidates are tried
/// first (by default the extracted prior, when the family has one), then the
/// indifference equations are solved as LP feasibility on the simplex.
inline std::optional<std::vector<double>> is_locally_prob_sophisticated(
    const StateUtilityFamily& family, const Act& f,
    std::optional<std::vector<std::vector<double>>> candidates = std::nullopt) {
  const std::size_t S = f.num_states();
  if (f.is_constant()) return std::vector<double>(S, 1.0 / static_cast<double>(S));
  if (!candidates) {
    candidates.emplace();
    try {
      candidates->push_back(extract_prior(family).prior);
    } catch (const Error&) {
      // No common prior; fall through to the LP.
    }
  }
  for (const auto& alpha : *candidates) {
    if (compare_acts(family, f, reduce_act(f, alpha)) == ComparisonResult::Indifferent) return alpha;
  }
  // sum_w u_w(f(w)) = sum_s alpha_s sum_w u_w(f(s)) for every member.
  LinearProgram lp;
  for (std::size_t s = 0; s < S; ++s) lp.add_variable(0.0);
  lp.add_row(std::vector<double>(S, 1.0), Relation::Equal, 1.0);
  for (const auto& u : family.members()) {
    std::vector<double> row(S);
    for (std::size_t s = 0; s < S; ++s) {
      double v = 0.0;
      for (std::size_t w = 0; w < S; ++w) v += expectation(u[w], f[s]);
      row[s] = v;
    }
    lp.add_row(std::move(row), Relation::Equal, act_value(u, f));
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) return std::nullopt;
  std::vector<double> alpha(S);
  double total = 0.0;
  for (std::size_t s = 0; s < S; ++s) total += alpha[s] = std::max(0.0, sol.primal[s]);
  for (double& a : alpha) a /= total;
  if (compare_acts(family, f, reduce_act(f, alpha)) != ComparisonResult::Indifferent) return std::nullopt;
  return alpha;
}

/// Cone of act differences, one zero-mass measure per state.
class ActCone {
 public:
  ActCone() = default;
  ActCone(MetricSpace space, std::size_t num_states) : space_(std::move(space)), states_(num_states) {}

  void add_pair(const Act& f, const Act& g) {
    require_compatible(f, g);
    if (f.num_states() != states_) throw Error(ErrorCode::DimensionMismatch, "act has wrong state count");
    require_same_space(space_, f.space());
    std::vector<double> gen;
    for (std::size_t w = 0; w < states_; ++w) {
      for (std::size_t i = 0; i < space_.size(); ++i) gen.push_back(f[w][i] - g[w][i]);
    }
    generators_.push_back(std::move(gen));
  }

  const MetricSpace& space() const { return space_; }
  std::size_t num_states() const { return states_; }
  // Flattened generators: state-major blocks of length |X|.
  const std::vector<std::vector<double>>& generators() const { return generators_; }

 private:
  MetricSpace space_;
  std::size_t states_ = 0;
  std::vector<std::vector<double>> generators_;
};

struct ActWitnessResult {
  std::optional<StateUtility> witness;
  double optimum = 0.0;
  bool boundary = false;
};

/// Block version of the separating-witness LP: one 1-Lipschitz potential per
/// state, nonnegative on every generator, maximizing the value of f - g.
inline ActWitnessResult act_separating_witness(const ActCone& C, const Act& f, const Act& g) {
  require_compatible(f, g);
  const auto& space = C.space();
  const std::size_t n = space.size(), S = C.num_states(), base = space.base();
  ActWitnessResult out;
  if (n == 1) return out;

  LinearProgram lp;
  lp.sense = Sense::Maximize;
  // var(w, i) for i != base.
  auto var = [&](std::size_t w, std::size_t i) { return w * (n - 1) + (i < base ? i : i - 1); };
  for (std::size_t w = 0; w < S; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == base) continue;
      lp.add_variable(f[w][i] - g[w][i], VarKind::Free);
    }
  }
  const std::size_t nv = S * (n - 1);
  for (std::size_t w = 0; w < S; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        std::vector<double> row(nv, 0.0);
        if (i != base) row[var(w, i)] += 1.0;
        if (j != base) row[var(w, j)] -= 1.0;
        lp.add_row(std::move(row), Relation::LessEqual, space.dist(i, j));
      }
    }
  }
  for (const auto& gen : C.generators()) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t w = 0; w < S; ++w) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i != base) row[var(w, i)] = gen[w * n + i];
      }
    }
    lp.add_row(std::move(row), Relation::GreaterEqual, 0.0);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "act witness program not optimal");
  }
  out.optimum = sol.objective;
  const auto& tol = tolerances();
  if (out.optimum <= tol.witness) {
    out.boundary = out.optimum > tol.boundary;
    return out;
  }
  StateUtility u;
  double lip = 0.0;
  std::vector<std::vector<double>> values(S, std::vector<double>(n, 0.0));
  for (std::size_t w = 0; w < S; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != base) values[w][i] = sol.primal[var(w, i)];
    }
    lip = std::max(lip, lipschitz_number(values[w], space));
  }
  for (auto& v : values) {
    if (lip > 1.0) {
      for (double& x : v) x /= lip;
    }
    u.emplace_back(space, std::move(v));
  }
  out.boundary = out.optimum <= tol.band;
  out.witness = std::move(u);
  return out;
}

/// State utility family from block witnesses over an act panel.
inline StateUtilityFamily represent_acts(const ActCone& C, const std::vector<std::pair<Act, Act>>& panel) {
  std::vector<StateUtility> members;
  for (const auto& [f, g] : panel) {
    for (int side = 0; side < 2; ++side) {
      auto r = side == 0 ? act_separating_witness(C, f, g) : act_separating_witness(C, g, f);
      if (r.witness) members.push_back(std::move(*r.witness));
    }
  }
  return {C.space(), C.num_states(), members};
}

}  // namespace krorder
