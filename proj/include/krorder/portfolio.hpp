#pragma once

// Expected-utility portfolio choice with a piecewise linear Bernoulli
// utility: maximize F(a) = sum_k p_k u(a . r_k) subject to a budget and an
// optional box, by projected subgradient ascent finished with a local cell
// LP, plus a stationarity certificate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "krorder/lp.hpp"
#include "krorder/random.hpp"

namespace krorder {

struct Scenario {
  std::vector<std::vector<double>> returns;  // m rows of n asset returns
  std::vector<double> probs;

  Scenario() = default;
  Scenario(std::vector<std::vector<double>> r, std::vector<double> p)
      : returns(std::move(r)), probs(std::move(p)) {
    if (returns.empty()) throw Error(ErrorCode::MalformedInput, "scenario set is empty");
    if (probs.size() != returns.size()) {
      throw Error(ErrorCode::DimensionMismatch, std::to_string(returns.size()) + " return rows but " +
                                                    std::to_string(probs.size()) + " probabilities");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < returns.size(); ++k) {
      if (returns[k].size() != returns.front().size()) {
        throw Error(ErrorCode::DimensionMismatch, "return row " + std::to_string(k) + " has wrong length");
      }
      for (double x : returns[k]) {
        if (!std::isfinite(x)) throw Error(ErrorCode::MalformedInput, "non-finite return");
      }
      if (!(probs[k] >= 0.0) || !std::isfinite(probs[k])) {
        throw Error(ErrorCode::NotProbability, "negative scenario probability");
      }
      total += probs[k];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotProbability, "scenario probabilities sum to " + std::to_string(total));
    }
  }

  std::size_t assets() const { return returns.front().size(); }
  std::size_t size() const { return returns.size(); }
};

/// Continuous piecewise linear u: slopes[j] applies between breakpoints
/// j - 1 and j (unbounded at both ends), anchored by u(0) = value_at_zero.
class PiecewiseLinearUtility {
 public:
  PiecewiseLinearUtility() : slopes_{1.0} {}
  PiecewiseLinearUtility(std::vector<double> breakpoints, std::vector<double> slopes, double value_at_zero = 0.0)
      : breaks_(std::move(breakpoints)), slopes_(std::move(slopes)), v0_(value_at_zero) {
    if (slopes_.size() != breaks_.size() + 1) {
      throw Error(ErrorCode::DimensionMismatch, "need one more slope than breakpoints");
    }
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (!std::isfinite(breaks_[i]) || (i > 0 && !(breaks_[i] > breaks_[i - 1]))) {
        throw Error(ErrorCode::MalformedInput, "breakpoints must be finite and strictly increasing");
      }
    }
    for (double s : slopes_) {
      if (!std::isfinite(s)) throw Error(ErrorCode::MalformedInput, "non-finite slope");
    }
  }

  static PiecewiseLinearUtility linear(double slope = 1.0) { return {{}, {slope}}; }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double value_at_zero() const { return v0_; }

  double lip() const {
    double l = 0.0;
    for (double s : slopes_) l = std::max(l, std::abs(s));
    return l;
  }

  bool is_concave() const {
    for (std::size_t j = 1; j < slopes_.size(); ++j) {
      if (slopes_[j] > slopes_[j - 1]) return false;
    }
    return true;
  }

  double operator()(double x) const { return x >= 0.0 ? v0_ + integral(0.0, x) : v0_ - integral(x, 0.0); }

  // Index of the breakpoint at x, if x sits on one.
  std::optional<std::size_t> kink_at(double x) const {
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      if (std::abs(x - breaks_[i]) <= 1e-12 * (1.0 + std::abs(breaks_[i]))) return i;
    }
    return std::nullopt;
  }

  // Slope of the segment containing x; at a kink, the mean of the two
  // adjacent slopes (any value between them is a valid Clarke selection).
  double subgradient(double x) const {
    if (auto k = kink_at(x)) return 0.5 * (slopes_[*k] + slopes_[*k + 1]);
    std::size_t j = 0;
    while (j < breaks_.size() && x > breaks_[j]) ++j;
    return slopes_[j];
  }

 private:
  // Integral of the slope function over [a, b], a <= b.
  double integral(double a, double b) const {
    double total = 0.0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < slopes_.size(); ++j) {
      const double lo = j == 0 ? -inf : breaks_[j - 1];
      const double hi = j == breaks_.size() ? inf : breaks_[j];
      const double l = std::max(a, lo), h = std::min(b, hi);
      if (h > l) total += slopes_[j] * (h - l);
    }
    return total;
  }

  std::vector<double> breaks_;
  std::vector<double> slopes_;
  double v0_ = 0.0;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void require_assets(const Scenario& sc, std::size_t n, const char* what) {
  if (n != sc.assets()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(n) +
                                                  " entries for " + std::to_string(sc.assets()) + " assets");
  }
}

}  // namespace detail

inline double eval_F(const std::vector<double>& alpha, const Scenario& sc, const PiecewiseLinearUtility& u) {
  detail::require_assets(sc, alpha.size(), "alpha");
  std::vector<double> terms;
  for (std::size_t k = 0; k < sc.size(); ++k) terms.push_back(sc.probs[k] * u(detail::dot(alpha, sc.returns[k])));
  return compensated_sum(terms);
}

/// sum_k p_k s_k r_k with s_k the selected slope at a . r_k.
inline std::vector<double> subgradient_F(const std::vector<double>& alpha, const Scenario& sc,
                                         const PiecewiseLinearUtility& u) {
  detail::require_assets(sc, alpha.size(), "alpha");
  std::vector<double> g(alpha.size(), 0.0);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const double s = sc.probs[k] * u.subgradient(detail::dot(alpha, sc.returns[k]));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * sc.returns[k][i];
  }
  return g;
}

/// K = L(u) sum_k p_k |r_k| (Euclidean), so |F(a) - F(b)| <= K |a - b|.
inline double lipschitz_bound_F(const Scenario& sc, const PiecewiseLinearUtility& u) {
  std::vector<double> terms;
  for (std::size_t k = 0; k < sc.size(); ++k) terms.push_back(sc.probs[k] * detail::norm2(sc.returns[k]));
  return u.lip() * compensated_sum(terms);
}

struct Box {
  std::vector<double> lower;  // entries may be -inf
  std::vector<double> upper;  // entries may be +inf

  bool bounded() const {
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) return false;
    }
    return true;
  }
};

struct PortfolioOptions {
  std::size_t iterations = 10000;
  std::size_t round_length = 500;  // iterations between step-scale restarts
  std::size_t starts = 8;          // multistart count for non-concave utilities
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct PortfolioResult {
  std::vector<double> alpha;
  double value = 0.0;
  double K = 0.0;
  double certificate_norm = 0.0;  // sup-norm distance of the sampled hull to the normal cone
  bool certified = false;
  bool concave = true;
  std::size_t iterations = 0;
  std::size_t starts = 1;
  std::vector<double> best_trace;  // best value after each round of the winning start
};

/// Feasible set {a : prices . a <= W} intersected with an optional box.
class PortfolioConstraints {
 public:
  PortfolioConstraints(std::vector<double> prices, double wealth, std::optional<Box> box)
      : prices_(std::move(prices)), wealth_(wealth), box_(std::move(box)) {
    if (!std::isfinite(wealth_)) throw Error(ErrorCode::MalformedInput, "wealth must be finite");
    for (double p : prices_) {
      if (!std::isfinite(p)) throw Error(ErrorCode::MalformedInput, "non-finite price");
    }
    if (std::none_of(prices_.begin(), prices_.end(), [](double p) { return p > 0.0; })) {
      throw Error(ErrorCode::PreconditionViolated, "price vector needs a positive entry");
    }
    if (box_) {
      if (box_->lower.size() != prices_.size() || box_->upper.size() != prices_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "box and prices differ in length");
      }
      for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (std::isnan(box_->lower[i]) || std::isnan(box_->upper[i]) || box_->lower[i] > box_->upper[i]) {
          throw Error(ErrorCode::MalformedInput, "box bound " + std::to_string(i) + " is empty");
        }
      }
    }
    // Cheapest point of the box must be affordable.
    double cheapest = 0.0;
    for (std::size_t i = 0; i < prices_.size(); ++i) {
      const double lo = box_ ? box_->lower[i] : -std::numeric_limits<double>::infinity();
      const double hi = box_ ? box_->upper[i] : std::numeric_limits<double>::infinity();
      if (prices_[i] > 0.0) cheapest += prices_[i] * lo;
      if (prices_[i] < 0.0) cheapest += prices_[i] * hi;
    }
    if (cheapest > wealth_ + 1e-12 * (1.0 + std::abs(wealth_))) {
      throw Error(ErrorCode::Infeasible, "budget " + std::to_string(wealth_) +
                                             " is below the cheapest point of the box");
    }
  }

  std::size_t size() const { return prices_.size(); }
  const std::vector<double>& prices() const { return prices_; }
  double wealth() const { return wealth_; }
  const std::optional<Box>& box() const { return box_; }

  double lo(std::size_t i) const { return box_ ? box_->lower[i] : -std::numeric_limits<double>::infinity(); }
  double hi(std::size_t i) const { return box_ ? box_->upper[i] : std::numeric_limits<double>::infinity(); }

  // Euclidean projection: clip(x - l prices) with the multiplier l >= 0
  // found by bisection on the budget.
  std::vector<double> project(const std::vector<double>& x) const {
    auto at = [&](double l) {
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::clamp(x[i] - l * prices_[i], lo(i), hi(i));
      return y;
    };
    auto y = at(0.0);
    if (detail::dot(prices_, y) <= wealth_) return y;
    double a = 0.0, b = 1.0;
    while (detail::dot(prices_, at(b)) > wealth_) {
      b *= 2.0;
      if (b > 1e300) throw Error(ErrorCode::NumericalBreakdown, "budget projection diverged");
    }
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + b); ++it) {
      const double m = 0.5 * (a + b);
      (detail::dot(prices_, at(m)) > wealth_ ? a : b) = m;
    }
    return at(b);
  }

 private:
  std::vector<double> prices_;
  double wealth_;
  std::optional<Box> box_;
};

namespace detail {

// Concave u, no box: F is unbounded on the budget set iff its recession
// function is positive on some direction d with prices . d <= 0. Solved as
// an LP over d in [-1, 1]^n.
inline bool recession_unbounded(const Scenario& sc, const PiecewiseLinearUtility& u,
                                const PortfolioConstraints& C) {
  const auto& prices = C.prices();
  const std::size_t n = sc.assets(), m = sc.size();
  const double s_left = u.slopes().front(), s_right = u.slopes().back();
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  for (std::size_t i = 0; i < n; ++i) lp.add_variable(0.0, VarKind::Free);
  for (std::size_t k = 0; k < m; ++k) lp.add_variable(sc.probs[k], VarKind::Free);
  for (std::size_t i = 0; i < n; ++i) {
    // Finite box sides close off that direction.
    std::vector<double> row(n + m, 0.0);
    row[i] = 1.0;
    lp.add_row(row, Relation::LessEqual, std::isfinite(C.hi(i)) ? 0.0 : 1.0);
    lp.add_row(std::move(row), Relation::GreaterEqual, std::isfinite(C.lo(i)) ? 0.0 : -1.0);
  }
  std::vector<double> budget(n + m, 0.0);
  for (std::size_t i = 0; i < n; ++i) budget[i] = prices[i];
  lp.add_row(std::move(budget), Relation::LessEqual, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (double s : {s_left, s_right}) {
      // t_k <= s (r_k . d)
      std::vector<double> row(n + m, 0.0);
      row[n + k] = 1.0;
      for (std::size_t i = 0; i < n; ++i) row[i] = -s * sc.returns[k][i];
      lp.add_row(std::move(row), Relation::LessEqual, 0.0);
    }
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "recession program not optimal");
  }
  return sol.objective > tolerances().feasibility * (1.0 + lipschitz_bound_F(sc, u));
}

struct AscentRun {
  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::vector<double> trace;
};

inline AscentRun subgradient_ascent(const Scenario& sc, const PiecewiseLinearUtility& u,
                                    const PortfolioConstraints& C, std::vector<double> x, double scale,
                                    const PortfolioOptions& opt) {
  AscentRun run;
  x = C.project(x);
  run.best = x;
  run.best_value = eval_F(x, sc, u);
  double R = scale;
  std::size_t used = 0;
  while (used < opt.iterations) {
    const std::vector<double> start = run.best;
    x = start;
    const std::size_t len = std::min(opt.round_length, opt.iterations - used);
    bool stationary = false;
    for (std::size_t t = 1; t <= len; ++t, ++used) {
      const auto g = subgradient_F(x, sc, u);
      const double gn = norm2(g);
      if (gn == 0.0) {
        stationary = true;
        break;
      }
      const double step = R / std::sqrt(static_cast<double>(t));
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += step * g[i] / gn;
      x = C.project(x);
      const double v = eval_F(x, sc, u);
      if (v > run.best_value) {
        run.best_value = v;
        run.best = x;
      }
    }
    run.trace.push_back(run.best_value);
    if (stationary) break;
    // Keep the scale while the best point is still travelling; otherwise
    // zoom in around it.
    std::vector<double> moved(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) moved[i] = run.best[i] - start[i];
    if (norm2(moved) < 0.5 * R) R *= 0.5;
    if (R < 1e-14 * (1.0 + norm2(run.best))) break;
  }
  run.iterations = used;
  return run;
}

// Finishing step. F is linear on each cell where every a . r_k stays in one
// segment of u, so the best point of a cell neighbourhood is an LP. Each
// scenario may also cross into a neighbouring segment over a concave kink,
// where u is the min of the two pieces; convex kinks are walls. Repeats
// while the true F improves.
inline void polish(const Scenario& sc, const PiecewiseLinearUtility& u, const PortfolioConstraints& C,
                   AscentRun& run) {
  const std::size_t n = sc.assets(), m = sc.size();
  const auto& bp = u.breakpoints();
  const auto& sl = u.slopes();
  const double inf = std::numeric_limits<double>::infinity();
  auto anchor = [&](std::size_t j) { return bp.empty() ? 0.0 : (j == 0 ? bp[0] : bp[j - 1]); };
  for (int round = 0; round < 100; ++round) {
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    for (std::size_t i = 0; i < n; ++i) lp.add_variable(0.0, VarKind::Free);
    for (std::size_t k = 0; k < m; ++k) lp.add_variable(sc.probs[k], VarKind::Free);
    std::vector<double> budget(n + m, 0.0);
    for (std::size_t i = 0; i < n; ++i) budget[i] = C.prices()[i];
    lp.add_row(std::move(budget), Relation::LessEqual, C.wealth());
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(n + m, 0.0);
      row[i] = 1.0;
      if (std::isfinite(C.hi(i))) lp.add_row(row, Relation::LessEqual, C.hi(i));
      if (std::isfinite(C.lo(i))) lp.add_row(row, Relation::GreaterEqual, C.lo(i));
    }
    for (std::size_t k = 0; k < m; ++k) {
      const auto& r = sc.returns[k];
      const double x = dot(run.best, r);
      const std::size_t j = static_cast<std::size_t>(std::lower_bound(bp.begin(), bp.end(), x) - bp.begin());
      std::size_t first = j, last = j;
      if (j > 0 && sl[j - 1] >= sl[j]) first = j - 1;
      if (j < bp.size() && sl[j + 1] <= sl[j]) last = j + 1;
      std::vector<double> row(n + m, 0.0);
      for (std::size_t i = 0; i < n; ++i) row[i] = r[i];
      const double lo = first == 0 ? -inf : bp[first - 1];
      const double hi = last == bp.size() ? inf : bp[last];
      if (std::isfinite(lo)) lp.add_row(row, Relation::GreaterEqual, lo);
      if (std::isfinite(hi)) lp.add_row(row, Relation::LessEqual, hi);
      for (std::size_t q = first; q <= last; ++q) {
        const double x0 = anchor(q);
        std::vector<double> piece(n + m, 0.0);
        piece[n + k] = 1.0;
        for (std::size_t i = 0; i < n; ++i) piece[i] = -sl[q] * r[i];
        lp.add_row(std::move(piece), Relation::LessEqual, u(x0) - sl[q] * x0);
      }
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LPStatus::Optimal) return;
    auto next = C.project(std::vector<double>(sol.primal.begin(), sol.primal.begin() + n));
    const double v = eval_F(next, sc, u);
    if (!(v > run.best_value + 1e-15 * (1.0 + std::abs(run.best_value)))) return;
    run.best = std::move(next);
    run.best_value = v;
    run.trace.push_back(v);
  }
}

// Is there y with |y - a|_inf <= delta and a . r_k inside segment j_k for
// every listed scenario?
inline bool cell_meets_ball(const Scenario& sc, const PiecewiseLinearUtility& u, const std::vector<double>& a,
                            double delta, const std::vector<std::size_t>& scen,
                            const std::vector<std::size_t>& seg) {
  const std::size_t n = a.size();
  const auto& bp = u.breakpoints();
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  // y = a - delta + z, z in [0, 2 delta].
  for (std::size_t i = 0; i < n; ++i) lp.add_variable(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    lp.add_row(std::move(row), Relation::LessEqual, 2.0 * delta);
  }
  for (std::size_t q = 0; q < scen.size(); ++q) {
    const auto& r = sc.returns[scen[q]];
    const double base = dot(a, r) - delta * std::accumulate(r.begin(), r.end(), 0.0);
    const std::size_t j = seg[q];
    if (j > 0) lp.add_row(r, Relation::GreaterEqual, bp[j - 1] - base);
    if (j < bp.size()) lp.add_row(r, Relation::LessEqual, bp[j] - base);
  }
  return solve_lp(lp).status == LPStatus::Optimal;
}

// Distance, in the sup norm, from the hull of the gradients of F on the
// delta-ball around a to the normal cone of the feasible set at a. The
// gradients are enumerated exactly: one per linearity cell meeting the ball.
inline double stationarity_certificate(const Scenario& sc, const PiecewiseLinearUtility& u,
                                       const PortfolioConstraints& C, const std::vector<double>& a) {
  const std::size_t n = a.size(), m = sc.size();
  const double delta = 1e-7 * (1.0 + norm2(a));
  const auto& bp = u.breakpoints();
  const auto& sl = u.slopes();

  // Candidate segments per scenario over the ball.
  std::vector<double> fixed(n, 0.0);
  std::vector<std::size_t> scen;
  std::vector<std::vector<std::size_t>> options;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& r = sc.returns[k];
    const double x = dot(a, r);
    double spread = 0.0;
    for (double v : r) spread += std::abs(v);
    spread *= delta;
    std::vector<std::size_t> segs;
    for (std::size_t j = 0; j < sl.size(); ++j) {
      const bool above_left = j == 0 || x + spread >= bp[j - 1];
      const bool below_right = j == bp.size() || x - spread <= bp[j];
      if (above_left && below_right) segs.push_back(j);
    }
    if (segs.size() == 1) {
      for (std::size_t i = 0; i < n; ++i) fixed[i] += sc.probs[k] * sl[segs[0]] * r[i];
    } else {
      scen.push_back(k);
      options.push_back(std::move(segs));
    }
  }

  std::vector<std::vector<double>> grads;
  std::vector<std::size_t> pick(scen.size(), 0);
  constexpr std::size_t kMaxCells = 4096;
  for (std::size_t visited = 0; visited < kMaxCells; ++visited) {
    std::vector<std::size_t> seg(scen.size());
    for (std::size_t q = 0; q < scen.size(); ++q) seg[q] = options[q][pick[q]];
    if (scen.empty() || cell_meets_ball(sc, u, a, delta, scen, seg)) {
      auto g = fixed;
      for (std::size_t q = 0; q < scen.size(); ++q) {
        for (std::size_t i = 0; i < n; ++i) g[i] += sc.probs[scen[q]] * sl[seg[q]] * sc.returns[scen[q]][i];
      }
      grads.push_back(std::move(g));
    }
    // Odometer over the segment choices.
    std::size_t q = 0;
    while (q < scen.size() && ++pick[q] == options[q].size()) pick[q++] = 0;
    if (q == scen.size()) break;
  }
  if (grads.empty()) throw Error(ErrorCode::NumericalBreakdown, "no linearity cell meets the certificate ball");

  const double act = tolerances().portfolio_active * (1.0 + std::abs(C.wealth()) + norm2(a));
  std::vector<std::vector<double>> cone_dirs;
  if (dot(C.prices(), a) >= C.wealth() - act) cone_dirs.push_back(C.prices());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    if (a[i] >= C.hi(i) - act) {
      e[i] = 1.0;
      cone_dirs.push_back(e);
    }
    if (a[i] <= C.lo(i) + act) {
      e[i] = -1.0;
      cone_dirs.push_back(e);
    }
  }

  // Variables: convex weights, cone multipliers, t.
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  const std::size_t G = grads.size();
  for (std::size_t k = 0; k < G; ++k) lp.add_variable(0.0);
  for (std::size_t c = 0; c < cone_dirs.size(); ++c) lp.add_variable(0.0);
  const std::size_t t = lp.add_variable(1.0);
  const std::size_t nv = lp.num_vars();
  std::vector<double> simplex(nv, 0.0);
  for (std::size_t k = 0; k < G; ++k) simplex[k] = 1.0;
  lp.add_row(std::move(simplex), Relation::Equal, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t k = 0; k < G; ++k) row[k] = grads[k][i];
    for (std::size_t c = 0; c < cone_dirs.size(); ++c) row[G + c] = -cone_dirs[c][i];
    auto upper = row;
    upper[t] = -1.0;
    lp.add_row(std::move(upper), Relation::LessEqual, 0.0);
    row[t] = 1.0;
    lp.add_row(std::move(row), Relation::GreaterEqual, 0.0);
  }
  const auto sol = solve_lp(lp);
  if (sol.status != LPStatus::Optimal) {
    throw Error(ErrorCode::NumericalBreakdown, "certificate program not optimal");
  }
  return std::max(0.0, sol.objective);
}

}  // namespace detail

/// Maximizes F over the budget set (and box). Concave utilities run one
/// ascent from the projected origin; others need a bounded box and use
/// several seeded starts, keeping the best local certificate.
inline PortfolioResult maximize_portfolio(const Scenario& sc, const PiecewiseLinearUtility& u,
                                          const std::vector<double>& prices, double wealth,
                                          const std::optional<Box>& box = std::nullopt,
                                          const PortfolioOptions& opt = {}) {
  detail::require_assets(sc, prices.size(), "price vector");
  PortfolioConstraints C(prices, wealth, box);
  PortfolioResult out;
  out.K = lipschitz_bound_F(sc, u);
  out.concave = u.is_concave();
  const std::size_t n = sc.assets();
  if (!out.concave && !(box && box->bounded())) {
    throw Error(ErrorCode::MissingBox, "non-concave utility requires a bounded box");
  }
  if (out.concave && !(box && box->bounded()) && detail::recession_unbounded(sc, u, C)) {
    throw Error(ErrorCode::Unbounded, "expected utility grows without bound on the budget set");
  }

  // Initial step scale: the box width, or the budget's reach from the origin.
  double scale = 1.0;
  if (box && box->bounded()) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = box->upper[i] - box->lower[i];
    scale = std::max(scale, detail::norm2(w));
  } else {
    scale = std::max(scale, std::abs(wealth) / detail::norm2(prices));
  }

  std::vector<std::vector<double>> starts = {std::vector<double>(n, 0.0)};
  if (!out.concave) {
    Rng rng(opt.seed);
    for (std::size_t s = 1; s < std::max<std::size_t>(1, opt.starts); ++s) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = uniform(rng, box->lower[i], box->upper[i]);
      starts.push_back(std::move(x));
    }
  }

  std::vector<detail::AscentRun> runs(starts.size());
  const std::size_t threads = std::max<std::size_t>(1, opt.threads);
  for (std::size_t begin = 0; begin < starts.size(); begin += threads) {
    std::vector<std::future<detail::AscentRun>> batch;
    const std::size_t end = std::min(starts.size(), begin + threads);
    for (std::size_t s = begin; s < end; ++s) {
      batch.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                 [&, s] {
                                   auto run = detail::subgradient_ascent(sc, u, C, starts[s], scale, opt);
                                   detail::polish(sc, u, C, run);
                                   return run;
                                 }));
    }
    for (std::size_t s = begin; s < end; ++s) runs[s] = batch[s - begin].get();
  }
  // Ties go to the earliest start so the answer does not depend on timing.
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    if (runs[s].best_value > runs[best].best_value) best = s;
  }
  out.alpha = runs[best].best;
  out.value = runs[best].best_value;
  out.best_trace = runs[best].trace;
  out.starts = runs.size();
  for (const auto& r : runs) out.iterations += r.iterations;
  out.certificate_norm = detail::stationarity_certificate(sc, u, C, out.alpha);
  out.certified = out.certificate_norm <= tolerances().portfolio_certificate * std::max(out.K, 1e-300) ||
                  out.K == 0.0;
  return out;
}

/// Exact optimum for concave u: F is the minimum of affine pieces per
/// scenario, so the problem is an LP. Used as an independent oracle.
inline LPSolution portfolio_lp(const Scenario& sc, const PiecewiseLinearUtility& u,
                               const std::vector<double>& prices, double wealth,
                               const std::optional<Box>& box = std::nullopt) {
  if (!u.is_concave()) throw Error(ErrorCode::PreconditionViolated, "LP form needs a concave utility");
  const std::size_t n = sc.assets(), m = sc.size();
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  for (std::size_t i = 0; i < n; ++i) lp.add_variable(0.0, VarKind::Free);
  for (std::size_t k = 0; k < m; ++k) lp.add_variable(sc.probs[k], VarKind::Free);
  std::vector<double> budget(n + m, 0.0);
  for (std::size_t i = 0; i < n; ++i) budget[i] = prices[i];
  lp.add_row(std::move(budget), Relation::LessEqual, wealth);
  if (box) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(n + m, 0.0);
      row[i] = 1.0;
      if (std::isfinite(box->upper[i])) lp.add_row(row, Relation::LessEqual, box->upper[i]);
      if (std::isfinite(box->lower[i])) lp.add_row(row, Relation::GreaterEqual, box->lower[i]);
    }
  }
  // Segment j as an affine function through (x_j, u(x_j)).
  const auto& bp = u.breakpoints();
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < u.slopes().size(); ++j) {
      const double x0 = bp.empty() ? 0.0 : (j == 0 ? bp[0] : bp[j - 1]);
      const double s = u.slopes()[j];
      // t_k - s (r_k . a) <= u(x0) - s x0
      std::vector<double> row(n + m, 0.0);
      row[n + k] = 1.0;
      for (std::size_t i = 0; i < n; ++i) row[i] = -s * sc.returns[k][i];
      lp.add_row(std::move(row), Relation::LessEqual, u(x0) - s * x0);
    }
  }
  return solve_lp(lp);
}

// Parallelism cap from KRORDER_THREADS, default 1.
inline std::size_t thread_limit() {
  if (const char* env = std::getenv("KRORDER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

}  // namespace krorder
