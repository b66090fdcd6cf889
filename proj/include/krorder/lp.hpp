#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "krorder/error.hpp"
#include "krorder/tolerances.hpp"

namespace krorder {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class VarKind { NonNegative, Free };

/// A dense linear program
///   optimize  c.x  subject to  rows[i].x (relation[i]) rhs[i],
/// with each variable either nonnegative or free.
struct LinearProgram {
  Sense sense = Sense::Maximize;
  std::vector<double> objective;
  std::vector<VarKind> kinds;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  std::size_t add_variable(double cost, VarKind kind = VarKind::NonNegative) {
    objective.push_back(cost);
    kinds.push_back(kind);
    for (auto& r : rows) r.push_back(0.0);
    return objective.size() - 1;
  }

  std::size_t add_row(std::vector<double> coeffs, Relation rel, double b) {
    if (coeffs.size() != num_vars()) {
      throw Error(ErrorCode::DimensionMismatch, "constraint row has " +
                                                    std::to_string(coeffs.size()) +
                                                    " coefficients, program has " +
                                                    std::to_string(num_vars()) + " variables");
    }
    rows.push_back(std::move(coeffs));
    relations.push_back(rel);
    rhs.push_back(b);
    return rows.size() - 1;
  }

  void validate() const {
    if (kinds.size() != objective.size() || relations.size() != rows.size() ||
        rhs.size() != rows.size()) {
      throw Error(ErrorCode::DimensionMismatch, "inconsistent linear program dimensions");
    }
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(objective.begin(), objective.end(), finite) ||
        !std::all_of(rhs.begin(), rhs.end(), finite)) {
      throw Error(ErrorCode::MalformedInput, "non-finite objective or right-hand side");
    }
    for (const auto& r : rows) {
      if (r.size() != objective.size()) {
        throw Error(ErrorCode::DimensionMismatch, "constraint row length");
      }
      if (!std::all_of(r.begin(), r.end(), finite)) {
        throw Error(ErrorCode::MalformedInput, "non-finite constraint coefficient");
      }
    }
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "Optimal";
    case LPStatus::Infeasible: return "Infeasible";
    case LPStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

/// Result of solve_lp, with certificates in terms of the original program.
///
/// Sign conventions for `dual` (one entry per row) follow the textbook dual of
/// the stated sense. For a maximization, y >= 0 on <= rows, y <= 0 on >= rows,
/// A^T y >= c on nonnegative variables and A^T y = c on free ones. For a
/// minimization every inequality flips. In both cases b.y equals the optimum.
///
/// `farkas` (Infeasible) satisfies y <= 0 on <= rows, y >= 0 on >= rows,
/// (A^T y)_j <= 0 on nonnegative and = 0 on free variables, and b.y > 0.
///
/// `ray` (Unbounded) is a direction d with A d (relation) 0 row-wise, d >= 0
/// on nonnegative variables, and c.d strictly improving.
struct LPSolution {
  LPStatus status = LPStatus::Optimal;
  std::vector<double> primal;
  std::vector<double> dual;
  double objective = 0.0;
  std::vector<double> farkas;
  std::vector<double> ray;
  std::size_t iterations = 0;
};

struct LPResiduals {
  double primal = 0.0;  // worst constraint or sign violation
  double dual = 0.0;    // worst dual sign / reduced-cost violation
  double gap = 0.0;     // |c.x - b.y|
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline double row_dot(const std::vector<double>& row, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
  return s;
}

inline std::vector<double> transpose_times(const LinearProgram& lp, const std::vector<double>& y) {
  std::vector<double> aty(lp.num_vars(), 0.0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (y[i] == 0.0) continue;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) aty[j] += lp.rows[i][j] * y[i];
  }
  return aty;
}

}  // namespace detail

/// Residuals of an Optimal solution against the original program.
inline LPResiduals lp_residuals(const LinearProgram& lp, const LPSolution& sol) {
  LPResiduals r;
  const bool max = lp.sense == Sense::Maximize;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const double ax = detail::row_dot(lp.rows[i], sol.primal);
    const double v = ax - lp.rhs[i];
    switch (lp.relations[i]) {
      case Relation::LessEqual: r.primal = std::max(r.primal, v); break;
      case Relation::GreaterEqual: r.primal = std::max(r.primal, -v); break;
      case Relation::Equal: r.primal = std::max(r.primal, std::abs(v)); break;
    }
    // Dual sign: for a max, <= rows carry y >= 0 and >= rows y <= 0.
    const double y = max ? sol.dual[i] : -sol.dual[i];
    if (lp.relations[i] == Relation::LessEqual) r.dual = std::max(r.dual, -y);
    if (lp.relations[i] == Relation::GreaterEqual) r.dual = std::max(r.dual, y);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.kinds[j] == VarKind::NonNegative) r.primal = std::max(r.primal, -sol.primal[j]);
  }
  const auto aty = detail::transpose_times(lp, sol.dual);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const double reduced = max ? aty[j] - lp.objective[j] : lp.objective[j] - aty[j];
    if (lp.kinds[j] == VarKind::Free) {
      r.dual = std::max(r.dual, std::abs(reduced));
    } else {
      r.dual = std::max(r.dual, -reduced);
    }
  }
  const double cx = detail::row_dot(lp.objective, sol.primal);
  const double by = detail::row_dot(lp.rhs, sol.dual);
  r.gap = std::abs(cx - by);
  return r;
}

/// Checks a Farkas certificate of infeasibility; returns b.y when valid, or
/// a non-positive number when the certificate fails.
inline double farkas_value(const LinearProgram& lp, const std::vector<double>& y, double tol) {
  if (y.size() != lp.num_rows()) return -1.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (lp.relations[i] == Relation::LessEqual && y[i] > tol) return -1.0;
    if (lp.relations[i] == Relation::GreaterEqual && y[i] < -tol) return -1.0;
  }
  const auto aty = detail::transpose_times(lp, y);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.kinds[j] == VarKind::Free && std::abs(aty[j]) > tol) return -1.0;
    if (lp.kinds[j] == VarKind::NonNegative && aty[j] > tol) return -1.0;
  }
  return detail::row_dot(lp.rhs, y);
}

/// Checks an improving ray; returns the objective improvement c.d (sense
/// adjusted) when valid, or a non-positive number otherwise.
inline double ray_value(const LinearProgram& lp, const std::vector<double>& d, double tol) {
  if (d.size() != lp.num_vars()) return -1.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.kinds[j] == VarKind::NonNegative && d[j] < -tol) return -1.0;
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const double ad = detail::row_dot(lp.rows[i], d);
    if (lp.relations[i] == Relation::LessEqual && ad > tol) return -1.0;
    if (lp.relations[i] == Relation::GreaterEqual && ad < -tol) return -1.0;
    if (lp.relations[i] == Relation::Equal && std::abs(ad) > tol) return -1.0;
  }
  const double cd = detail::row_dot(lp.objective, d);
  return lp.sense == Sense::Maximize ? cd : -cd;
}

/// Dense revised simplex, two phases, with an explicit basis inverse that is
/// refactorized periodically.
///
/// Pricing is Dantzig's rule with a Harris-style ratio test; after a run of
/// degenerate pivots the solver falls back to Bland's smallest-index rule until
/// the objective moves again, which rules out cycling.
///
/// One instance per concurrent task: solve() mutates the working state.
class SimplexSolver {
 public:
  explicit SimplexSolver(Tolerances tol = tolerances()) : tol_(tol) {}

  LPSolution solve(const LinearProgram& lp) {
    lp.validate();
    build_standard_form(lp);
    LPSolution out;

    std::vector<double> phase1_cost(num_cols_, 0.0);
    bool any_artificial = false;
    for (std::size_t j = 0; j < num_cols_; ++j) {
      if (is_artificial_[j]) {
        phase1_cost[j] = 1.0;
        any_artificial = true;
      }
    }

    if (any_artificial) {
      const auto res = run(phase1_cost, /*phase_one=*/true);
      (void)res;
      refactor();
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (is_artificial_[basis_[i]]) infeas += std::max(0.0, xb_[i]);
      }
      double bnorm = 0.0;
      for (double b : b_) bnorm = std::max(bnorm, std::abs(b));
      if (infeas > tol_.feasibility * (1.0 + bnorm)) {
        out.status = LPStatus::Infeasible;
        out.farkas = farkas_ray(lp, phase1_cost);
        out.iterations = iterations_;
        return out;
      }
      drive_out_artificials();
    }

    const auto res = run(cost_, /*phase_one=*/false);
    out.iterations = iterations_;
    if (res == Outcome::Unbounded) {
      out.status = LPStatus::Unbounded;
      out.ray = unbounded_ray(lp);
      const double scale = 1.0 + max_abs(out.ray);
      if (ray_value(lp, out.ray, tol_.feasibility * scale) <= 0.0) {
        throw Error(ErrorCode::NumericalBreakdown, "unbounded ray failed verification");
      }
      return out;
    }

    refactor();
    extract_optimal(lp, out);
    const auto r = lp_residuals(lp, out);
    double bnorm = 0.0;
    for (double b : b_) bnorm = std::max(bnorm, std::abs(b));
    // Phase one accepts artificial leftovers up to feasibility * (1 + |b|).
    const double scale = 1.0 + bnorm + a_norm_ * max_abs(out.primal);
    if (r.primal > tol_.feasibility * scale || r.dual > tol_.feasibility * scale ||
        r.gap > tol_.gap * (1.0 + std::abs(out.objective))) {
      throw Error(ErrorCode::NumericalBreakdown,
                  "optimal basis failed certificate check (primal " + detail::sci(r.primal) +
                      ", dual " + detail::sci(r.dual) + ", gap " + detail::sci(r.gap) + ")");
    }
    return out;
  }

 private:
  enum class Outcome { Optimal, Unbounded };

  struct Entry {
    std::size_t row;
    double value;
  };

  // A standard-form column and where it came from.
  struct Column {
    std::vector<Entry> entries;
    std::size_t source = 0;  // original variable index, or row index for slacks
    int kind = 0;            // +1 / -1 split of an original variable, 2 slack, 3 artificial
  };

  static double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  void build_standard_form(const LinearProgram& lp) {
    m_ = lp.num_rows();
    const std::size_t n = lp.num_vars();
    const double sense = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    sign_.assign(m_, 1.0);
    b_.assign(m_, 0.0);
    a_norm_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      sign_[i] = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
      b_[i] = sign_[i] * lp.rhs[i];
      double row_norm = 0.0;
      for (double a : lp.rows[i]) row_norm += std::abs(a);
      a_norm_ = std::max(a_norm_, row_norm);
    }

    columns_.clear();
    cost_.clear();
    is_artificial_.clear();
    auto push = [&](Column c, double cost, bool artificial) {
      columns_.push_back(std::move(c));
      cost_.push_back(cost);
      is_artificial_.push_back(artificial);
    };

    for (std::size_t j = 0; j < n; ++j) {
      Column c;
      c.source = j;
      c.kind = 1;
      for (std::size_t i = 0; i < m_; ++i) {
        if (lp.rows[i][j] != 0.0) c.entries.push_back({i, sign_[i] * lp.rows[i][j]});
      }
      if (lp.kinds[j] == VarKind::Free) {
        Column neg = c;
        neg.kind = -1;
        for (auto& e : neg.entries) e.value = -e.value;
        push(c, sense * lp.objective[j], false);
        push(neg, -sense * lp.objective[j], false);
      } else {
        push(c, sense * lp.objective[j], false);
      }
    }

    basis_.assign(m_, 0);
    std::vector<bool> has_basic(m_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.relations[i] == Relation::Equal) continue;
      const double coeff = (lp.relations[i] == Relation::LessEqual ? 1.0 : -1.0) * sign_[i];
      Column c;
      c.source = i;
      c.kind = 2;
      c.entries.push_back({i, coeff});
      push(c, 0.0, false);
      if (coeff > 0.0) {
        basis_[i] = columns_.size() - 1;
        has_basic[i] = true;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (has_basic[i]) continue;
      Column c;
      c.source = i;
      c.kind = 3;
      c.entries.push_back({i, 1.0});
      push(c, 0.0, true);
      basis_[i] = columns_.size() - 1;
    }
    num_cols_ = columns_.size();
    is_basic_.assign(num_cols_, false);
    for (std::size_t i = 0; i < m_; ++i) is_basic_[basis_[i]] = true;

    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    xb_ = b_;
    iterations_ = 0;
    since_refactor_ = 0;
  }

  // Binv * a_j
  void ftran(std::size_t j, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    for (const auto& e : columns_[j].entries) {
      for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_[i * m_ + e.row] * e.value;
    }
  }

  // y^T = c_B^T Binv
  void duals(const std::vector<double>& cost, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
    }
  }

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    double s = 0.0;
    for (const auto& e : columns_[j].entries) s += y[e.row] * e.value;
    return s;
  }

  void refactor() {
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> b(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& e : columns_[basis_[i]].entries) b[e.row * m_ + i] = e.value;
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      double best = std::abs(b[col * m_ + col]);
      for (std::size_t r = col + 1; r < m_; ++r) {
        if (std::abs(b[r * m_ + col]) > best) {
          best = std::abs(b[r * m_ + col]);
          piv = r;
        }
      }
      if (best < tol_.pivot) {
        throw Error(ErrorCode::NumericalBreakdown,
                    "basis matrix is singular (pivot " + std::to_string(best) + ")");
      }
      if (piv != col) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(b[piv * m_ + k], b[col * m_ + k]);
          std::swap(inv[piv * m_ + k], inv[col * m_ + k]);
        }
      }
      const double d = b[col * m_ + col];
      for (std::size_t k = 0; k < m_; ++k) {
        b[col * m_ + k] /= d;
        inv[col * m_ + k] /= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = b[r * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          b[r * m_ + k] -= f * b[col * m_ + k];
          inv[r * m_ + k] -= f * inv[col * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
      xb_[i] = s;
    }
    since_refactor_ = 0;
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<double>& alpha) {
    const double ar = alpha[r];
    double* prow = &binv_[r * m_];
    for (std::size_t k = 0; k < m_; ++k) prow[k] /= ar;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      const double f = alpha[i];
      double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
    const double theta = xb_[r] / ar;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) xb_[i] -= theta * alpha[i];
    }
    xb_[r] = theta;
    is_basic_[basis_[r]] = false;
    basis_[r] = q;
    is_basic_[q] = true;
    ++iterations_;
    if (++since_refactor_ >= kRefactorInterval) refactor();
  }

  Outcome run(const std::vector<double>& cost, bool phase_one) {
    const double drop = tol_.feasibility;
    const double dtol = tol_.feasibility;
    const std::size_t limit = 50 * (m_ + num_cols_) + 1000;
    std::size_t degenerate_streak = 0;
    std::vector<double> y, alpha;
    const std::size_t start = iterations_;

    while (true) {
      if (iterations_ - start > limit) {
        throw Error(ErrorCode::NumericalBreakdown, "simplex iteration limit reached");
      }
      const bool bland = degenerate_streak >= kDegenerateBeforeBland;
      duals(cost, y);

      std::size_t q = num_cols_;
      double best = -dtol;
      for (std::size_t j = 0; j < num_cols_; ++j) {
        if (is_basic_[j] || is_artificial_[j]) continue;
        const double d = cost[j] - column_dot(j, y);
        if (bland) {
          if (d < -dtol) {
            q = j;
            break;
          }
        } else if (d < best) {
          best = d;
          q = j;
        }
      }
      if (q == num_cols_) return Outcome::Optimal;

      ftran(q, alpha);

      std::size_t r = m_;
      if (bland) {
        double min_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
          double ratio;
          if (is_artificial_[basis_[i]] && !phase_one && std::abs(alpha[i]) > drop) {
            ratio = 0.0;
          } else if (alpha[i] > drop) {
            ratio = std::max(0.0, xb_[i]) / alpha[i];
          } else {
            continue;
          }
          if (ratio < min_ratio - 1e-15 ||
              (std::abs(ratio - min_ratio) <= 1e-15 && basis_[i] < basis_[r])) {
            min_ratio = ratio;
            r = i;
          }
        }
      } else {
        // Harris: relaxed bound first, then the largest pivot inside it.
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
          if (is_artificial_[basis_[i]] && !phase_one && std::abs(alpha[i]) > drop) {
            bound = 0.0;
          } else if (alpha[i] > drop) {
            bound = std::min(bound, (std::max(0.0, xb_[i]) + tol_.feasibility) / alpha[i]);
          }
        }
        double best_alpha = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const bool art = is_artificial_[basis_[i]] && !phase_one && std::abs(alpha[i]) > drop;
          if (art) {
            if (bound == 0.0 && std::abs(alpha[i]) > best_alpha) {
              best_alpha = std::abs(alpha[i]);
              r = i;
            }
            continue;
          }
          if (alpha[i] <= drop) continue;
          const double ratio = std::max(0.0, xb_[i]) / alpha[i];
          if (ratio <= bound && alpha[i] > best_alpha) {
            best_alpha = alpha[i];
            r = i;
          }
        }
      }
      if (r == m_) {
        unbounded_column_ = q;
        unbounded_alpha_ = alpha;
        return Outcome::Unbounded;
      }

      if (is_artificial_[basis_[r]] && !phase_one) xb_[r] = 0.0;
      if (xb_[r] < 0.0) xb_[r] = 0.0;
      const double theta = xb_[r] / alpha[r];
      if (std::abs(theta) <= tol_.pivot) {
        ++degenerate_streak;
      } else {
        degenerate_streak = 0;
      }
      pivot(r, q, alpha);
    }
  }

  void drive_out_artificials() {
    std::vector<double> alpha;
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial_[basis_[r]]) continue;
      // Row r of Binv A, restricted to structural and slack columns.
      std::size_t best_j = num_cols_;
      double best = tol_.feasibility;
      for (std::size_t j = 0; j < num_cols_; ++j) {
        if (is_basic_[j] || is_artificial_[j]) continue;
        double v = 0.0;
        for (const auto& e : columns_[j].entries) v += binv_[r * m_ + e.row] * e.value;
        if (std::abs(v) > best) {
          best = std::abs(v);
          best_j = j;
        }
      }
      if (best_j == num_cols_) continue;  // redundant row; the artificial stays at zero
      ftran(best_j, alpha);
      xb_[r] = 0.0;
      pivot(r, best_j, alpha);
    }
  }

  std::vector<double> farkas_ray(const LinearProgram& lp, const std::vector<double>& cost) {
    std::vector<double> y;
    duals(cost, y);
    std::vector<double> out(lp.num_rows());
    for (std::size_t i = 0; i < m_; ++i) out[i] = sign_[i] * y[i];
    const double scale = max_abs(out);
    if (scale > 0.0) {
      for (double& v : out) v /= scale;
    }
    if (farkas_value(lp, out, tol_.feasibility) <= 0.0) {
      throw Error(ErrorCode::NumericalBreakdown, "Farkas certificate failed verification");
    }
    return out;
  }

  std::vector<double> unbounded_ray(const LinearProgram& lp) const {
    std::vector<double> d_std(num_cols_, 0.0);
    d_std[unbounded_column_] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) d_std[basis_[i]] -= unbounded_alpha_[i];
    std::vector<double> d(lp.num_vars(), 0.0);
    for (std::size_t j = 0; j < num_cols_; ++j) {
      const auto& c = columns_[j];
      if (c.kind == 1) d[c.source] += d_std[j];
      if (c.kind == -1) d[c.source] -= d_std[j];
    }
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (lp.kinds[j] == VarKind::NonNegative && d[j] < 0.0 && d[j] > -tol_.feasibility) d[j] = 0.0;
    }
    return d;
  }

  void extract_optimal(const LinearProgram& lp, LPSolution& out) const {
    std::vector<double> x_std(num_cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) x_std[basis_[i]] = std::max(0.0, xb_[i]);
    out.primal.assign(lp.num_vars(), 0.0);
    for (std::size_t j = 0; j < num_cols_; ++j) {
      const auto& c = columns_[j];
      if (c.kind == 1) out.primal[c.source] += x_std[j];
      if (c.kind == -1) out.primal[c.source] -= x_std[j];
    }
    std::vector<double> y;
    duals(cost_, y);
    const double flip = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    out.dual.assign(lp.num_rows(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) out.dual[i] = flip * sign_[i] * y[i];
    out.objective = detail::row_dot(lp.objective, out.primal);
    out.status = LPStatus::Optimal;
  }

  static constexpr std::size_t kRefactorInterval = 64;
  static constexpr std::size_t kDegenerateBeforeBland = 32;

  Tolerances tol_;
  std::size_t m_ = 0;
  std::size_t num_cols_ = 0;
  std::vector<Column> columns_;
  std::vector<double> cost_;
  std::vector<bool> is_artificial_;
  std::vector<bool> is_basic_;
  std::vector<double> sign_;
  std::vector<double> b_;
  double a_norm_ = 0.0;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
  std::size_t unbounded_column_ = 0;
  std::vector<double> unbounded_alpha_;
};

inline LPSolution solve_lp(const LinearProgram& lp) {
  SimplexSolver solver;
  return solver.solve(lp);
}

}  // namespace krorder
