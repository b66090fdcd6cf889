#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "krorder/error.hpp"
#include "krorder/tolerances.hpp"

namespace krorder {

// Dense row-major matrix of doubles. Problem sizes in this library are small
// enough that a flat vector beats anything cleverer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorCode::NotSquare, "ragged matrix rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<std::vector<double>> to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Neumaier's variant of Kahan summation.
inline double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

inline double compensated_dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i] * b[i];
  return compensated_sum(terms);
}

/// A validated finite pointed metric space.
///
/// Immutable after construction; copies share the underlying storage, so a
/// MetricSpace can be passed around by value and used as an identity for
/// measures and functions defined on it.
class MetricSpace {
 public:
  MetricSpace() = default;

  std::size_t size() const noexcept { return data_ ? data_->labels.size() : 0; }
  const std::vector<std::string>& labels() const { return data_->labels; }
  const Matrix& dist() const { return data_->dist; }
  double dist(std::size_t i, std::size_t j) const { return data_->dist(i, j); }
  std::size_t base() const { return data_->base; }
  double diameter() const { return data_->diameter; }

  // Smallest distance between distinct points; +inf for a one-point space.
  double min_separation() const { return data_->min_separation; }

  // Numeric value of each label, when every label parses as a real number.
  const std::optional<std::vector<double>>& numeric_labels() const {
    return data_->numeric;
  }

  bool same_as(const MetricSpace& other) const noexcept {
    if (data_ == other.data_) return true;
    if (!data_ || !other.data_) return false;
    return data_->base == other.data_->base && data_->dist == other.data_->dist;
  }

  friend MetricSpace validate_metric(std::vector<std::string> labels, const Matrix& dist,
                                     std::size_t base);

 private:
  struct Data {
    std::vector<std::string> labels;
    Matrix dist;
    std::size_t base = 0;
    double diameter = 0.0;
    double min_separation = 0.0;
    std::optional<std::vector<double>> numeric;
  };
  std::shared_ptr<const Data> data_;
};

namespace detail {

inline std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string index_pair(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace detail

/// Checks the metric axioms and returns the space; never repairs input.
inline MetricSpace validate_metric(std::vector<std::string> labels, const Matrix& dist,
                                   std::size_t base) {
  const std::size_t n = dist.rows();
  if (n == 0) throw Error(ErrorCode::EmptySpace, "metric space needs at least one point");
  if (dist.cols() != n) throw Error(ErrorCode::NotSquare, "distance matrix is not square");
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "label count differs from matrix size");
  }
  if (base >= n) {
    throw Error(ErrorCode::BadBaseIndex,
                "base " + std::to_string(base) + " outside [0, " + std::to_string(n) + ")");
  }

  double max_entry = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist(i, j);
      if (!std::isfinite(d)) {
        throw Error(ErrorCode::MalformedInput, "non-finite distance at " + detail::index_pair(i, j));
      }
      if (d < 0.0) {
        throw Error(ErrorCode::NegativeDistance, "negative distance at " + detail::index_pair(i, j));
      }
      max_entry = std::max(max_entry, d);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      throw Error(ErrorCode::ZeroDistanceDistinctPoints,
                  "diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) != dist(j, i)) {
        throw Error(ErrorCode::AsymmetricDistance, "d" + detail::index_pair(i, j) +
                                                       " != d" + detail::index_pair(j, i));
      }
      if (dist(i, j) <= 0.0) {
        throw Error(ErrorCode::ZeroDistanceDistinctPoints,
                    "distinct points " + detail::index_pair(i, j) + " at distance zero");
      }
    }
  }

  const double slack = tolerances().triangle * max_entry;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (dist(i, k) > dist(i, j) + dist(j, k) + slack) {
          throw Error(ErrorCode::TriangleViolation,
                      "d(" + std::to_string(i) + "," + std::to_string(k) + ") > d(" +
                          std::to_string(i) + "," + std::to_string(j) + ") + d(" +
                          std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }

  auto data = std::make_shared<MetricSpace::Data>();
  data->labels = std::move(labels);
  data->dist = dist;
  data->base = base;
  data->diameter = max_entry;
  data->min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      data->min_separation = std::min(data->min_separation, dist(i, j));
    }
  }
  std::vector<double> numeric;
  for (const auto& label : data->labels) {
    auto v = detail::parse_real(label);
    if (!v) break;
    numeric.push_back(*v);
  }
  if (numeric.size() == n) data->numeric = std::move(numeric);

  MetricSpace space;
  space.data_ = std::move(data);
  return space;
}

// The real line restricted to `points`, with d(x, y) = |x - y|.
inline MetricSpace line_space(const std::vector<double>& points, std::size_t base = 0) {
  const std::size_t n = points.size();
  Matrix d(n, n);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::abs(points[i] - points[j]);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", points[i]);
    labels.emplace_back(buf);
  }
  return validate_metric(std::move(labels), d, base);
}

// Discrete metric: every pair of distinct points at distance `scale`.
inline MetricSpace discrete_space(std::size_t n, double scale = 1.0, std::size_t base = 0) {
  Matrix d(n, n, scale);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  return validate_metric({}, d, base);
}

inline void require_length(const MetricSpace& space, std::size_t len, const char* what) {
  if (len != space.size()) {
    throw Error(ErrorCode::LengthMismatch, std::string(what) + " has length " +
                                               std::to_string(len) + ", space has " +
                                               std::to_string(space.size()) + " points");
  }
}

inline void require_same_space(const MetricSpace& a, const MetricSpace& b) {
  if (!a.same_as(b)) throw Error(ErrorCode::SpaceMismatch, "objects live on different spaces");
}

/// Exact Lipschitz number: the largest pairwise difference quotient.
inline double lipschitz_number(std::span<const double> f, const MetricSpace& space) {
  require_length(space, f.size(), "function");
  double lip = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      lip = std::max(lip, std::abs(f[i] - f[j]) / space.dist(i, j));
    }
  }
  return lip;
}

/// A real function on a finite metric space together with its Lipschitz number.
class LipschitzFunction {
 public:
  LipschitzFunction() = default;
  LipschitzFunction(MetricSpace space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    lip_ = lipschitz_number(values_, space_);
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedInput, "non-finite function value");
    }
  }

  const MetricSpace& space() const { return space_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double lip() const { return lip_; }
  bool is_constant() const { return lip_ == 0.0; }
  bool is_base_normalized() const { return values_[space_.base()] == 0.0; }

  // Lip0 representative: subtract the value at the base point.
  LipschitzFunction base_normalized() const {
    std::vector<double> v = values_;
    const double shift = values_[space_.base()];
    for (double& x : v) x -= shift;
    return {space_, std::move(v)};
  }

  // Base-normalized and scaled to Lipschitz number one; constants stay zero.
  LipschitzFunction unit_normalized() const {
    LipschitzFunction g = base_normalized();
    if (g.lip_ == 0.0) return g;
    for (double& x : g.values_) x /= lip_;
    g.lip_ = lipschitz_number(g.values_, space_);
    return g;
  }

  LipschitzFunction affine(double scale, double shift) const {
    std::vector<double> v = values_;
    for (double& x : v) x = scale * x + shift;
    return {space_, std::move(v)};
  }

 private:
  MetricSpace space_;
  std::vector<double> values_;
  double lip_ = 0.0;
};

/// A finite partial order carried by a metric space.
class FinitePoset {
 public:
  FinitePoset() = default;
  FinitePoset(MetricSpace space, std::vector<std::vector<bool>> leq)
      : space_(std::move(space)), leq_(std::move(leq)) {
    const std::size_t n = space_.size();
    if (leq_.size() != n) throw Error(ErrorCode::LengthMismatch, "order relation size");
    for (const auto& row : leq_) {
      if (row.size() != n) throw Error(ErrorCode::LengthMismatch, "order relation row size");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!leq_[i][i]) throw Error(ErrorCode::NotAPoset, "relation is not reflexive");
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && leq_[i][j] && leq_[j][i]) {
          throw Error(ErrorCode::NotAPoset, "relation is not antisymmetric at " +
                                                detail::index_pair(i, j));
        }
        for (std::size_t k = 0; k < n; ++k) {
          if (leq_[i][j] && leq_[j][k] && !leq_[i][k]) {
            throw Error(ErrorCode::NotAPoset, "relation is not transitive");
          }
        }
      }
    }
  }

  const MetricSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  // leq(i, j) means point i <= point j.
  bool leq(std::size_t i, std::size_t j) const { return leq_[i][j]; }
  const std::vector<std::vector<bool>>& relation() const { return leq_; }

  static FinitePoset chain(MetricSpace space) {
    const std::size_t n = space.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) leq[i][j] = true;
    }
    return {std::move(space), std::move(leq)};
  }

  static FinitePoset antichain(MetricSpace space) {
    const std::size_t n = space.size();
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
    return {std::move(space), std::move(leq)};
  }

 private:
  MetricSpace space_;
  std::vector<std::vector<bool>> leq_;
};

/// True iff `subset` is downward closed: x in S and y <= x imply y in S.
inline bool is_lower_set(std::span<const std::size_t> subset, const FinitePoset& poset) {
  const std::size_t n = poset.size();
  std::vector<bool> in(n, false);
  for (std::size_t x : subset) {
    if (x >= n) throw Error(ErrorCode::LengthMismatch, "subset index out of range");
    in[x] = true;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!in[x]) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (poset.leq(y, x) && !in[y]) return false;
    }
  }
  return true;
}

inline bool is_upper_set(std::span<const std::size_t> subset, const FinitePoset& poset) {
  const std::size_t n = poset.size();
  std::vector<bool> in(n, false);
  for (std::size_t x : subset) in[x] = true;
  for (std::size_t x = 0; x < n; ++x) {
    if (!in[x]) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (poset.leq(x, y) && !in[y]) return false;
    }
  }
  return true;
}

}  // namespace krorder
