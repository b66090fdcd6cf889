#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "krorder/core.hpp"

namespace krorder {

/// A probability measure on a finite metric space (every such measure has a
/// finite first moment, so this is all of Delta_1 for finite X).
class ProbMeasure {
 public:
  ProbMeasure() = default;
  ProbMeasure(MetricSpace space, std::vector<double> weights)
      : space_(std::move(space)), w_(std::move(weights)) {
    require_length(space_, w_.size(), "probability vector");
    for (std::size_t i = 0; i < w_.size(); ++i) {
      if (!(w_[i] >= 0.0) || !std::isfinite(w_[i])) {
        throw Error(ErrorCode::NotProbability,
                    "weight " + std::to_string(i) + " is negative or not finite");
      }
    }
    const double total = compensated_sum(w_);
    if (std::abs(total - 1.0) > tolerances().mass) {
      throw Error(ErrorCode::NotProbability, "weights sum to " + std::to_string(total));
    }
  }

  static ProbMeasure dirac(const MetricSpace& space, std::size_t point) {
    if (point >= space.size()) throw Error(ErrorCode::LengthMismatch, "dirac point out of range");
    std::vector<double> w(space.size(), 0.0);
    w[point] = 1.0;
    return {space, std::move(w)};
  }

  static ProbMeasure uniform(const MetricSpace& space) {
    std::vector<double> w(space.size(), 1.0 / static_cast<double>(space.size()));
    return {space, std::move(w)};
  }

  const MetricSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const { return w_.size(); }

  // Mass of a subset of points.
  double mass_of(std::span<const std::size_t> subset) const {
    std::vector<double> terms;
    terms.reserve(subset.size());
    for (std::size_t i : subset) terms.push_back(w_[i]);
    return compensated_sum(terms);
  }

  bool operator==(const ProbMeasure& o) const { return space_.same_as(o.space_) && w_ == o.w_; }

 private:
  MetricSpace space_;
  std::vector<double> w_;
};

/// A finite signed measure; flagged as a KR element when its total mass is zero.
class SignedMeasure {
 public:
  SignedMeasure() = default;
  SignedMeasure(MetricSpace space, std::vector<double> weights)
      : space_(std::move(space)), w_(std::move(weights)) {
    require_length(space_, w_.size(), "signed measure");
    for (double x : w_) {
      if (!std::isfinite(x)) throw Error(ErrorCode::MalformedInput, "non-finite signed weight");
    }
  }

  const MetricSpace& space() const { return space_; }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  std::size_t size() const { return w_.size(); }

  double total_mass() const { return compensated_sum(w_); }

  double positive_mass() const {
    std::vector<double> pos;
    for (double x : w_) {
      if (x > 0.0) pos.push_back(x);
    }
    return compensated_sum(pos);
  }

  // Zero total mass, scaled by the size of the measure.
  bool is_kr_element() const {
    double l1 = 0.0;
    for (double x : w_) l1 += std::abs(x);
    return std::abs(total_mass()) <= tolerances().mass * std::max(1.0, l1);
  }

  bool is_zero() const {
    for (double x : w_) {
      if (x != 0.0) return false;
    }
    return true;
  }

  SignedMeasure scaled(double a) const {
    std::vector<double> w = w_;
    for (double& x : w) x *= a;
    return {space_, std::move(w)};
  }

  SignedMeasure operator-() const { return scaled(-1.0); }

  friend SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b) {
    require_same_space(a.space_, b.space_);
    std::vector<double> w = a.w_;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += b.w_[i];
    return {a.space_, std::move(w)};
  }

 private:
  MetricSpace space_;
  std::vector<double> w_;
};

/// (1 - lambda) p + lambda q. Tiny weights are kept, never pruned.
inline ProbMeasure mix(const ProbMeasure& p, const ProbMeasure& q, double lambda) {
  require_same_space(p.space(), q.space());
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::LambdaOutOfRange, "mixing weight " + std::to_string(lambda));
  }
  if (lambda == 0.0) return p;
  if (lambda == 1.0) return q;
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = (1.0 - lambda) * p[i] + lambda * q[i];
  }
  return {p.space(), std::move(w)};
}

/// alpha (p - q), an element of KR(X).
inline SignedMeasure kr_element(const ProbMeasure& p, const ProbMeasure& q, double alpha = 1.0) {
  require_same_space(p.space(), q.space());
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::NegativeScale, "scale " + std::to_string(alpha));
  }
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha * (p[i] - q[i]);
  return {p.space(), std::move(w)};
}

/// Jordan-style split of a zero-mass measure: mu = alpha (p - q) with alpha
/// the positive mass. Returns nothing for the zero measure.
struct JordanSplit {
  double alpha = 0.0;
  ProbMeasure positive;
  ProbMeasure negative;
};

inline std::optional<JordanSplit> jordan_split(const SignedMeasure& mu) {
  if (!mu.is_kr_element()) {
    throw Error(ErrorCode::NonzeroTotalMass, "total mass " + std::to_string(mu.total_mass()));
  }
  const std::size_t n = mu.size();
  std::vector<double> pos(n, 0.0), neg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] > 0.0) pos[i] = mu[i];
    if (mu[i] < 0.0) neg[i] = -mu[i];
  }
  const double alpha = compensated_sum(pos);
  const double beta = compensated_sum(neg);
  if (alpha == 0.0 || beta == 0.0) return std::nullopt;
  for (double& x : pos) x /= alpha;
  for (double& x : neg) x /= beta;
  // Renormalized parts can miss 1 by an ulp; ProbMeasure tolerates that.
  return JordanSplit{alpha, ProbMeasure(mu.space(), std::move(pos)),
                     ProbMeasure(mu.space(), std::move(neg))};
}

inline double expectation(const LipschitzFunction& u, const ProbMeasure& p) {
  require_same_space(u.space(), p.space());
  return compensated_dot(u.values(), p.weights());
}

inline double expectation(const LipschitzFunction& u, const SignedMeasure& m) {
  require_same_space(u.space(), m.space());
  return compensated_dot(u.values(), m.weights());
}

// Integral of u against p - q without materializing the difference.
inline double expectation_gap(const LipschitzFunction& u, const ProbMeasure& p,
                              const ProbMeasure& q) {
  require_same_space(u.space(), p.space());
  require_same_space(p.space(), q.space());
  std::vector<double> terms(2 * p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    terms[2 * i] = u[i] * p[i];
    terms[2 * i + 1] = -u[i] * q[i];
  }
  return compensated_sum(terms);
}

}  // namespace krorder
