#pragma once

namespace krorder {

// The single tolerance record. Modules read it through tolerances(); the CLI
// may replace it once at startup (--tol-file) before any work begins.
struct Tolerances {
  double feasibility = 1e-9;   // LP primal/dual residuals, ratio-test drop
  double pivot = 1e-13;        // smallest usable pivot in a basis factorization
  double gap = 1e-8;           // LP duality gap, KR duality cross-checks
  double mass = 1e-12;         // probability normalization, zero total mass
  double triangle = 1e-12;     // metric axioms, relative to the largest distance
  double compare = 1e-9;       // expectation comparisons, scaled by 1 + L(u) diam
  double witness = 1e-9;       // smallest margin accepted as strict separation
  double boundary = 1e-12;     // margins in (boundary, witness] are flagged
  double band = 1e-8;          // Farkas dichotomy reporting band
  double lipschitz = 1e-9;     // slack on Lipschitz bounds of returned potentials
  double prior = 1e-9;         // rank-one residuals and prior agreement
  double cdf = 1e-12;          // pointwise CDF comparison
  double portfolio_active = 1e-6;       // active-constraint detection at the optimum
  double portfolio_certificate = 1e-4;  // stationarity certificate, relative to K
};

namespace detail {
inline Tolerances& mutable_tolerances() {
  static Tolerances record;
  return record;
}
}  // namespace detail

inline const Tolerances& tolerances() { return detail::mutable_tolerances(); }

// Not thread-safe; call before spawning any work.
inline void set_tolerances(const Tolerances& t) { detail::mutable_tolerances() = t; }

}  // namespace krorder
