#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bcp {

/// One function evaluation with an attached standard error (zero for
/// deterministic integrands).
struct NoisyValue {
  double value = 0.0;
  double se = 0.0;
};

/// Knobs shared by the quadrature-backed estimators.  tail_z bounds the
/// standard-normal range kept when truncating a marginal integral; the mass
/// beyond it is folded into the reported error bound.
struct QuadratureControl {
  double tol = 1e-9;
  std::size_t max_intervals = 4096;
  double tail_z = 8.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;         // deterministic truncation bound
  double se = 0.0;            // propagated standard error of node noise
  std::size_t intervals = 0;  // accepted leaf intervals
  bool budget_exceeded = false;
};

/// Adaptive Simpson on [a, b] by interval bisection.  Refinement stops when
/// the local Richardson estimate |S2 - S1| / 15 falls below the interval's
/// share of tol, or — for noisy integrands — below the noise floor implied by
/// the node standard errors.  Exceeding max_intervals sets budget_exceeded and
/// returns the best estimate with the remaining discrepancy folded into error.
QuadratureResult integrate_adaptive(const std::function<NoisyValue(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t max_intervals);

/// Convenience wrapper for deterministic integrands.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::size_t max_intervals);

/// Trapezoid rule over uniformly spaced samples with spacing h.
double trapezoid_uniform(const std::vector<double>& y, double h);

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Hermite rule: sum_i w[i] f(x[i]) ~ integral of exp(-x^2) f(x) dx.
/// Cached per n; thread-safe.
const GaussRule& gauss_hermite(std::size_t n);

/// Gauss-Legendre rule on [-1, 1].  Cached per n; thread-safe.
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace bcp
