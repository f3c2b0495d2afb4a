#pragma once

#include <cstddef>
#include <vector>

namespace bcp {

enum class CurveKind {
  constant,
  linear,
  polynomial,
  sinusoid,
  piecewise_linear,
  sampled_grid,
};

const char* curve_kind_name(CurveKind kind);

/// Deterministic time-varying coefficient curve on [0, T]: used for drifts and
/// boundaries.  All kinds evaluate continuously; the knot-based kinds
/// (piecewise_linear, sampled_grid) interpolate linearly between knots.
struct BoundaryCurve {
  CurveKind kind = CurveKind::constant;

  // constant:   coeffs = {level}
  // linear:     coeffs = {intercept, slope}
  // polynomial: coeffs = {c0, c1, ...}, value = sum c_k t^k
  // sinusoid:   coeffs = {offset, amplitude, angular_frequency, phase},
  //             value = offset + amplitude * sin(angular_frequency * t + phase)
  std::vector<double> coeffs;

  // piecewise_linear / sampled_grid knots (times strictly increasing)
  std::vector<double> times;
  std::vector<double> values;

  double value(double t) const;

  /// d/dt of the curve.  Only valid when has_analytic_derivative().
  double derivative(double t) const;

  /// True for the closed-form kinds (constant, linear, polynomial, sinusoid).
  /// Knot-based kinds fall back to finite differences downstream.
  bool has_analytic_derivative() const;

  /// Knot kinds must cover [0, horizon]; closed-form kinds always do.
  bool covers(double horizon) const;

  static BoundaryCurve constant(double level);
  static BoundaryCurve linear(double intercept, double slope);
  static BoundaryCurve polynomial(std::vector<double> coefficients);
  static BoundaryCurve sinusoid(double offset, double amplitude,
                                double angular_frequency, double phase = 0.0);
  static BoundaryCurve piecewise_linear(std::vector<double> times,
                                        std::vector<double> values);
  static BoundaryCurve sampled_grid(std::vector<double> times,
                                    std::vector<double> values);
};

/// n equally spaced nodes on [0, horizon] (n >= 2).
std::vector<double> uniform_grid(double horizon, std::size_t n);

}  // namespace bcp
