#include "bcp/curves.hpp"

#include <algorithm>
#include <cmath>

#include "bcp/errors.hpp"

namespace bcp {

const char* curve_kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::constant: return "constant";
    case CurveKind::linear: return "linear";
    case CurveKind::polynomial: return "polynomial";
    case CurveKind::sinusoid: return "sinusoid";
    case CurveKind::piecewise_linear: return "piecewise_linear";
    case CurveKind::sampled_grid: return "sampled_grid";
  }
  return "unknown";
}

namespace {

// Locate the knot interval containing t and interpolate linearly.  Outside the
// knot range the curve is clamped to the end segments' linear extension being
// unnecessary: callers validate coverage of [0, T] first.
double interp_knots(const std::vector<double>& ts, const std::vector<double>& vs,
                    double t) {
  if (t <= ts.front()) {
    return vs.front();
  }
  if (t >= ts.back()) {
    return vs.back();
  }
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  std::size_t lo = hi - 1;
  double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return vs[lo] + w * (vs[hi] - vs[lo]);
}

void check_knots(const std::vector<double>& ts, const std::vector<double>& vs,
                 const char* what) {
  if (ts.size() < 2 || ts.size() != vs.size()) {
    fail(ErrorCode::ConfigInvalid,
         std::string(what) + " requires matching times/values with >= 2 knots");
  }
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (!(ts[i] < ts[i + 1])) {
      fail(ErrorCode::ConfigInvalid,
           std::string(what) + " knot times must be strictly increasing");
    }
  }
}

}  // namespace

double BoundaryCurve::value(double t) const {
  switch (kind) {
    case CurveKind::constant:
      return coeffs[0];
    case CurveKind::linear:
      return coeffs[0] + coeffs[1] * t;
    case CurveKind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 0;) {
        acc = acc * t + coeffs[i];
      }
      return acc;
    }
    case CurveKind::sinusoid:
      return coeffs[0] + coeffs[1] * std::sin(coeffs[2] * t + coeffs[3]);
    case CurveKind::piecewise_linear:
    case CurveKind::sampled_grid:
      return interp_knots(times, values, t);
  }
  return 0.0;
}

double BoundaryCurve::derivative(double t) const {
  switch (kind) {
    case CurveKind::constant:
      return 0.0;
    case CurveKind::linear:
      return coeffs[1];
    case CurveKind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 1;) {
        acc = acc * t + coeffs[i] * static_cast<double>(i);
      }
      return acc;
    }
    case CurveKind::sinusoid:
      return coeffs[1] * coeffs[2] * std::cos(coeffs[2] * t + coeffs[3]);
    case CurveKind::piecewise_linear:
    case CurveKind::sampled_grid:
      fail(ErrorCode::NonfiniteDerivative,
           "knot-based curves have no analytic derivative");
  }
  return 0.0;
}

bool BoundaryCurve::has_analytic_derivative() const {
  switch (kind) {
    case CurveKind::constant:
    case CurveKind::linear:
    case CurveKind::polynomial:
    case CurveKind::sinusoid:
      return true;
    case CurveKind::piecewise_linear:
    case CurveKind::sampled_grid:
      return false;
  }
  return false;
}

bool BoundaryCurve::covers(double horizon) const {
  if (kind == CurveKind::piecewise_linear || kind == CurveKind::sampled_grid) {
    return times.front() <= 0.0 && times.back() >= horizon;
  }
  return true;
}

BoundaryCurve BoundaryCurve::constant(double level) {
  return BoundaryCurve{CurveKind::constant, {level}, {}, {}};
}

BoundaryCurve BoundaryCurve::linear(double intercept, double slope) {
  return BoundaryCurve{CurveKind::linear, {intercept, slope}, {}, {}};
}

BoundaryCurve BoundaryCurve::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) {
    fail(ErrorCode::ConfigInvalid, "polynomial needs at least one coefficient");
  }
  return BoundaryCurve{CurveKind::polynomial, std::move(coefficients), {}, {}};
}

BoundaryCurve BoundaryCurve::sinusoid(double offset, double amplitude,
                                      double angular_frequency, double phase) {
  return BoundaryCurve{
      CurveKind::sinusoid, {offset, amplitude, angular_frequency, phase}, {}, {}};
}

BoundaryCurve BoundaryCurve::piecewise_linear(std::vector<double> ts,
                                              std::vector<double> vs) {
  check_knots(ts, vs, "piecewise_linear");
  return BoundaryCurve{CurveKind::piecewise_linear, {}, std::move(ts), std::move(vs)};
}

BoundaryCurve BoundaryCurve::sampled_grid(std::vector<double> ts,
                                          std::vector<double> vs) {
  check_knots(ts, vs, "sampled_grid");
  return BoundaryCurve{CurveKind::sampled_grid, {}, std::move(ts), std::move(vs)};
}

std::vector<double> uniform_grid(double horizon, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.back() = horizon;  // avoid rounding drift at the right endpoint
  return t;
}

}  // namespace bcp
