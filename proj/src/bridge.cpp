#include "bcp/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcp/errors.hpp"

namespace bcp {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

void require_finite_time(double T) {
  if (!std::isfinite(T) || T <= 0.0)
    fail(ErrorCode::ConfigInvalid, "time horizon must be finite and positive");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double bridge_cross_one_sided(double b, double T, double y) {
  require_finite_time(T);
  if (!std::isfinite(b) || b <= 0.0)
    fail(ErrorCode::InvalidLevel, "upper level must be finite and positive");
  if (!std::isfinite(y)) fail(ErrorCode::ConfigInvalid, "endpoint must be finite");
  if (y >= b) return 1.0;
  return std::exp(-2.0 * b * (b - y) / T);
}

namespace {

/// Shared series evaluation; returns the raw (unclamped) partial sum in
/// `out.noncross` along with the truncation diagnostics.
TwoLineSeries two_line_series_core(double T, double y, double l0, double lT,
                                   double u0, double uT,
                                   const SeriesControl& ctrl) {
  TwoLineSeries out;
  const double width0 = u0 - l0;
  const double widthT = uT - lT;
  // Shear away the lower slope: in the sheared frame the lower line is the
  // constant l0, the upper line has intercept u0 and slope beta, and the
  // bridge endpoint moves to ys.
  const double ys = y - (lT - l0);
  const double a = u0;
  const double d = width0;
  const double beta = (widthT - width0) / T;

  auto even_term = [&](int k) {
    const double kk = static_cast<double>(k);
    return std::exp(2.0 * kk * beta * (a - (kk + 1.0) * d) +
                    (2.0 * kk * d / T) * (ys - kk * d));
  };
  auto odd_term = [&](int k) {
    const double kk = static_cast<double>(k);
    const double e = a - kk * d;
    return std::exp(2.0 * (kk - 1.0) * beta * (a - kk * d) -
                    (2.0 / T) * e * (e - ys));
  };

  double sum = 1.0 - odd_term(0) - odd_term(1);
  int rings = 0;
  bool converged = false;
  for (int j = 1; j <= ctrl.j_max; ++j) {
    const double e_pos = even_term(j);
    const double e_neg = even_term(-j);
    const double o_pos = odd_term(j + 1);
    const double o_neg = odd_term(-j);
    sum += e_pos + e_neg - o_pos - o_neg;
    rings = j;
    const double mag =
        std::max(std::max(e_pos, e_neg), std::max(o_pos, o_neg));
    if (mag < ctrl.tol) {
      converged = true;
      break;
    }
  }
  out.cap_hit = !converged;
  out.rings = rings;
  const double q = width0 * widthT / T;
  const double r = std::exp(-2.0 * (2.0 * rings + 1.0) * q);
  out.remainder_bound =
      (r < 1.0) ? 4.0 * std::exp(-2.0 * rings * rings * q) / (1.0 - r)
                : std::numeric_limits<double>::infinity();
  out.noncross = sum;
  return out;
}

void require_bracketing_start(double l0, double u0) {
  if (!(l0 < 0.0) || !(u0 > 0.0))
    fail(ErrorCode::InvalidLevel,
         "bridge must start strictly between the lines (lower < 0 < upper)");
}

}  // namespace

TwoLineSeries two_line_bridge_noncross(double T, double y, double l0, double lT,
                                       double u0, double uT,
                                       const SeriesControl& ctrl) {
  require_finite_time(T);
  require_bracketing_start(l0, u0);
  if (y <= lT || y >= uT) return TwoLineSeries{};  // outside: crossing certain
  TwoLineSeries out = two_line_series_core(T, y, l0, lT, u0, uT, ctrl);
  out.noncross = clamp01(out.noncross);
  return out;
}

double bridge_cross_two_sided(double b, double c0, double c_slope, double T,
                              double y, const SeriesControl& ctrl,
                              TwoLineSeries* detail) {
  require_finite_time(T);
  if (!std::isfinite(b) || b <= 0.0)
    fail(ErrorCode::InvalidLevel, "upper level must be finite and positive");
  if (!std::isfinite(c0) || c0 >= 0.0)
    fail(ErrorCode::InvalidLevel, "lower intercept must be finite and negative");
  if (!std::isfinite(c_slope))
    fail(ErrorCode::ConfigInvalid, "lower slope must be finite");
  if (!std::isfinite(y)) fail(ErrorCode::ConfigInvalid, "endpoint must be finite");
  const double cT = c0 + c_slope * T;
  if (cT >= b)
    fail(ErrorCode::BoundariesCross,
         "lower line meets the upper level inside the horizon");
  if (y >= b || y <= cT) {
    if (detail) *detail = TwoLineSeries{};
    return 1.0;
  }
  const TwoLineSeries s = two_line_bridge_noncross(T, y, c0, cT, b, b, ctrl);
  if (detail) *detail = s;
  return clamp01(1.0 - s.noncross);
}

double linear_one_sided_marginal(double a, double b, double T) {
  require_finite_time(T);
  if (!std::isfinite(b) || b <= 0.0)
    fail(ErrorCode::InvalidLevel, "level intercept must be finite and positive");
  if (!std::isfinite(a)) fail(ErrorCode::ConfigInvalid, "slope must be finite");
  const double s = std::sqrt(T);
  return clamp01(normal_cdf(-(a * T + b) / s) +
                 std::exp(-2.0 * a * b) * normal_cdf((a * T - b) / s));
}

MarginalValue two_line_marginal(double l0, double l_slope, double u0,
                                double u_slope, double T,
                                const SeriesControl& ctrl,
                                const QuadratureControl& quad) {
  require_finite_time(T);
  if (!(std::isfinite(l0) && l0 < 0.0) || !(std::isfinite(u0) && u0 > 0.0))
    fail(ErrorCode::InvalidLevel,
         "lines must bracket the start (lower < 0 < upper)");
  if (!std::isfinite(l_slope) || !std::isfinite(u_slope))
    fail(ErrorCode::ConfigInvalid, "line slopes must be finite");
  const double lT = l0 + l_slope * T;
  const double uT = u0 + u_slope * T;
  if (lT >= uT)
    fail(ErrorCode::BoundariesCross, "lines meet inside the horizon");

  const double s = std::sqrt(T);
  // Endpoint already outside a line: crossing certain.
  const double mass_below = normal_cdf(lT / s);
  const double mass_above = normal_cdf(-uT / s);

  const double lo = std::max(lT, -quad.tail_z * s);
  const double hi = std::min(uT, quad.tail_z * s);
  double series_remainder = 0.0;
  double value = mass_below + mass_above;
  double error = 0.0;
  if (lo < hi) {
    auto integrand = [&](double x) {
      const TwoLineSeries ts = two_line_bridge_noncross(T, x, l0, lT, u0, uT, ctrl);
      series_remainder = std::max(series_remainder, ts.remainder_bound);
      return normal_pdf(x / s) / s * (1.0 - ts.noncross);
    };
    const QuadratureResult qr = integrate_adaptive(
        std::function<double(double)>(integrand), lo, hi, quad.tol,
        quad.max_intervals);
    value += qr.value;
    error += qr.error + series_remainder;
  }
  // Interior mass discarded by the tail cut: each slice carries at most its
  // Gaussian mass, which is below the normal tail at tail_z.
  const double cut_low = std::max(0.0, normal_cdf(lo / s) - mass_below);
  const double cut_high = std::max(0.0, normal_cdf(-hi / s) - mass_above);
  value += cut_low + cut_high;  // crossing is near-certain next to the lines
  error += cut_low + cut_high;
  MarginalValue out;
  out.value = clamp01(value);
  out.error = error;
  return out;
}

MarginalValue linear_two_sided_marginal(double b, double c0, double c_slope,
                                        double T, const SeriesControl& ctrl,
                                        const QuadratureControl& quad) {
  require_finite_time(T);
  if (!std::isfinite(b) || b <= 0.0)
    fail(ErrorCode::InvalidLevel, "upper level must be finite and positive");
  if (!std::isfinite(c0) || c0 >= 0.0)
    fail(ErrorCode::InvalidLevel, "lower intercept must be finite and negative");
  return two_line_marginal(c0, c_slope, b, 0.0, T, ctrl, quad);
}

}  // namespace bcp
