#pragma once

#include "bcp/quadrature.hpp"

namespace bcp {

/// Standard normal CDF, accurate in both tails (erfc-based).
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Truncation control for the two-boundary reflection series.
struct SeriesControl {
  double tol = 1e-12;
  int j_max = 64;
};

/// Diagnostics from one evaluation of the two-line reflection series.
struct TwoLineSeries {
  double noncross = 0.0;       // P(bridge stays strictly between the lines)
  double remainder_bound = 0.0;  // bound on the truncated tail of the series
  int rings = 0;               // image rings actually summed
  bool cap_hit = false;        // stopped by j_max instead of tol
};

/// P(sup of a standard Brownian bridge from (0,0) to (T, y) reaches the
/// constant level b > 0).  Returns 1 when y >= b.
double bridge_cross_one_sided(double b, double T, double y);

/// P(a standard Brownian bridge from (0,0) to (T, y) leaves the region
/// between the constant upper level b > 0 and the lower line c0 + c_slope*t,
/// c0 < 0).  Computed as one minus the two-line reflection series; `detail`
/// (optional) receives the series diagnostics.
double bridge_cross_two_sided(double b, double c0, double c_slope, double T,
                              double y, const SeriesControl& ctrl = {},
                              TwoLineSeries* detail = nullptr);

/// Core reflection series: probability that a standard Brownian bridge from
/// (0,0) to (T, y) stays strictly between the lower line running l0 -> lT and
/// the upper line running u0 -> uT (endpoint values at t = 0 and t = T).
/// Requires l0 < 0 < u0 and lT < y < uT.
TwoLineSeries two_line_bridge_noncross(double T, double y, double l0, double lT,
                                       double u0, double uT,
                                       const SeriesControl& ctrl);

/// P(sup_{t<=T} W_t - a*t >= b) for a standard Brownian motion W, i.e. the
/// chance of touching the line b + a*t, b > 0, by time T.  Closed form.
double linear_one_sided_marginal(double a, double b, double T);

/// A marginal computed by integrating a conditional law against the Gaussian
/// endpoint density: value plus a deterministic error bound (series
/// truncation + quadrature + discarded tail mass).
struct MarginalValue {
  double value = 0.0;
  double error = 0.0;
};

/// P(a standard Brownian motion leaves the region between the constant upper
/// level b > 0 and the lower line c0 + c_slope*t, c0 < 0, by time T).
MarginalValue linear_two_sided_marginal(double b, double c0, double c_slope,
                                        double T, const SeriesControl& ctrl = {},
                                        const QuadratureControl& quad = {});

/// General two-line escape probability for a standard Brownian motion:
/// P(W leaves the region between lower line l0 + l_slope*t and upper line
/// u0 + u_slope*t by time T), with l0 < 0 < u0.
MarginalValue two_line_marginal(double l0, double l_slope, double u0,
                                double u_slope, double T,
                                const SeriesControl& ctrl = {},
                                const QuadratureControl& quad = {});

}  // namespace bcp
