#include "bcp/girsanov.hpp"

#include <algorithm>
#include <cmath>

#include "bcp/errors.hpp"

namespace bcp {

namespace {

// Trapezoid node weights for a (possibly nonuniform) grid.
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (t[i + 1] - t[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

}  // namespace

GirsanovCoefficients compute_coefficients(const ReducedProblem& reduced) {
  const std::vector<double>& theta = reduced.theta;
  const std::vector<double>& t = reduced.t;
  if (theta.size() != t.size() || t.size() < 2)
    fail(ErrorCode::GridMismatch, "theta and time grid sizes differ");
  if (reduced.already_constant)
    fail(ErrorCode::DegenerateDrift,
         "drift gap is constant on the grid; no change of measure to apply");

  const std::vector<double> w = trapezoid_weights(t);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    s1 += w[i] * theta[i];
    s2 += w[i] * theta[i] * theta[i];
  }
  if (!std::isfinite(s1) || !std::isfinite(s2))
    fail(ErrorCode::NonfiniteIntegral, "theta integrals are not finite");

  GirsanovCoefficients c;
  c.i1 = s1;
  c.i2 = s2;
  c.horizon = reduced.horizon;
  c.alpha = s1 / c.horizon;
  const double var = s2 - s1 * s1 / c.horizon;

  const bool grid_constant =
      std::all_of(theta.begin(), theta.end(),
                  [&](double v) { return v == theta.front(); }) ||
      var <= 1e-12 * s2;
  if (grid_constant) {
    c.alpha_tilde = 0.0;
    c.i_cross = 0.0;
  } else {
    c.alpha_tilde = std::sqrt(std::max(0.0, var));
    c.theta_tilde.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
      c.theta_tilde[i] = (theta[i] - c.alpha) / c.alpha_tilde;
    double cross = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
      cross += w[i] * c.theta_tilde[i] * theta[i];
    c.i_cross = cross;
  }
  c.rho = (s2 > 0.0) ? s1 / (std::sqrt(c.horizon) * std::sqrt(s2)) : 0.0;
  c.rho = std::clamp(c.rho, -1.0, 1.0);
  if (!std::isfinite(c.alpha) || !std::isfinite(c.alpha_tilde) ||
      !std::isfinite(c.i_cross))
    fail(ErrorCode::NonfiniteIntegral, "coefficient evaluation is not finite");
  return c;
}

double decompose_endpoint(double w_end, double wbar_end,
                          const GirsanovCoefficients& coeffs) {
  if (coeffs.alpha_tilde <= 0.0)
    fail(ErrorCode::AlphaTildeZero,
         "endpoint decomposition needs a nonzero residual scale");
  return (wbar_end - coeffs.alpha * w_end) / coeffs.alpha_tilde;
}

double log_radon_nikodym(const std::vector<double>& path,
                         const GirsanovCoefficients& coeffs,
                         const ReducedProblem& reduced,
                         MeasureDirection direction) {
  if (path.size() != reduced.t.size())
    fail(ErrorCode::GridMismatch, "path is not sampled on the reduced grid");
  if (coeffs.i2 == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    s += reduced.theta[i] * (path[i + 1] - path[i]);
  if (!std::isfinite(s))
    fail(ErrorCode::NonfiniteIntegral, "stochastic integral is not finite");
  const double signed_part = (direction == MeasureDirection::p_to_q) ? -s : s;
  return signed_part - 0.5 * coeffs.i2;
}

double laplace_normal(double s) { return std::exp(0.5 * s * s); }

}  // namespace bcp
