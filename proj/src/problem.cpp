#include "bcp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcp/errors.hpp"

namespace bcp {

namespace {

constexpr double kConstantTolScale = 1e-12;

void check_common(double sigma, double horizon, std::size_t grid_size) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::SigmaNonpositive, "sigma must be finite and > 0");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::ConfigInvalid, "horizon must be finite and > 0");
  }
  if (grid_size < 2) {
    fail(ErrorCode::ConfigInvalid, "grid_size must be >= 2");
  }
}

void check_coverage(const BoundaryCurve& curve, double horizon, const char* name) {
  if (!curve.covers(horizon)) {
    fail(ErrorCode::ConfigInvalid,
         std::string(name) + " knots must cover [0, horizon]");
  }
}

std::vector<double> sample_curve(const BoundaryCurve& curve,
                                 const std::vector<double>& t, const char* name) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i] = curve.value(t[i]);
    if (!std::isfinite(out[i])) {
      fail(ErrorCode::NonfiniteCurve,
           std::string(name) + " is not finite at t = " + std::to_string(t[i]));
    }
  }
  return out;
}

// theta from analytic curve derivatives when both curves support them,
// otherwise second-order finite differences of u.
std::vector<double> theta_for(const BoundaryCurve& drift,
                              const BoundaryCurve& upper, double sigma,
                              const std::vector<double>& t,
                              const std::vector<double>& u) {
  if (drift.has_analytic_derivative() && upper.has_analytic_derivative()) {
    std::vector<double> theta(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      theta[i] = (drift.derivative(t[i]) - upper.derivative(t[i])) / sigma;
      if (!std::isfinite(theta[i])) {
        fail(ErrorCode::NonfiniteDerivative,
             "analytic derivative not finite at t = " + std::to_string(t[i]));
      }
    }
    return theta;
  }
  return sample_theta(t, u);
}

bool max_abs_below(const std::vector<double>& v, double tol) {
  for (double x : v) {
    if (std::fabs(x) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace

ReducedProblem reduce_one_sided(const OneSidedProblem& problem) {
  check_common(problem.sigma, problem.horizon, problem.grid_size);
  check_coverage(problem.drift, problem.horizon, "drift");
  check_coverage(problem.boundary, problem.horizon, "boundary");

  std::vector<double> t = uniform_grid(problem.horizon, problem.grid_size);
  std::vector<double> mu = sample_curve(problem.drift, t, "drift");
  std::vector<double> g = sample_curve(problem.boundary, t, "boundary");

  if (!(mu[0] < g[0])) {
    fail(ErrorCode::StartOnOrAboveBoundary,
         "drift(0) must be strictly below boundary(0)");
  }

  ReducedProblem reduced;
  reduced.two_sided = false;
  reduced.horizon = problem.horizon;
  reduced.b = (g[0] - mu[0]) / problem.sigma;
  reduced.t = t;
  reduced.u.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    reduced.u[i] = (mu[i] - mu[0] - g[i] + g[0]) / problem.sigma;
  }
  reduced.u[0] = 0.0;
  reduced.theta = theta_for(problem.drift, problem.boundary, problem.sigma, t,
                            reduced.u);
  reduced.already_constant =
      max_abs_below(reduced.u, kConstantTolScale * (1.0 + std::fabs(reduced.b)));
  return reduced;
}

ReducedProblem reduce_two_sided(const TwoSidedProblem& problem) {
  check_common(problem.sigma, problem.horizon, problem.grid_size);
  check_coverage(problem.drift, problem.horizon, "drift");
  check_coverage(problem.upper, problem.horizon, "upper");
  check_coverage(problem.lower, problem.horizon, "lower");

  std::vector<double> t = uniform_grid(problem.horizon, problem.grid_size);
  std::vector<double> mu = sample_curve(problem.drift, t, "drift");
  std::vector<double> up = sample_curve(problem.upper, t, "upper");
  std::vector<double> lo = sample_curve(problem.lower, t, "lower");

  if (!(lo[0] < mu[0] && mu[0] < up[0])) {
    fail(ErrorCode::OrderingViolated,
         "start ordering lower(0) < drift(0) < upper(0) violated");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(lo[i] < up[i])) {
      fail(ErrorCode::OrderingViolated, "boundaries touch at t = " +
                                            std::to_string(t[i]));
    }
  }

  double tol_beta = problem.tol_beta;
  if (tol_beta < 0.0) {
    tol_beta = 1e-9 * (1.0 + std::fabs(problem.beta) * problem.horizon);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    double gap = (lo[i] - lo[0]) - (up[i] - up[0]) - problem.beta * t[i];
    if (std::fabs(gap) > tol_beta) {
      fail(ErrorCode::BetaRestrictionViolated,
           "lower boundary deviates from upper + beta*t by " +
               std::to_string(gap) + " at t = " + std::to_string(t[i]));
    }
  }

  ReducedProblem reduced;
  reduced.two_sided = true;
  reduced.horizon = problem.horizon;
  reduced.b = (up[0] - mu[0]) / problem.sigma;
  reduced.c0 = (lo[0] - mu[0]) / problem.sigma;
  reduced.c_slope = problem.beta / problem.sigma;
  reduced.t = t;
  reduced.u.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    reduced.u[i] = (mu[i] - mu[0] - up[i] + up[0]) / problem.sigma;
  }
  reduced.u[0] = 0.0;
  reduced.theta =
      theta_for(problem.drift, problem.upper, problem.sigma, t, reduced.u);
  reduced.already_constant =
      max_abs_below(reduced.u, kConstantTolScale * (1.0 + std::fabs(reduced.b)));

  // reduced-frame sanity: the strip must stay open over the horizon
  if (reduced.lower_at(problem.horizon) >= reduced.b) {
    fail(ErrorCode::BoundariesCross,
         "lower boundary reaches the upper level before the horizon");
  }
  return reduced;
}

std::vector<double> sample_theta(const std::vector<double>& t,
                                 const std::vector<double>& u) {
  if (t.size() != u.size() || t.size() < 2) {
    fail(ErrorCode::GridMismatch, "theta sampling needs matching grids, n >= 2");
  }
  std::size_t n = t.size();
  double h = t[1] - t[0];
  std::vector<double> theta(n);
  if (n == 2) {
    theta[0] = theta[1] = (u[1] - u[0]) / h;
  } else {
    theta[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      theta[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    theta[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
  }
  for (double v : theta) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonfiniteDerivative, "finite-difference theta not finite");
    }
  }
  return theta;
}

NovikovReport validate_novikov(const ReducedProblem& reduced) {
  NovikovReport report;
  double h = reduced.t.size() > 1 ? reduced.t[1] - reduced.t[0] : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < reduced.theta.size(); ++i) {
    acc += 0.5 * h *
           (reduced.theta[i] * reduced.theta[i] +
            reduced.theta[i + 1] * reduced.theta[i + 1]);
  }
  report.theta_sq_integral = acc;
  report.pass = std::isfinite(acc);
  report.degenerate = max_abs_below(
      reduced.u, kConstantTolScale * (1.0 + std::fabs(reduced.b)));
  return report;
}

ReducedProblem resample(const ReducedProblem& reduced, std::size_t n) {
  if (n < 2) {
    fail(ErrorCode::ConfigInvalid, "resample needs n >= 2");
  }
  if (n == reduced.t.size()) {
    return reduced;
  }
  ReducedProblem out = reduced;
  out.t = uniform_grid(reduced.horizon, n);
  out.u.resize(n);
  out.theta.resize(n);
  auto lerp = [&](const std::vector<double>& y, double s) {
    double pos = s / reduced.horizon * static_cast<double>(reduced.t.size() - 1);
    std::size_t lo = static_cast<std::size_t>(
        std::clamp(pos, 0.0, static_cast<double>(reduced.t.size() - 2)));
    double w = pos - static_cast<double>(lo);
    return y[lo] + w * (y[lo + 1] - y[lo]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] = lerp(reduced.u, out.t[i]);
    out.theta[i] = lerp(reduced.theta, out.t[i]);
  }
  out.u[0] = 0.0;
  out.u[n - 1] = reduced.u.back();  // keep the endpoint exact
  return out;
}

}  // namespace bcp
