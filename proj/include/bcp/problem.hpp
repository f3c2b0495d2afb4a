#pragma once

#include <cstddef>
#include <vector>

#include "bcp/curves.hpp"

namespace bcp {

/// First-passage problem for Z_t = drift(t) + sigma * W_t against an upper
/// boundary, on [0, horizon].  The process must start strictly below the
/// boundary: drift(0) < boundary(0).
struct OneSidedProblem {
  BoundaryCurve drift = BoundaryCurve::constant(0.0);
  BoundaryCurve boundary = BoundaryCurve::constant(1.0);
  double sigma = 1.0;
  double horizon = 1.0;
  std::size_t grid_size = 512;  // nodes on [0, horizon], >= 2
};

/// Exit problem against an upper and a lower boundary.  The lower boundary is
/// restricted to deviate from the upper one by an exact linear gap:
///   (lower(t) - lower(0)) - (upper(t) - upper(0)) = beta * t
/// within tol_beta (default 1e-9 * (1 + |beta| * horizon)).
struct TwoSidedProblem {
  BoundaryCurve drift = BoundaryCurve::constant(0.0);
  BoundaryCurve upper = BoundaryCurve::constant(1.0);
  BoundaryCurve lower = BoundaryCurve::constant(-1.0);
  double beta = 0.0;
  double sigma = 1.0;
  double horizon = 1.0;
  std::size_t grid_size = 512;
  double tol_beta = -1.0;  // < 0 selects the default
};

/// Canonical reduced form: Y_t = u(t) + W_t with W standard Brownian motion,
/// constant upper level b > 0, u(0) = 0.  Two-sided problems additionally get
/// a linear lower level c(t) = c0 + c_slope * t with c0 < 0.
/// theta is du/dt sampled on the same grid.
struct ReducedProblem {
  double b = 1.0;
  double c0 = 0.0;       // two-sided only
  double c_slope = 0.0;  // two-sided only
  bool two_sided = false;
  double horizon = 1.0;
  std::vector<double> t;      // uniform grid, grid_size nodes
  std::vector<double> u;      // drift-minus-boundary deviation, u[0] == 0
  std::vector<double> theta;  // du/dt on the grid
  bool already_constant = false;  // max |u| negligible relative to b

  double lower_at(double s) const { return c0 + c_slope * s; }
  double u_end() const { return u.back(); }
  std::size_t grid_size() const { return t.size(); }
};

struct NovikovReport {
  double theta_sq_integral = 0.0;  // trapezoid of theta^2 over [0, horizon]
  bool pass = false;               // integral finite
  bool degenerate = false;         // u identically zero on the grid
};

ReducedProblem reduce_one_sided(const OneSidedProblem& problem);
ReducedProblem reduce_two_sided(const TwoSidedProblem& problem);

/// du/dt by second-order finite differences (central in the interior,
/// one-sided at the endpoints) on a uniform grid.
std::vector<double> sample_theta(const std::vector<double>& t,
                                 const std::vector<double>& u);

NovikovReport validate_novikov(const ReducedProblem& reduced);

/// Rebuild the reduced problem on an n-node uniform grid by resampling its
/// curves; used when an estimator needs a different path resolution.
ReducedProblem resample(const ReducedProblem& reduced, std::size_t n);

}  // namespace bcp
