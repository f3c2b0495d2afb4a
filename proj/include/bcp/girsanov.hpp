#pragma once

#include <vector>

#include "bcp/problem.hpp"

namespace bcp {

/// Change-of-measure coefficients for a reduced problem: integrals of the
/// tilt rate theta over the horizon, the projection of the tilted endpoint
/// onto the driving endpoint (alpha), and the residual scale (alpha_tilde)
/// with its normalized rate curve theta_tilde.
struct GirsanovCoefficients {
  double i1 = 0.0;           // integral of theta
  double i2 = 0.0;           // integral of theta^2
  double horizon = 0.0;
  double rho = 0.0;          // endpoint correlation, in [-1, 1]
  double alpha = 0.0;        // i1 / horizon
  double alpha_tilde = 0.0;  // sqrt(i2 - i1^2/horizon); 0 iff theta constant
  double i_cross = 0.0;      // integral of theta_tilde * theta
  std::vector<double> theta_tilde;  // (theta - alpha)/alpha_tilde; empty when
                                    // alpha_tilde == 0

  bool constant_theta() const { return alpha_tilde == 0.0; }
};

/// Which way a path log-weight converts between the sampling measures: under
/// p_to_q the path argument is a Brownian motion under the original measure;
/// under q_to_p it is the tilted process simulated as a Brownian motion.
enum class MeasureDirection { p_to_q, q_to_p };

/// Trapezoid integrals of theta on the reduced grid.  Throws DegenerateDrift
/// when the drift gap is grid-constant (theta identically zero) and
/// NonfiniteIntegral when the integrals do not evaluate finitely.
GirsanovCoefficients compute_coefficients(const ReducedProblem& reduced);

/// Solves the endpoint decomposition wbar = alpha*w + alpha_tilde*wtilde for
/// the residual wtilde.  Throws AlphaTildeZero when alpha_tilde == 0.
double decompose_endpoint(double w_end, double wbar_end,
                          const GirsanovCoefficients& coeffs);

/// Log Radon-Nikodym weight along one sampled path, with left-point (Ito)
/// discretization of the stochastic integral: +/- sum(theta_i dW_i) - i2/2,
/// the sign chosen by direction.  The path must live on the reduced grid.
double log_radon_nikodym(const std::vector<double>& path,
                         const GirsanovCoefficients& coeffs,
                         const ReducedProblem& reduced,
                         MeasureDirection direction);

/// Two-sided Laplace transform of a standard normal at s: exp(s^2/2).
double laplace_normal(double s);

}  // namespace bcp
