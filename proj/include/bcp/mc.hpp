#pragma once

#include <cstdint>

#include "bcp/estimate.hpp"
#include "bcp/girsanov.hpp"
#include "bcp/problem.hpp"

namespace bcp {

/// Simulation knobs shared by all Monte Carlo estimators.  Results are a
/// deterministic function of (seed, n_paths, n_steps, antithetic) — the
/// worker count changes only the wall time.
struct MCControl {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 512;
  std::uint64_t seed = 1;
  bool antithetic = true;
  unsigned workers = 1;
};

void validate_mc_control(const MCControl& mc);

/// Which conditional weighting the hybrid estimators apply: `corrected`
/// carries the Bayes-normalized exponential tilt; `literal` reproduces the
/// unnormalized diagnostic variant exactly as displayed.
enum class ConditionalMode { corrected, literal };

/// Crossing probability by path simulation with per-step bridge corrections
/// (the survival-product estimator).
Estimate path_mc_one_sided(const OneSidedProblem& problem, const MCControl& mc);
Estimate path_mc_two_sided(const TwoSidedProblem& problem, const MCControl& mc);

/// Importance sampling under the tilted measure: simulates the boundary-frame
/// process as a driftless Brownian motion and reweights each path by the
/// Radon-Nikodym factor for `direction`.  The correct orientation is
/// q_to_p; p_to_q is kept as a negative control.
Estimate girsanov_importance_mc(const ReducedProblem& reduced,
                                const GirsanovCoefficients& coeffs,
                                const MCControl& mc,
                                MeasureDirection direction);

/// Inner expectation of the hybrid conditional: samples the boundary-frame
/// process as a Brownian bridge pinned at x + u_T, Rao-Blackwellizes the
/// crossing indicator, and applies the mode's exponential weight built from
/// the pathwise residual integral.  Handles one- and two-sided reduced
/// problems.  alpha_tilde == 0 degrades to unit weight.
Estimate conditional_bridge_mc(const ReducedProblem& reduced,
                               const GirsanovCoefficients& coeffs, double x,
                               const MCControl& mc, ConditionalMode mode);

/// Statistical check of the endpoint decomposition: pathwise recomposition
/// residual, moments of the residual factor under both measures, and the
/// endpoint mean under the tilted simulation.
struct DecompositionStats {
  bool degenerate = false;  // constant theta: residual factor undefined
  std::size_t n_paths = 0;
  double max_residual = 0.0;    // max |wbar - alpha*w - alpha_tilde*wtilde|
  double mean_wtilde = 0.0;     // P-measure sample mean of the residual
  double var_wtilde = 0.0;      // P-measure sample variance
  double corr_w_wtilde = 0.0;   // P-measure correlation with the endpoint
  double q_mean_shifted = 0.0;  // Q-measure mean of (wtilde + i_cross)
  double q_var_shifted = 0.0;   // Q-measure variance of (wtilde + i_cross)
  double q_mean_endpoint = 0.0;  // Q-measure mean of the simulated endpoint
};
DecompositionStats decomposition_stats(const ReducedProblem& reduced,
                                       const GirsanovCoefficients& coeffs,
                                       const MCControl& mc);

/// Measures the conditional factorization assumption at endpoint x:
/// gap = E[ind * weight] - E[ind] * E[weight] under the bridge sampler.
struct FactorizationGap {
  double gap = 0.0;
  double gap_se = 0.0;
  double normalized_gap = 0.0;  // gap / (E[ind] * E[weight])
  double normalized_se = 0.0;
  double indicator_mean = 0.0;
  double weight_mean = 0.0;
};
FactorizationGap factorization_gap(const ReducedProblem& reduced,
                                   const GirsanovCoefficients& coeffs, double x,
                                   const MCControl& mc);

}  // namespace bcp
