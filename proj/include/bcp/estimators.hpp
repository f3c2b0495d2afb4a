#pragma once

#include <variant>
#include <vector>

#include "bcp/bridge.hpp"
#include "bcp/estimate.hpp"
#include "bcp/girsanov.hpp"
#include "bcp/mc.hpp"
#include "bcp/problem.hpp"
#include "bcp/quadrature.hpp"
#include "bcp/timesplit.hpp"

namespace bcp {

/// Factorized conditional crossing probability given the endpoint x of the
/// driving Brownian motion: the drift-adjusted bridge formula on the reduced
/// frame (exact when theta is constant).  Handles one- and two-sided
/// problems; returns exactly 1 when the pinned endpoint lies outside the
/// boundaries.
double conditional_explicit(const ReducedProblem& reduced, double x,
                            const SeriesControl& series = {});

/// The unnormalized diagnostic conditional, exactly as displayed: prefactor
/// exp(-alpha*x + i2/2) times the bridge factor (1 on the certain-crossing
/// branch) times exp(alpha_tilde * i_cross) times the normal Laplace factor.
double conditional_literal_explicit(const ReducedProblem& reduced,
                                    const GirsanovCoefficients& coeffs,
                                    double x, const SeriesControl& series = {});

/// Conditional probability with the inner expectation estimated by the
/// conditional bridge sampler; corrected mode is the normalized estimator,
/// literal mode the displayed diagnostic.  Corrected values are clamped to
/// [0,1] (raw value kept in diagnostics); literal values are never clamped.
Estimate conditional_hybrid(const ReducedProblem& reduced,
                            const GirsanovCoefficients& coeffs, double x,
                            const MCControl& mc, ConditionalMode mode);

/// Marginal crossing probability: Gaussian tail mass beyond the boundaries
/// plus adaptive quadrature of the conditional over the interior.
Estimate marginal_explicit(const ReducedProblem& reduced,
                           const QuadratureControl& quad = {},
                           const SeriesControl& series = {});
Estimate marginal_hybrid(const ReducedProblem& reduced,
                         const GirsanovCoefficients& coeffs,
                         const QuadratureControl& quad, const MCControl& mc,
                         ConditionalMode mode = ConditionalMode::corrected);

/// Deterministic quadrature of the literal (unnormalized) marginal display;
/// never clamped, and reports its divergence from the corrected marginal.
Estimate paper_literal_marginal(const ReducedProblem& reduced,
                                const QuadratureControl& quad = {},
                                const SeriesControl& series = {});

/// Exact marginal for grid-constant theta (linear boundaries in the driving
/// frame).  Throws NotApplicable otherwise.
Estimate closed_form_marginal(const ReducedProblem& reduced,
                              const SeriesControl& series = {},
                              const QuadratureControl& quad = {});

/// One problem of either side.
using ProblemVariant = std::variant<OneSidedProblem, TwoSidedProblem>;

/// Discrete scenario law for randomized boundaries/drifts: positive weights
/// summing to one, all scenarios on the same side.
struct Scenario {
  double weight = 0.0;
  ProblemVariant problem;
};
struct ScenarioMixture {
  std::vector<Scenario> scenarios;
};
void validate_mixture(const ScenarioMixture& mix);

/// Control bundle consumed by the method dispatcher.
struct MethodControls {
  QuadratureControl quad;
  MCControl mc;
  SplitControl split;
  SeriesControl series;
};

/// Runs one estimation method on one problem; the central dispatch used by
/// the CLI and the mixture combinator.
Estimate evaluate_method(const ProblemVariant& problem, Method method,
                         const MethodControls& controls);

/// Weighted scenario combination: value and error combine linearly; the
/// per-scenario values are retained in diagnostics.  A scenario failure is
/// rethrown with the scenario index attached.
Estimate mixture_marginal(const ScenarioMixture& mix, Method method,
                          const MethodControls& controls);

}  // namespace bcp
