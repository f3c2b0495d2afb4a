#include "bcp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "bcp/errors.hpp"
#include "bcp/rng.hpp"

namespace bcp {

namespace {

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

/// Coefficients for estimators that must also run on a drift-free problem,
/// where the tilt rate is identically zero and the recomputation would
/// (correctly) refuse to run: all-zero coefficients reproduce the untilted
/// formulas exactly.
GirsanovCoefficients coefficients_or_zero(const ReducedProblem& reduced) {
  if (reduced.already_constant) {
    GirsanovCoefficients cf;
    cf.horizon = reduced.horizon;
    return cf;
  }
  return compute_coefficients(reduced);
}

void require_budget(const QuadratureResult& qr) {
  if (qr.budget_exceeded)
    fail(ErrorCode::QuadratureBudgetExceeded,
         "adaptive quadrature exhausted its interval budget (" +
             std::to_string(qr.intervals) + " intervals)");
}

struct InteriorWindow {
  double lo = 0.0;
  double hi = 0.0;
  double cut_line_mass = 0.0;  // discarded mass adjacent to a boundary line
  double cut_far_mass = 0.0;   // discarded far-tail mass
};

/// Integration window for the endpoint integral: the grid-endpoint values
/// beyond which the conditional is on its certain-crossing branch, clipped to
/// tail_z standard deviations around the (possibly tilted) endpoint mean
/// -shift.  Mass discarded by the clip is split into a line-adjacent part
/// (conditional near one) and a far-tail part.  Masses are measured under
/// N(-shift, T); tilted callers weight them by their own gain factor.
InteriorWindow make_window(const ReducedProblem& reduced, double tail_z,
                           double shift) {
  const double T = reduced.horizon;
  const double s = std::sqrt(T);
  const double center = -shift;
  const double upper_x = reduced.b - reduced.u_end();
  InteriorWindow w;
  w.hi = std::min(upper_x, center + tail_z * s);
  if (w.hi < upper_x) {
    // clipped below the upper line: the strip up to the line is near-certain
    w.cut_line_mass += std::max(0.0, normal_cdf(-(w.hi + shift) / s) -
                                         normal_cdf(-(upper_x + shift) / s));
  }
  if (reduced.two_sided) {
    const double lower_x = reduced.lower_at(T) - reduced.u_end();
    w.lo = std::max(lower_x, center - tail_z * s);
    if (w.lo > lower_x)
      w.cut_line_mass += std::max(0.0, normal_cdf((w.lo + shift) / s) -
                                           normal_cdf((lower_x + shift) / s));
  } else {
    w.lo = center - tail_z * s;
    w.cut_far_mass += normal_cdf((w.lo + shift) / s);
  }
  return w;
}

}  // namespace

double conditional_explicit(const ReducedProblem& reduced, double x,
                            const SeriesControl& series) {
  if (!std::isfinite(x))
    fail(ErrorCode::ConfigInvalid, "conditioning endpoint must be finite");
  const double y = x + reduced.u_end();
  if (!reduced.two_sided)
    return bridge_cross_one_sided(reduced.b, reduced.horizon, y);
  return bridge_cross_two_sided(reduced.b, reduced.c0, reduced.c_slope,
                                reduced.horizon, y, series);
}

double conditional_literal_explicit(const ReducedProblem& reduced,
                                    const GirsanovCoefficients& coeffs,
                                    double x, const SeriesControl& series) {
  const double bridge_factor = conditional_explicit(reduced, x, series);
  return std::exp(-coeffs.alpha * x + 0.5 * coeffs.i2) * bridge_factor *
         std::exp(coeffs.alpha_tilde * coeffs.i_cross) *
         laplace_normal(coeffs.alpha_tilde);
}

Estimate conditional_hybrid(const ReducedProblem& reduced,
                            const GirsanovCoefficients& coeffs, double x,
                            const MCControl& mc, ConditionalMode mode) {
  Estimate est = conditional_bridge_mc(reduced, coeffs, x, mc, mode);
  if (mode == ConditionalMode::corrected) {
    est.diagnostics["raw_value"] = est.value;
    est.value = clamp01(est.value);
  }
  return est;
}

Estimate marginal_explicit(const ReducedProblem& reduced,
                           const QuadratureControl& quad,
                           const SeriesControl& series) {
  const double T = reduced.horizon;
  const double s = std::sqrt(T);
  const double upper_x = reduced.b - reduced.u_end();

  double tails = normal_cdf(-upper_x / s);
  if (reduced.two_sided)
    tails += normal_cdf((reduced.lower_at(T) - reduced.u_end()) / s);

  const InteriorWindow w = make_window(reduced, quad.tail_z, 0.0);
  double series_remainder = 0.0;
  double interior = 0.0;
  double quad_error = 0.0;
  std::size_t intervals = 0;
  if (w.lo < w.hi) {
    auto integrand = [&](double x) {
      double cond;
      if (reduced.two_sided) {
        TwoLineSeries detail;
        cond = bridge_cross_two_sided(reduced.b, reduced.c0, reduced.c_slope,
                                      T, x + reduced.u_end(), series, &detail);
        series_remainder = std::max(series_remainder, detail.remainder_bound);
      } else {
        cond = bridge_cross_one_sided(reduced.b, T, x + reduced.u_end());
      }
      return normal_pdf(x / s) / s * cond;
    };
    const QuadratureResult qr =
        integrate_adaptive(std::function<double(double)>(integrand), w.lo,
                           w.hi, quad.tol, quad.max_intervals);
    require_budget(qr);
    interior = qr.value;
    quad_error = qr.error;
    intervals = qr.intervals;
  }

  Estimate est;
  est.method = Method::explicit_form;
  est.value = clamp01(tails + interior + w.cut_line_mass);
  est.error = quad_error + series_remainder + w.cut_line_mass + w.cut_far_mass;
  est.diagnostics["tail_mass"] = tails;
  est.diagnostics["interior"] = interior;
  est.diagnostics["intervals"] = static_cast<double>(intervals);
  if (reduced.two_sided)
    est.diagnostics["series_remainder"] = series_remainder;
  return est;
}

Estimate marginal_hybrid(const ReducedProblem& reduced,
                         const GirsanovCoefficients& coeffs,
                         const QuadratureControl& quad, const MCControl& mc,
                         ConditionalMode mode) {
  validate_mc_control(mc);
  const bool regrid = reduced.grid_size() != mc.n_steps + 1;
  const ReducedProblem red =
      regrid ? resample(reduced, mc.n_steps + 1) : reduced;
  const GirsanovCoefficients cf =
      regrid ? coefficients_or_zero(red) : coeffs;

  const double T = red.horizon;
  const double s = std::sqrt(T);
  const double upper_x = red.b - red.u_end();
  const bool corrected = mode == ConditionalMode::corrected;

  // Certain-crossing branch beyond the boundaries: exactly 1 in corrected
  // mode; in literal mode the exact tilted-tail weight (the residual factor
  // is independent of the endpoint, so no factorization assumption enters).
  double tails;
  const double alpha = cf.alpha;
  const double lit_scale = std::exp(0.5 * cf.i2 +
                                    cf.alpha_tilde * cf.i_cross +
                                    0.5 * cf.alpha_tilde * cf.alpha_tilde);
  const double tilt_gain = std::exp(0.5 * alpha * alpha * T);
  if (corrected) {
    tails = normal_cdf(-upper_x / s);
    if (red.two_sided)
      tails += normal_cdf((red.lower_at(T) - red.u_end()) / s);
  } else {
    tails = lit_scale * tilt_gain * normal_cdf(-(upper_x + alpha * T) / s);
    if (red.two_sided)
      tails += lit_scale * tilt_gain *
               normal_cdf((red.lower_at(T) - red.u_end() + alpha * T) / s);
  }

  const InteriorWindow w =
      make_window(red, quad.tail_z, corrected ? 0.0 : alpha * T);
  double interior = 0.0;
  double quad_error = 0.0;
  double quad_se = 0.0;
  std::size_t intervals = 0;
  std::uint64_t eval_counter = 0;
  if (w.lo < w.hi) {
    auto integrand = [&](double x) {
      MCControl node_mc = mc;
      node_mc.seed = splitmix64_mix(mc.seed ^ ++eval_counter);
      const Estimate inner = conditional_bridge_mc(red, cf, x, node_mc, mode);
      NoisyValue nv;
      const double dens = normal_pdf(x / s) / s;
      nv.value = dens * inner.value;
      nv.se = dens * inner.error;
      return nv;
    };
    const QuadratureResult qr = integrate_adaptive(
        std::function<NoisyValue(double)>(integrand), w.lo, w.hi, quad.tol,
        quad.max_intervals);
    require_budget(qr);
    interior = qr.value;
    quad_error = qr.error;
    quad_se = qr.se;
    intervals = qr.intervals;
  }

  const double cut_gain = corrected ? 1.0 : lit_scale * tilt_gain;
  const double line_cut = cut_gain * w.cut_line_mass;
  double value = tails + interior + line_cut;
  Estimate est;
  est.method = corrected ? Method::hybrid : Method::paper_literal;
  est.diagnostics["raw_value"] = value;
  est.value = corrected ? clamp01(value) : value;
  est.error = quad_error + quad_se + line_cut + cut_gain * w.cut_far_mass;
  est.diagnostics["tail_mass"] = tails;
  est.diagnostics["interior"] = interior;
  est.diagnostics["interior_se"] = quad_se;
  est.diagnostics["intervals"] = static_cast<double>(intervals);
  est.diagnostics["evaluations"] = static_cast<double>(eval_counter);
  return est;
}

Estimate paper_literal_marginal(const ReducedProblem& reduced,
                                const QuadratureControl& quad,
                                const SeriesControl& series) {
  const GirsanovCoefficients cf = coefficients_or_zero(reduced);
  const double T = reduced.horizon;
  const double s = std::sqrt(T);
  const double upper_x = reduced.b - reduced.u_end();
  const double alpha = cf.alpha;
  const double lit_scale = std::exp(0.5 * cf.i2 +
                                    cf.alpha_tilde * cf.i_cross +
                                    0.5 * cf.alpha_tilde * cf.alpha_tilde);
  const double tilt_gain = std::exp(0.5 * alpha * alpha * T);

  double tails = lit_scale * tilt_gain * normal_cdf(-(upper_x + alpha * T) / s);
  if (reduced.two_sided)
    tails += lit_scale * tilt_gain *
             normal_cdf((reduced.lower_at(T) - reduced.u_end() + alpha * T) / s);

  const InteriorWindow w = make_window(reduced, quad.tail_z, alpha * T);
  double interior = 0.0;
  double quad_error = 0.0;
  std::size_t intervals = 0;
  if (w.lo < w.hi) {
    auto integrand = [&](double x) {
      return normal_pdf(x / s) / s *
             conditional_literal_explicit(reduced, cf, x, series);
    };
    const QuadratureResult qr =
        integrate_adaptive(std::function<double(double)>(integrand), w.lo,
                           w.hi, quad.tol, quad.max_intervals);
    require_budget(qr);
    interior = qr.value;
    quad_error = qr.error;
    intervals = qr.intervals;
  }

  const double line_cut = lit_scale * tilt_gain * w.cut_line_mass;
  Estimate est;
  est.method = Method::paper_literal;
  est.value = tails + interior + line_cut;  // intentionally unclamped
  est.error = quad_error + line_cut + lit_scale * tilt_gain * w.cut_far_mass;
  est.diagnostics["tail_mass"] = tails;
  est.diagnostics["interior"] = interior;
  est.diagnostics["intervals"] = static_cast<double>(intervals);
  est.diagnostics["literal_scale"] = lit_scale;
  return est;
}

Estimate closed_form_marginal(const ReducedProblem& reduced,
                              const SeriesControl& series,
                              const QuadratureControl& quad) {
  double theta_bar = 0.0;
  if (!reduced.already_constant) {
    const GirsanovCoefficients cf = compute_coefficients(reduced);
    if (!cf.constant_theta())
      fail(ErrorCode::NotApplicable,
           "closed form requires a constant drift rate in the boundary frame");
    theta_bar = cf.alpha;
  }
  Estimate est;
  est.method = Method::closed_form;
  est.diagnostics["theta_bar"] = theta_bar;
  if (!reduced.two_sided) {
    est.value =
        linear_one_sided_marginal(-theta_bar, reduced.b, reduced.horizon);
    est.error = 0.0;
    return est;
  }
  const MarginalValue mv =
      two_line_marginal(reduced.c0, reduced.c_slope - theta_bar, reduced.b,
                        -theta_bar, reduced.horizon, series, quad);
  est.value = mv.value;
  est.error = mv.error;
  return est;
}

void validate_mixture(const ScenarioMixture& mix) {
  if (mix.scenarios.empty())
    fail(ErrorCode::ConfigInvalid, "mixture needs at least one scenario");
  double total = 0.0;
  const bool two_sided =
      std::holds_alternative<TwoSidedProblem>(mix.scenarios.front().problem);
  for (std::size_t i = 0; i < mix.scenarios.size(); ++i) {
    const Scenario& sc = mix.scenarios[i];
    if (!std::isfinite(sc.weight) || sc.weight <= 0.0)
      fail(ErrorCode::ConfigInvalid,
           "scenario " + std::to_string(i) + ": weight must be positive");
    if (std::holds_alternative<TwoSidedProblem>(sc.problem) != two_sided)
      fail(ErrorCode::ConfigInvalid,
           "scenario " + std::to_string(i) +
               ": all scenarios must share the same sidedness");
    total += sc.weight;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    fail(ErrorCode::ConfigInvalid,
         "scenario weights must sum to one (got " + std::to_string(total) +
             ")");
}

Estimate evaluate_method(const ProblemVariant& problem, Method method,
                         const MethodControls& controls) {
  if (method == Method::mixture)
    fail(ErrorCode::ConfigInvalid,
         "the mixture method applies to a scenario mixture, not a single "
         "problem");
  if (method == Method::path_mc) {
    return std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, OneSidedProblem>)
            return path_mc_one_sided(p, controls.mc);
          else
            return path_mc_two_sided(p, controls.mc);
        },
        problem);
  }
  if (method == Method::timesplit) {
    return std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, OneSidedProblem>)
            return split_marginal(p, controls.split);
          else
            return split_marginal_two_sided(p, controls.split);
        },
        problem);
  }
  const ReducedProblem red = std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, OneSidedProblem>)
          return reduce_one_sided(p);
        else
          return reduce_two_sided(p);
      },
      problem);
  switch (method) {
    case Method::closed_form:
      return closed_form_marginal(red, controls.series, controls.quad);
    case Method::explicit_form:
      return marginal_explicit(red, controls.quad, controls.series);
    case Method::hybrid:
      return marginal_hybrid(red, coefficients_or_zero(red), controls.quad,
                             controls.mc, ConditionalMode::corrected);
    case Method::paper_literal:
      return paper_literal_marginal(red, controls.quad, controls.series);
    default:
      fail(ErrorCode::ConfigInvalid, "unsupported method");
  }
}

Estimate mixture_marginal(const ScenarioMixture& mix, Method method,
                          const MethodControls& controls) {
  validate_mixture(mix);
  Estimate est;
  est.method = Method::mixture;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < mix.scenarios.size(); ++i) {
    const Scenario& sc = mix.scenarios[i];
    Estimate part;
    try {
      part = evaluate_method(sc.problem, method, controls);
    } catch (const Error& e) {
      fail(e.code(), "scenario " + std::to_string(i) + ": " + e.what());
    }
    value += sc.weight * part.value;
    error += sc.weight * part.error;
    const std::string key = "scenario_" + std::to_string(i);
    est.diagnostics[key + "_weight"] = sc.weight;
    est.diagnostics[key + "_value"] = part.value;
    est.diagnostics[key + "_error"] = part.error;
  }
  est.value = value;
  est.error = error;
  est.diagnostics["n_scenarios"] = static_cast<double>(mix.scenarios.size());
  return est;
}

}  // namespace bcp
