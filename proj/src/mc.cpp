#include "bcp/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bcp/bridge.hpp"
#include "bcp/errors.hpp"
#include "bcp/parallel.hpp"
#include "bcp/rng.hpp"

namespace bcp {

namespace {

// Stream salts: one per estimator stage, so stages never share randomness
// even under the same seed.
constexpr std::uint64_t kSaltPath = 1;
constexpr std::uint64_t kSaltGirsanov = 2;
constexpr std::uint64_t kSaltBridge = 3;
constexpr std::uint64_t kSaltDecompP = 4;
constexpr std::uint64_t kSaltDecompQ = 5;
constexpr std::uint64_t kSaltGap = 6;

constexpr std::size_t kChunk = 4096;

// exp(arg) below this threshold is dropped from survival products
// (exp(-40) ~ 4e-18, far below accumulated roundoff).
constexpr double kLogSkip = -40.0;

// Log-weight magnitude beyond which exp() is declared overflowed.
constexpr double kLogWeightCap = 700.0;

// Per-step two-sided correction series: machine-level tolerance; the
// width^2/dt ratio makes one or two image rings plenty whenever the factor
// is not already negligible.
const SeriesControl kStepSeries{1e-15, 8};

struct MomentAccum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  void merge(const MomentAccum& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double sample_var() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) /
                             static_cast<double>(n - 1));
  }
  double se() const {
    return n ? std::sqrt(sample_var() / static_cast<double>(n)) : 0.0;
  }
};

/// Piecewise-linear absorbing boundaries sampled on the simulation grid.
struct GridBoundaries {
  std::vector<double> upper;
  std::vector<double> lower;  // empty when one-sided
  bool two_sided = false;
  double dt = 0.0;
  double sqrt_dt = 0.0;
};

void fill_step_sizes(const ReducedProblem& red, GridBoundaries& gb) {
  gb.dt = red.horizon / static_cast<double>(red.grid_size() - 1);
  gb.sqrt_dt = std::sqrt(gb.dt);
}

/// Boundaries seen by the original driving motion W: upper b - u, lower
/// line minus u.  Used by the plain path simulator.
GridBoundaries driving_frame_boundaries(const ReducedProblem& red) {
  GridBoundaries gb;
  fill_step_sizes(red, gb);
  const std::size_t n = red.grid_size();
  gb.two_sided = red.two_sided;
  gb.upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) gb.upper[i] = red.b - red.u[i];
  if (red.two_sided) {
    gb.lower.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      gb.lower[i] = red.lower_at(red.t[i]) - red.u[i];
  }
  return gb;
}

/// Boundaries seen by the boundary-frame process Y = u + W: constant upper
/// level, exactly linear lower line.  Used by the tilted and bridge samplers.
GridBoundaries boundary_frame_boundaries(const ReducedProblem& red) {
  GridBoundaries gb;
  fill_step_sizes(red, gb);
  const std::size_t n = red.grid_size();
  gb.two_sided = red.two_sided;
  gb.upper.assign(n, red.b);
  if (red.two_sided) {
    gb.lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) gb.lower[i] = red.lower_at(red.t[i]);
  }
  return gb;
}

/// Noncrossing probability of the Brownian bridge connecting one simulation
/// step, given both endpoints strictly inside the boundaries.  `w` is the
/// start point, `y` the increment; boundary values are read at nodes j, j+1.
double step_noncross(const GridBoundaries& gb, std::size_t j, double w,
                     double y) {
  const double up0 = gb.upper[j] - w;
  const double upT = gb.upper[j + 1] - w;
  const double arg_up = -2.0 * up0 * (upT - y) / gb.dt;
  const bool up_live = arg_up >= kLogSkip;
  if (!gb.two_sided) return up_live ? 1.0 - std::exp(arg_up) : 1.0;
  const double dn0 = gb.lower[j] - w;
  const double dnT = gb.lower[j + 1] - w;
  const double arg_dn = 2.0 * dn0 * (y - dnT) / gb.dt;
  const bool dn_live = arg_dn >= kLogSkip;
  if (!up_live && !dn_live) return 1.0;
  if (up_live != dn_live) return 1.0 - std::exp(up_live ? arg_up : arg_dn);
  return two_line_bridge_noncross(gb.dt, y, dn0, dnT, up0, upT, kStepSeries)
      .noncross;
}

struct WalkOutcome {
  double cross_prob = 0.0;  // grid hit: 1; otherwise 1 - prod(step noncross)
  double endpoint = 0.0;
};

/// Simulates one path from the increment draws sign*z[j]*sqrt(dt) and
/// accumulates the survival product.  When `path_out` is given the full node
/// vector is recorded (and the walk always runs to the horizon); otherwise
/// the walk stops once a grid node lies beyond a boundary.
WalkOutcome walk_increments(const GridBoundaries& gb,
                            const std::vector<double>& z, double sign,
                            std::vector<double>* path_out) {
  const std::size_t n_steps = z.size();
  double w = 0.0;
  double surv = 1.0;
  bool crossed = false;
  if (path_out) (*path_out)[0] = 0.0;
  for (std::size_t j = 0; j < n_steps; ++j) {
    const double w_next = w + sign * z[j] * gb.sqrt_dt;
    if (path_out) (*path_out)[j + 1] = w_next;
    if (!crossed) {
      const bool out_up = w_next >= gb.upper[j + 1];
      const bool out_dn = gb.two_sided && w_next <= gb.lower[j + 1];
      if (out_up || out_dn) {
        crossed = true;
        if (!path_out) break;
      } else {
        surv *= step_noncross(gb, j, w, w_next - w);
      }
    }
    w = w_next;
  }
  WalkOutcome out;
  out.endpoint = w;
  out.cross_prob = crossed ? 1.0 : 1.0 - surv;
  return out;
}

std::size_t mc_units(const MCControl& mc) {
  return mc.antithetic ? (mc.n_paths + 1) / 2 : mc.n_paths;
}

double effective_paths(const MCControl& mc) {
  return static_cast<double>(mc_units(mc) * (mc.antithetic ? 2 : 1));
}

Estimate path_mc_reduced(const ReducedProblem& red, const MCControl& mc) {
  const GridBoundaries gb = driving_frame_boundaries(red);
  const std::size_t n_steps = red.grid_size() - 1;
  const std::size_t n_units = mc_units(mc);

  auto chunks = map_chunks<MomentAccum>(
      n_units, kChunk, mc.workers,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        MomentAccum acc;
        std::vector<double> z(n_steps);
        for (std::size_t i = begin; i < end; ++i) {
          PathRng rng(mc.seed, kSaltPath, i);
          for (auto& v : z) v = rng.next_normal();
          double val = walk_increments(gb, z, +1.0, nullptr).cross_prob;
          if (mc.antithetic)
            val = 0.5 * (val + walk_increments(gb, z, -1.0, nullptr).cross_prob);
          acc.add(val);
        }
        return acc;
      });
  MomentAccum total;
  for (const auto& c : chunks) total.merge(c);

  Estimate est;
  est.method = Method::path_mc;
  est.value = total.mean();
  est.error = total.se();
  est.diagnostics["n_paths"] = effective_paths(mc);
  est.diagnostics["n_steps"] = static_cast<double>(n_steps);
  est.diagnostics["antithetic"] = mc.antithetic ? 1.0 : 0.0;
  return est;
}

/// Simulation grid policy: the curves are re-reduced (or the reduced problem
/// resampled) so grid nodes coincide with simulation steps, and the
/// change-of-measure coefficients are recomputed on that grid so the
/// discrete weight identities hold exactly.
ReducedProblem on_simulation_grid(const ReducedProblem& reduced,
                                  const MCControl& mc, bool* regridded) {
  const bool regrid = reduced.grid_size() != mc.n_steps + 1;
  if (regridded) *regridded = regrid;
  return regrid ? resample(reduced, mc.n_steps + 1) : reduced;
}

/// Deterministic pieces of the pinned-endpoint sampler: conditional mean
/// fractions and step standard deviations for sequential bridge simulation.
struct BridgePlan {
  double y_end = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> frac;  // dt / time-to-go at each step start
  std::vector<double> sd;    // conditional step standard deviation
};

BridgePlan make_bridge_plan(const ReducedProblem& red, double x, double dt) {
  BridgePlan plan;
  plan.y_end = x + red.u_end();
  plan.n_steps = red.grid_size() - 1;
  if (plan.n_steps < 2) return plan;
  plan.frac.resize(plan.n_steps - 1);
  plan.sd.resize(plan.n_steps - 1);
  for (std::size_t j = 0; j + 1 < plan.n_steps; ++j) {
    const double tau = red.horizon - red.t[j];
    plan.frac[j] = dt / tau;
    plan.sd[j] = std::sqrt(std::max(0.0, dt * (tau - dt) / tau));
  }
  return plan;
}

struct CondOutcome {
  double indicator = 0.0;  // crossing probability given the sampled skeleton
  double wtilde = 0.0;     // residual integral sum(theta_tilde*(dY - theta dt))
};

/// One pinned path: sequential bridge draws for the interior nodes, the final
/// node set to the pinned endpoint; accumulates the survival product and the
/// pathwise residual integral in the same sweep.
CondOutcome bridge_walk(const GridBoundaries& gb, const ReducedProblem& red,
                        const GirsanovCoefficients& cf, const BridgePlan& plan,
                        const std::vector<double>& z, double sign) {
  const bool with_residual = !cf.theta_tilde.empty();
  double y = 0.0;
  double surv = 1.0;
  double wt = 0.0;
  bool crossed = false;
  for (std::size_t j = 0; j < plan.n_steps; ++j) {
    const double y_next =
        (j + 1 < plan.n_steps)
            ? y + plan.frac[j] * (plan.y_end - y) + sign * z[j] * plan.sd[j]
            : plan.y_end;
    const double dy = y_next - y;
    if (with_residual) wt += cf.theta_tilde[j] * (dy - red.theta[j] * gb.dt);
    if (!crossed) {
      const bool out_up = y_next >= gb.upper[j + 1];
      const bool out_dn = gb.two_sided && y_next <= gb.lower[j + 1];
      if (out_up || out_dn)
        crossed = true;
      else
        surv *= step_noncross(gb, j, y, dy);
    }
    y = y_next;
  }
  CondOutcome out;
  out.indicator = crossed ? 1.0 : 1.0 - surv;
  out.wtilde = wt;
  return out;
}

[[noreturn]] void fail_weight_overflow(std::size_t count, std::size_t total) {
  fail(ErrorCode::WeightOverflow,
       std::to_string(count) + " of " + std::to_string(total) +
           " path log-weights exceeded " +
           std::to_string(static_cast<int>(kLogWeightCap)) +
           " in magnitude");
}

}  // namespace

void validate_mc_control(const MCControl& mc) {
  if (mc.n_paths < 100)
    fail(ErrorCode::ConfigInvalid, "mc.n_paths must be at least 100");
  if (mc.n_steps < 16)
    fail(ErrorCode::ConfigInvalid, "mc.n_steps must be at least 16");
  if (mc.workers < 1)
    fail(ErrorCode::ConfigInvalid, "mc.workers must be at least 1");
}

Estimate path_mc_one_sided(const OneSidedProblem& problem,
                           const MCControl& mc) {
  validate_mc_control(mc);
  OneSidedProblem p = problem;
  p.grid_size = mc.n_steps + 1;
  return path_mc_reduced(reduce_one_sided(p), mc);
}

Estimate path_mc_two_sided(const TwoSidedProblem& problem,
                           const MCControl& mc) {
  validate_mc_control(mc);
  TwoSidedProblem p = problem;
  p.grid_size = mc.n_steps + 1;
  return path_mc_reduced(reduce_two_sided(p), mc);
}

Estimate girsanov_importance_mc(const ReducedProblem& reduced,
                                const GirsanovCoefficients& coeffs,
                                const MCControl& mc,
                                MeasureDirection direction) {
  validate_mc_control(mc);
  bool regridded = false;
  const ReducedProblem red = on_simulation_grid(reduced, mc, &regridded);
  const GirsanovCoefficients cf =
      regridded ? compute_coefficients(red) : coeffs;
  const GridBoundaries gb = boundary_frame_boundaries(red);
  const std::size_t n_steps = red.grid_size() - 1;
  const std::size_t n_units = mc_units(mc);
  const double pair = mc.antithetic ? 2.0 : 1.0;

  struct Chunk {
    MomentAccum value, weight, endpoint;
    std::size_t overflow = 0;
  };
  auto chunks = map_chunks<Chunk>(
      n_units, kChunk, mc.workers,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        Chunk c;
        std::vector<double> z(n_steps);
        std::vector<double> path(n_steps + 1);
        for (std::size_t i = begin; i < end; ++i) {
          PathRng rng(mc.seed, kSaltGirsanov, i);
          for (auto& v : z) v = rng.next_normal();
          double v_sum = 0.0, w_sum = 0.0, e_sum = 0.0;
          const int reps = mc.antithetic ? 2 : 1;
          for (int r = 0; r < reps; ++r) {
            const double sign = (r == 0) ? 1.0 : -1.0;
            const WalkOutcome wo = walk_increments(gb, z, sign, &path);
            double logw = log_radon_nikodym(path, cf, red, direction);
            if (!(std::fabs(logw) <= kLogWeightCap)) {
              ++c.overflow;
              logw = 0.0;
            }
            const double w = std::exp(logw);
            v_sum += wo.cross_prob * w;
            w_sum += w;
            e_sum += wo.endpoint;
          }
          c.value.add(v_sum / pair);
          c.weight.add(w_sum / pair);
          c.endpoint.add(e_sum / pair);
        }
        return c;
      });
  MomentAccum value, weight, endpoint;
  std::size_t overflow = 0;
  for (const auto& c : chunks) {
    value.merge(c.value);
    weight.merge(c.weight);
    endpoint.merge(c.endpoint);
    overflow += c.overflow;
  }
  if (overflow > 0)
    fail_weight_overflow(overflow, static_cast<std::size_t>(effective_paths(mc)));

  Estimate est;
  est.method = Method::path_mc;
  est.value = value.mean();
  est.error = value.se();
  est.diagnostics["mean_weight"] = weight.mean();
  est.diagnostics["mean_weight_se"] = weight.se();
  est.diagnostics["mean_endpoint"] = endpoint.mean();
  est.diagnostics["n_paths"] = effective_paths(mc);
  est.diagnostics["n_steps"] = static_cast<double>(n_steps);
  return est;
}

Estimate conditional_bridge_mc(const ReducedProblem& reduced,
                               const GirsanovCoefficients& coeffs, double x,
                               const MCControl& mc, ConditionalMode mode) {
  validate_mc_control(mc);
  if (!std::isfinite(x))
    fail(ErrorCode::ConfigInvalid, "conditioning endpoint must be finite");
  bool regridded = false;
  const ReducedProblem red = on_simulation_grid(reduced, mc, &regridded);
  const GirsanovCoefficients cf =
      regridded ? compute_coefficients(red) : coeffs;
  const GridBoundaries gb = boundary_frame_boundaries(red);
  const BridgePlan plan = make_bridge_plan(red, x, gb.dt);
  const std::size_t n_draws = plan.n_steps - 1;
  const std::size_t n_units = mc_units(mc);
  const double pair = mc.antithetic ? 2.0 : 1.0;
  const double tilt = (mode == ConditionalMode::corrected) ? cf.alpha_tilde
                                                           : -cf.alpha_tilde;
  const double prefactor = (mode == ConditionalMode::corrected)
                               ? laplace_normal(cf.alpha_tilde)
                               : std::exp(-cf.alpha * x + 0.5 * cf.i2);

  struct Chunk {
    MomentAccum value, indicator, weight;
    std::size_t overflow = 0;
  };
  auto chunks = map_chunks<Chunk>(
      n_units, kChunk, mc.workers,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        Chunk c;
        std::vector<double> z(n_draws);
        for (std::size_t i = begin; i < end; ++i) {
          PathRng rng(mc.seed, kSaltBridge, i);
          for (auto& v : z) v = rng.next_normal();
          double v_sum = 0.0, c_sum = 0.0, w_sum = 0.0;
          const int reps = mc.antithetic ? 2 : 1;
          for (int r = 0; r < reps; ++r) {
            const double sign = (r == 0) ? 1.0 : -1.0;
            const CondOutcome co = bridge_walk(gb, red, cf, plan, z, sign);
            double wt = 1.0;
            if (!cf.constant_theta()) {
              const double arg = tilt * co.wtilde;
              if (!(std::fabs(arg) <= kLogWeightCap)) {
                ++c.overflow;
              } else {
                wt = std::exp(arg);
              }
            }
            v_sum += co.indicator * wt;
            c_sum += co.indicator;
            w_sum += wt;
          }
          c.value.add(v_sum / pair);
          c.indicator.add(c_sum / pair);
          c.weight.add(w_sum / pair);
        }
        return c;
      });
  MomentAccum value, indicator, weight;
  std::size_t overflow = 0;
  for (const auto& c : chunks) {
    value.merge(c.value);
    indicator.merge(c.indicator);
    weight.merge(c.weight);
    overflow += c.overflow;
  }
  if (overflow > 0)
    fail_weight_overflow(overflow, static_cast<std::size_t>(effective_paths(mc)));

  Estimate est;
  est.method = Method::hybrid;
  est.value = prefactor * value.mean();
  est.error = prefactor * value.se();
  est.diagnostics["inner_mean"] = value.mean();
  est.diagnostics["indicator_mean"] = indicator.mean();
  est.diagnostics["weight_mean"] = weight.mean();
  est.diagnostics["prefactor"] = prefactor;
  est.diagnostics["alpha_tilde"] = cf.alpha_tilde;
  est.diagnostics["pinned_endpoint"] = plan.y_end;
  est.diagnostics["n_paths"] = effective_paths(mc);
  est.diagnostics["n_steps"] = static_cast<double>(plan.n_steps);
  return est;
}

DecompositionStats decomposition_stats(const ReducedProblem& reduced,
                                       const GirsanovCoefficients& coeffs,
                                       const MCControl& mc) {
  validate_mc_control(mc);
  bool regridded = false;
  const ReducedProblem red = on_simulation_grid(reduced, mc, &regridded);
  const GirsanovCoefficients cf =
      regridded ? compute_coefficients(red) : coeffs;

  DecompositionStats out;
  out.n_paths = mc.n_paths;
  if (cf.constant_theta()) {
    out.degenerate = true;
    return out;
  }
  const std::size_t n_steps = red.grid_size() - 1;
  const double dt = red.horizon / static_cast<double>(n_steps);
  const double sqrt_dt = std::sqrt(dt);

  struct Chunk {
    double max_res = 0.0;
    double s_wt = 0.0, s_wt2 = 0.0;
    double s_w = 0.0, s_w2 = 0.0, s_wwt = 0.0;
    double s_qs = 0.0, s_qs2 = 0.0, s_qe = 0.0;
    std::size_t n = 0;
  };
  auto chunks = map_chunks<Chunk>(
      mc.n_paths, kChunk, mc.workers,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        Chunk c;
        for (std::size_t i = begin; i < end; ++i) {
          // Original-measure path: the decomposition identity is checked
          // pathwise and the residual moments accumulated.
          PathRng rp(mc.seed, kSaltDecompP, i);
          double w = 0.0, wbar = 0.0, wtilde = 0.0;
          for (std::size_t j = 0; j < n_steps; ++j) {
            const double dw = rp.next_normal() * sqrt_dt;
            wbar += red.theta[j] * dw;
            wtilde += cf.theta_tilde[j] * dw;
            w += dw;
          }
          const double res =
              std::fabs(wbar - cf.alpha * w - cf.alpha_tilde * wtilde);
          c.max_res = std::max(c.max_res, res);
          c.s_wt += wtilde;
          c.s_wt2 += wtilde * wtilde;
          c.s_w += w;
          c.s_w2 += w * w;
          c.s_wwt += w * wtilde;

          // Tilted-measure path: the shifted residual should be standard
          // normal and uncorrelated drift should leave the endpoint centered.
          PathRng rq(mc.seed, kSaltDecompQ, i);
          double y = 0.0, wq = 0.0;
          for (std::size_t j = 0; j < n_steps; ++j) {
            const double dy = rq.next_normal() * sqrt_dt;
            wq += cf.theta_tilde[j] * (dy - red.theta[j] * dt);
            y += dy;
          }
          const double shifted = wq + cf.i_cross;
          c.s_qs += shifted;
          c.s_qs2 += shifted * shifted;
          c.s_qe += y;
          ++c.n;
        }
        return c;
      });
  Chunk tot;
  for (const auto& c : chunks) {
    tot.max_res = std::max(tot.max_res, c.max_res);
    tot.s_wt += c.s_wt;
    tot.s_wt2 += c.s_wt2;
    tot.s_w += c.s_w;
    tot.s_w2 += c.s_w2;
    tot.s_wwt += c.s_wwt;
    tot.s_qs += c.s_qs;
    tot.s_qs2 += c.s_qs2;
    tot.s_qe += c.s_qe;
    tot.n += c.n;
  }
  const double n = static_cast<double>(tot.n);
  const double m_wt = tot.s_wt / n;
  const double m_w = tot.s_w / n;
  const double var_wt = std::max(0.0, (tot.s_wt2 - n * m_wt * m_wt) / (n - 1));
  const double var_w = std::max(0.0, (tot.s_w2 - n * m_w * m_w) / (n - 1));
  const double cov = (tot.s_wwt - n * m_w * m_wt) / (n - 1);
  const double denom = std::sqrt(var_w * var_wt);
  out.max_residual = tot.max_res;
  out.mean_wtilde = m_wt;
  out.var_wtilde = var_wt;
  out.corr_w_wtilde = (denom > 0.0) ? cov / denom : 0.0;
  const double m_qs = tot.s_qs / n;
  out.q_mean_shifted = m_qs;
  out.q_var_shifted = std::max(0.0, (tot.s_qs2 - n * m_qs * m_qs) / (n - 1));
  out.q_mean_endpoint = tot.s_qe / n;
  return out;
}

FactorizationGap factorization_gap(const ReducedProblem& reduced,
                                   const GirsanovCoefficients& coeffs, double x,
                                   const MCControl& mc) {
  validate_mc_control(mc);
  if (!std::isfinite(x))
    fail(ErrorCode::ConfigInvalid, "conditioning endpoint must be finite");
  bool regridded = false;
  const ReducedProblem red = on_simulation_grid(reduced, mc, &regridded);
  const GirsanovCoefficients cf =
      regridded ? compute_coefficients(red) : coeffs;
  const GridBoundaries gb = boundary_frame_boundaries(red);
  const BridgePlan plan = make_bridge_plan(red, x, gb.dt);
  const std::size_t n_draws = plan.n_steps - 1;

  struct Chunk {
    double sc = 0.0, se = 0.0, sp = 0.0;
    double sc2 = 0.0, se2 = 0.0, sp2 = 0.0;
    double spc = 0.0, spe = 0.0;
    std::size_t n = 0, overflow = 0;
  };
  auto chunks = map_chunks<Chunk>(
      mc.n_paths, kChunk, mc.workers,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        Chunk c;
        std::vector<double> z(n_draws);
        for (std::size_t i = begin; i < end; ++i) {
          PathRng rng(mc.seed, kSaltGap, i);
          for (auto& v : z) v = rng.next_normal();
          const CondOutcome co = bridge_walk(gb, red, cf, plan, z, +1.0);
          double e = 1.0;
          if (!cf.constant_theta()) {
            const double arg = cf.alpha_tilde * co.wtilde;
            if (!(std::fabs(arg) <= kLogWeightCap))
              ++c.overflow;
            else
              e = std::exp(arg);
          }
          const double ind = co.indicator;
          const double p = ind * e;
          c.sc += ind;
          c.se += e;
          c.sp += p;
          c.sc2 += ind * ind;
          c.se2 += e * e;
          c.sp2 += p * p;
          c.spc += p * ind;
          c.spe += p * e;
          ++c.n;
        }
        return c;
      });
  Chunk tot;
  for (const auto& c : chunks) {
    tot.sc += c.sc;
    tot.se += c.se;
    tot.sp += c.sp;
    tot.sc2 += c.sc2;
    tot.se2 += c.se2;
    tot.sp2 += c.sp2;
    tot.spc += c.spc;
    tot.spe += c.spe;
    tot.n += c.n;
    tot.overflow += c.overflow;
  }
  if (tot.overflow > 0) fail_weight_overflow(tot.overflow, mc.n_paths);

  const double n = static_cast<double>(tot.n);
  const double mc_ = tot.sc / n;
  const double me = tot.se / n;
  const double mp = tot.sp / n;
  FactorizationGap out;
  out.indicator_mean = mc_;
  out.weight_mean = me;
  out.gap = mp - mc_ * me;
  const double var_p = std::max(0.0, (tot.sp2 - n * mp * mp) / (n - 1));
  const double var_c = std::max(0.0, (tot.sc2 - n * mc_ * mc_) / (n - 1));
  const double var_e = std::max(0.0, (tot.se2 - n * me * me) / (n - 1));
  const double cov_pc = (tot.spc - n * mp * mc_) / (n - 1);
  const double cov_pe = (tot.spe - n * mp * me) / (n - 1);
  const double cov_ce = (tot.sp - n * mc_ * me) / (n - 1);
  const double var_g = std::max(
      0.0, var_p + me * me * var_c + mc_ * mc_ * var_e - 2.0 * me * cov_pc -
               2.0 * mc_ * cov_pe + 2.0 * mc_ * me * cov_ce);
  out.gap_se = std::sqrt(var_g / n);
  const double denom = mc_ * me;
  if (denom > 0.0) {
    out.normalized_gap = out.gap / denom;
    out.normalized_se = out.gap_se / denom;
  }
  return out;
}

}  // namespace bcp
