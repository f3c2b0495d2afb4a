#include "bcp/timesplit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bcp/bridge.hpp"
#include "bcp/errors.hpp"
#include "bcp/quadrature.hpp"

namespace bcp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Chebyshev-Lobatto resolution of the survival value function.  The node
// clustering at the interval ends resolves the boundary layers; spatial
// interpolation error sits far below the transition-quadrature error.
constexpr std::size_t kChebPoints = 129;

// The one-sided value-function domain extends this many sqrt(remaining time)
// below the boundary range; survival is flat to ~1e-12 beyond that.
constexpr double kFloorMargin = 7.0;

// Transition integrals are truncated where the Gaussian step weight has
// decayed past this many standard deviations (tail mass ~1e-21).
constexpr double kPanelZ = 9.5;

// Truncation for the two-line reflection series inside transition kernels.
const SeriesControl kSplitSeries{1e-14, 64};

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

/// Shared Chebyshev-Lobatto basis on [-1, 1]: ascending nodes and barycentric
/// weights.
struct ChebBasis {
  std::vector<double> xi;      // -cos(k*pi/n), ascending from -1 to 1
  std::vector<double> bary_w;  // barycentric weights (up to a common factor)

  explicit ChebBasis(std::size_t points) {
    const std::size_t n = points - 1;
    xi.resize(points);
    bary_w.resize(points);
    for (std::size_t k = 0; k <= n; ++k) {
      xi[k] = -std::cos(kPi * static_cast<double>(k) / static_cast<double>(n));
      double w = (k % 2 == 0) ? 1.0 : -1.0;
      if (k == 0 || k == n) w *= 0.5;
      bary_w[k] = w;
    }
    xi.front() = -1.0;
    xi.back() = 1.0;
  }
};

const ChebBasis& cheb_basis() {
  static const ChebBasis basis(kChebPoints);
  return basis;
}

/// Survival value function at one split time.  Inside [lo, hi] it is the
/// barycentric Chebyshev interpolant; at and above the absorbing boundary hi
/// it is zero; below lo it is either zero (absorbing lower boundary) or flat
/// (artificial floor deep below a one-sided boundary).
struct ValueLevel {
  double lo = 0.0;
  double hi = 0.0;
  bool absorbing_lo = false;
  std::vector<double> vals;  // at ascending mapped Lobatto nodes

  double node(std::size_t k) const {
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * cheb_basis().xi[k];
  }

  double eval(double w) const {
    if (w >= hi) return 0.0;
    if (w <= lo) return absorbing_lo ? 0.0 : vals.front();
    const ChebBasis& basis = cheb_basis();
    const double x = (2.0 * w - (lo + hi)) / (hi - lo);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const double diff = x - basis.xi[k];
      if (std::fabs(diff) < 1e-14) return vals[k];
      const double c = basis.bary_w[k] / diff;
      num += c * vals[k];
      den += c;
    }
    return num / den;
  }
};

/// Piecewise-linear boundaries at the split times, in the driving-motion
/// frame (start at 0, upper[0] > 0).
struct SplitFrame {
  std::vector<double> upper;
  std::vector<double> lower;  // empty when one-sided
  bool two_sided = false;
  double dt = 0.0;
  double horizon = 0.0;
};

/// Linear interpolation of the reduced drift-gap grid at time s.
double interp_reduced_u(const ReducedProblem& red, double s) {
  const std::size_t n = red.grid_size();
  const double step = red.horizon / static_cast<double>(n - 1);
  if (s <= 0.0) return red.u.front();
  if (s >= red.horizon) return red.u.back();
  std::size_t i = static_cast<std::size_t>(s / step);
  if (i > n - 2) i = n - 2;
  const double frac = (s - static_cast<double>(i) * step) / step;
  return red.u[i] * (1.0 - frac) + red.u[i + 1] * frac;
}

void check_frame(const SplitFrame& frame) {
  for (std::size_t j = 0; j < frame.upper.size(); ++j) {
    if (!std::isfinite(frame.upper[j]) ||
        (frame.two_sided && !std::isfinite(frame.lower[j])))
      fail(ErrorCode::NonfiniteCurve,
           "boundary value at split " + std::to_string(j) + " is not finite");
    if (frame.two_sided && !(frame.lower[j] < frame.upper[j]))
      fail(ErrorCode::BoundariesCross,
           "boundaries meet at split " + std::to_string(j));
  }
  if (!(frame.upper.front() > 0.0) ||
      (frame.two_sided && !(frame.lower.front() < 0.0)))
    fail(ErrorCode::StartOnOrAboveBoundary,
         "the process must start strictly inside the boundaries");
}

/// Survival over the final split interval, in closed form: one linear
/// boundary segment (or one two-line segment) with a free endpoint.
double final_step_value(const SplitFrame& frame, double w) {
  const std::size_t m = frame.upper.size() - 1;
  const double bl = frame.upper[m - 1], br = frame.upper[m];
  if (!frame.two_sided)
    return clamp01(1.0 - linear_one_sided_marginal((br - bl) / frame.dt,
                                                   bl - w, frame.dt));
  const double al = frame.lower[m - 1], ar = frame.lower[m];
  const MarginalValue mv =
      two_line_marginal(al - w, (ar - al) / frame.dt, bl - w,
                        (br - bl) / frame.dt, frame.dt, kSplitSeries);
  return clamp01(1.0 - mv.value);
}

/// One backward transition: survival value at start point w of split j given
/// the value function at split j+1.  The integrand
///   (Gaussian step density) x (linear-boundary noncross kernel) x V_{j+1}
/// is integrated over the admissible endpoint range only, where every kernel
/// exponent is nonpositive, so nothing can overflow.  Two Gauss-Legendre
/// panels split at the density peak cover the effective support.
double transition_value(const SplitFrame& frame, std::size_t j, double w,
                        const ValueLevel& next, const GaussRule& gl) {
  const double dt = frame.dt;
  const double sdt = std::sqrt(dt);
  const double bl = frame.upper[j], br = frame.upper[j + 1];
  const double dist_up = bl - w;

  double lo_pan = w - kPanelZ * sdt;
  const double hi_pan = std::min(br, w + kPanelZ * sdt);
  if (frame.two_sided) lo_pan = std::max(lo_pan, frame.lower[j + 1]);
  if (!(hi_pan > lo_pan)) return 0.0;
  const double mid = std::min(std::max(w, lo_pan), hi_pan);

  auto integrand = [&](double wp) {
    double kernel;
    if (frame.two_sided) {
      const double al = frame.lower[j], ar = frame.lower[j + 1];
      kernel = two_line_bridge_noncross(dt, wp - w, al - w, ar - w, bl - w,
                                        br - w, kSplitSeries)
                   .noncross;
    } else {
      kernel = 1.0 - std::exp(-2.0 * dist_up * (br - wp) / dt);
    }
    const double dens = normal_pdf((wp - w) / sdt) / sdt;
    return dens * kernel * next.eval(wp);
  };
  auto panel = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    const double half = 0.5 * (b - a);
    const double center = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t v = 0; v < gl.x.size(); ++v)
      acc += gl.w[v] * integrand(center + half * gl.x[v]);
    return half * acc;
  };
  return clamp01(panel(lo_pan, mid) + panel(mid, hi_pan));
}

Estimate split_core(const SplitFrame& frame, const SplitControl& ctrl) {
  check_frame(frame);
  const std::size_t m = frame.upper.size() - 1;
  const GaussRule& gl = gauss_legendre(ctrl.n_nodes);

  double v0;
  if (m == 1) {
    v0 = final_step_value(frame, 0.0);
  } else {
    // One-sided levels rest on a flat floor far below everything the
    // remaining boundary segments can reach.
    std::vector<double> floor_at(m, 0.0);
    if (!frame.two_sided) {
      double suffix_min = frame.upper[m];
      for (std::size_t j = m; j-- > 0;) {
        suffix_min = std::min(suffix_min, frame.upper[j]);
        const double remaining =
            frame.horizon - static_cast<double>(j) * frame.dt;
        floor_at[j] =
            std::min(0.0, suffix_min) - kFloorMargin * std::sqrt(remaining);
      }
    }

    auto make_level = [&](std::size_t j) {
      ValueLevel lvl;
      lvl.hi = frame.upper[j];
      lvl.lo = frame.two_sided ? frame.lower[j] : floor_at[j];
      lvl.absorbing_lo = frame.two_sided;
      lvl.vals.assign(kChebPoints, 0.0);
      return lvl;
    };

    ValueLevel next = make_level(m - 1);
    for (std::size_t k = 0; k < kChebPoints; ++k) {
      const bool pinned = (k == kChebPoints - 1) || (frame.two_sided && k == 0);
      next.vals[k] = pinned ? 0.0 : final_step_value(frame, next.node(k));
    }

    for (std::size_t j = m - 1; j-- > 1;) {
      ValueLevel cur = make_level(j);
      for (std::size_t k = 0; k < kChebPoints; ++k) {
        const bool pinned =
            (k == kChebPoints - 1) || (frame.two_sided && k == 0);
        cur.vals[k] =
            pinned ? 0.0 : transition_value(frame, j, cur.node(k), next, gl);
      }
      next = std::move(cur);
    }
    v0 = transition_value(frame, 0, 0.0, next, gl);
  }

  Estimate est;
  est.method = Method::timesplit;
  est.value = clamp01(1.0 - v0);
  est.error = 0.0;
  est.diagnostics["n_splits"] = static_cast<double>(m);
  est.diagnostics["n_nodes"] = static_cast<double>(ctrl.n_nodes);
  est.diagnostics["dt"] = frame.dt;
  est.diagnostics["survival_at_start"] = v0;
  return est;
}

}  // namespace

const char* local_method_name(LocalMethod m) {
  switch (m) {
    case LocalMethod::local_explicit: return "local_explicit";
    case LocalMethod::piecewise_linear: return "piecewise_linear";
  }
  return "unknown";
}

LocalMethod local_method_from_name(const std::string& name) {
  if (name == "local_explicit") return LocalMethod::local_explicit;
  if (name == "piecewise_linear") return LocalMethod::piecewise_linear;
  fail(ErrorCode::ConfigInvalid, "unknown local method: " + name);
}

void validate_split_control(const SplitControl& ctrl) {
  if (ctrl.n_splits < 1 || ctrl.n_splits > 64)
    fail(ErrorCode::ConfigInvalid, "split.n_splits must lie in [1, 64]");
  if (ctrl.n_nodes < 8 || ctrl.n_nodes > 200)
    fail(ErrorCode::ConfigInvalid, "split.n_nodes must lie in [8, 200]");
}

Estimate split_marginal(const OneSidedProblem& problem,
                        const SplitControl& ctrl) {
  validate_split_control(ctrl);
  const ReducedProblem red = reduce_one_sided(problem);
  SplitFrame frame;
  frame.two_sided = false;
  frame.horizon = problem.horizon;
  const std::size_t m = ctrl.n_splits;
  frame.dt = problem.horizon / static_cast<double>(m);
  frame.upper.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double s =
        (j == m) ? problem.horizon : static_cast<double>(j) * frame.dt;
    frame.upper[j] =
        (ctrl.local_method == LocalMethod::local_explicit)
            ? red.b - interp_reduced_u(red, s)
            : (problem.boundary.value(s) - problem.drift.value(s)) /
                  problem.sigma;
  }
  Estimate est = split_core(frame, ctrl);
  est.diagnostics["local_method"] =
      ctrl.local_method == LocalMethod::local_explicit ? 0.0 : 1.0;
  return est;
}

Estimate split_marginal_two_sided(const TwoSidedProblem& problem,
                                  const SplitControl& ctrl) {
  validate_split_control(ctrl);
  const ReducedProblem red = reduce_two_sided(problem);
  SplitFrame frame;
  frame.two_sided = true;
  frame.horizon = problem.horizon;
  const std::size_t m = ctrl.n_splits;
  frame.dt = problem.horizon / static_cast<double>(m);
  frame.upper.resize(m + 1);
  frame.lower.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double s =
        (j == m) ? problem.horizon : static_cast<double>(j) * frame.dt;
    if (ctrl.local_method == LocalMethod::local_explicit) {
      const double us = interp_reduced_u(red, s);
      frame.upper[j] = red.b - us;
      frame.lower[j] = red.lower_at(s) - us;
    } else {
      frame.upper[j] = (problem.upper.value(s) - problem.drift.value(s)) /
                       problem.sigma;
      frame.lower[j] = (problem.lower.value(s) - problem.drift.value(s)) /
                       problem.sigma;
    }
  }
  Estimate est = split_core(frame, ctrl);
  est.diagnostics["local_method"] =
      ctrl.local_method == LocalMethod::local_explicit ? 0.0 : 1.0;
  return est;
}

}  // namespace bcp
