// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Every tolerance is pinned here in code.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "bcp/bridge.hpp"
#include "bcp/estimators.hpp"
#include "bcp/girsanov.hpp"
#include "bcp/mc.hpp"
#include "bcp/problem.hpp"
#include "bcp/timesplit.hpp"
#include "oracles.hpp"

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kConstantB1 = 0.3173105078629141;  // 2*(1 - Phi(1))

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

bcp::OneSidedProblem sinusoid_problem(std::size_t grid = 512) {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::sinusoid(1.0, 0.25, kTwoPi);
  p.grid_size = grid;
  return p;
}

bcp::OneSidedProblem linear_problem(double intercept, double slope) {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::linear(intercept, slope);
  return p;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    s += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
  return s;
}

struct Failures {
  std::string text;
  void add(const std::string& what) {
    if (!text.empty()) text += "; ";
    text += what;
  }
  bool ok() const { return text.empty(); }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// --- criterion 1: linear-boundary exactness ---------------------------------
std::string criterion1(std::string& note) {
  Failures f;
  const double t0 = now_s();
  double worst = 0.0;
  for (double slope : {0.0, 0.5, 1.0}) {
    for (double level : {0.5, 1.0, 2.0}) {
      const auto red = bcp::reduce_one_sided(linear_problem(level, slope));
      const double got = bcp::marginal_explicit(red).value;
      const double want = bcp::linear_one_sided_marginal(slope, level, 1.0);
      worst = std::max(worst, std::fabs(got - want));
    }
  }
  const double secs = now_s() - t0;
  if (worst > 1e-6) f.add(fmt("max |delta| %.3g > 1e-6", worst));
  if (secs >= 1.0) f.add(fmt("runtime %.2f s >= 1 s", secs));
  note = fmt("max |delta| %.2e, %.2f s", worst, secs);
  return f.text;
}

// --- criterion 2: constant-boundary closed form and path MC ------------------
std::string criterion2(std::string& note) {
  Failures f;
  bcp::OneSidedProblem p;  // constant boundary at 1
  const double closed =
      bcp::evaluate_method(p, bcp::Method::closed_form, {}).value;
  if (std::fabs(closed - kConstantB1) > 1e-6)
    f.add(fmt("closed form %.10f off by %.3g > 1e-6", closed,
              std::fabs(closed - kConstantB1)));
  bcp::MethodControls ctl;
  ctl.mc.n_paths = 1000000;
  ctl.mc.n_steps = 512;
  ctl.mc.seed = 22;
  const double t0 = now_s();
  const bcp::Estimate mc = bcp::evaluate_method(p, bcp::Method::path_mc, ctl);
  const double secs = now_s() - t0;
  const double dev = std::fabs(mc.value - kConstantB1);
  if (dev > 3.0 * mc.error)
    f.add(fmt("path MC off by %.3g > 3 SE (SE %.3g)", dev, mc.error));
  if (secs >= 60.0) f.add(fmt("path MC runtime %.1f s >= 60 s", secs));
  note = fmt("MC dev %.2g (SE %.2g), %.1f s", dev, mc.error, secs);
  return f.text;
}

// --- criterion 3: importance-sampling orientation ----------------------------
std::string criterion3(std::string& note) {
  Failures f;
  const auto prob = sinusoid_problem();
  bcp::MethodControls ctl;
  ctl.mc.n_paths = 100000;
  ctl.mc.n_steps = 512;
  ctl.mc.seed = 31;
  const bcp::Estimate direct =
      bcp::evaluate_method(prob, bcp::Method::path_mc, ctl);
  const auto red = bcp::reduce_one_sided(prob);
  const auto cf = bcp::compute_coefficients(red);
  bcp::MCControl mc = ctl.mc;
  mc.seed = 32;
  const bcp::Estimate good = bcp::girsanov_importance_mc(
      red, cf, mc, bcp::MeasureDirection::q_to_p);
  const double se_good =
      std::sqrt(direct.error * direct.error + good.error * good.error);
  const double dev_good = std::fabs(direct.value - good.value);
  if (dev_good > 3.0 * se_good)
    f.add(fmt("correct orientation off by %.3g > 3 combined SE %.3g", dev_good,
              se_good));
  mc.seed = 33;
  const bcp::Estimate wrong = bcp::girsanov_importance_mc(
      red, cf, mc, bcp::MeasureDirection::p_to_q);
  const double se_wrong =
      std::sqrt(direct.error * direct.error + wrong.error * wrong.error);
  const double dev_wrong = std::fabs(direct.value - wrong.value);
  if (dev_wrong <= 3.0 * se_wrong)
    f.add(fmt("curved negative control inside the 3 SE band (%.3g <= %.3g)",
              dev_wrong, 3.0 * se_wrong));
  // The designated negative control: flipping the change-of-measure direction
  // on a linear boundary, where the exact answer is known, must miss by a
  // wide statistical margin.
  const auto lin = linear_problem(1.0, 1.0);
  const auto lred = bcp::reduce_one_sided(lin);
  const auto lcf = bcp::compute_coefficients(lred);
  mc.seed = 34;
  const bcp::Estimate lin_ref = bcp::path_mc_one_sided(lin, mc);
  mc.seed = 35;
  const bcp::Estimate lin_wrong = bcp::girsanov_importance_mc(
      lred, lcf, mc, bcp::MeasureDirection::p_to_q);
  const double se_lin = std::sqrt(lin_ref.error * lin_ref.error +
                                  lin_wrong.error * lin_wrong.error);
  const double dev_lin = std::fabs(lin_ref.value - lin_wrong.value);
  if (dev_lin <= 10.0 * se_lin)
    f.add(fmt("negative control only %.3g away (10 SE = %.3g)", dev_lin,
              10.0 * se_lin));
  note = fmt("agree %.2f sigma; controls off %.1f sigma (curved), %.0f sigma "
             "(linear)",
             dev_good / se_good, dev_wrong / se_wrong, dev_lin / se_lin);
  return f.text;
}

// --- criterion 4: hybrid agreement -------------------------------------------
std::string criterion4(std::string& note) {
  Failures f;
  const auto prob = sinusoid_problem();
  bcp::MethodControls ref_ctl;
  ref_ctl.mc.n_paths = 100000;
  ref_ctl.mc.n_steps = 512;
  ref_ctl.mc.seed = 42;
  const bcp::Estimate direct =
      bcp::evaluate_method(prob, bcp::Method::path_mc, ref_ctl);
  bcp::MethodControls hy_ctl;
  hy_ctl.mc.n_paths = 20000;
  hy_ctl.mc.n_steps = 256;
  hy_ctl.mc.seed = 43;
  const bcp::Estimate hy =
      bcp::evaluate_method(prob, bcp::Method::hybrid, hy_ctl);
  const double se =
      std::sqrt(direct.error * direct.error + hy.error * hy.error);
  const double dev = std::fabs(direct.value - hy.value);
  if (dev > 3.0 * se)
    f.add(fmt("marginal off by %.3g > 3 combined SE %.3g", dev, se));

  const auto red = bcp::reduce_one_sided(prob);
  const auto cf = bcp::compute_coefficients(red);
  std::vector<double> curve(red.u.size());
  for (std::size_t i = 0; i < curve.size(); ++i) curve[i] = red.b - red.u[i];
  double worst_sigma = 0.0;
  std::uint64_t seed = 440;
  for (double x : {-1.0, 0.0, 0.5}) {
    bcp::MCControl mc;
    mc.n_paths = 20000;
    mc.n_steps = 256;
    mc.seed = ++seed;
    const bcp::Estimate cond = bcp::conditional_hybrid(
        red, cf, x, mc, bcp::ConditionalMode::corrected);
    const oracle::MCResult ora = oracle::bridge_curve_crossing_mc(
        curve, red.horizon, x, 200000, 9000 + seed);
    const double cse =
        std::sqrt(cond.error * cond.error + ora.se * ora.se);
    const double cdev = std::fabs(cond.value - ora.mean);
    worst_sigma = std::max(worst_sigma, cdev / cse);
    if (cdev > 3.0 * cse)
      f.add(fmt("conditional at x=%.1f off by %.3g > 3 SE %.3g", x, cdev,
                cse));
  }
  note = fmt("marginal %.2f sigma, worst conditional %.2f sigma", dev / se,
             worst_sigma);
  return f.text;
}

// --- criterion 5: endpoint decomposition statistics --------------------------
std::string criterion5(std::string& note) {
  Failures f;
  const double t0 = now_s();
  const auto red = bcp::reduce_one_sided(sinusoid_problem(2048));
  const auto cf = bcp::compute_coefficients(red);

  std::vector<double> tt2(cf.theta_tilde.size());
  for (std::size_t i = 0; i < tt2.size(); ++i)
    tt2[i] = cf.theta_tilde[i] * cf.theta_tilde[i];
  const double int_tt = trapezoid(red.t, cf.theta_tilde);
  const double int_tt2 = trapezoid(red.t, tt2);
  if (std::fabs(int_tt) > 1e-10)
    f.add(fmt("centered-rate integral %.3g > 1e-10", std::fabs(int_tt)));
  if (std::fabs(int_tt2 - 1.0) > 1e-10)
    f.add(fmt("normalized-rate square integral off by %.3g > 1e-10",
              std::fabs(int_tt2 - 1.0)));
  if (std::fabs(cf.i_cross - cf.alpha_tilde) > 1e-10)
    f.add(fmt("cross integral off by %.3g > 1e-10",
              std::fabs(cf.i_cross - cf.alpha_tilde)));

  bcp::MCControl mc;
  mc.n_paths = 100000;
  mc.seed = 51;
  const bcp::DecompositionStats st = bcp::decomposition_stats(red, cf, mc);
  const double n = static_cast<double>(st.n_paths);
  const double rn = std::sqrt(n);
  if (st.degenerate) f.add("unexpectedly degenerate");
  if (st.max_residual > 1e-10)
    f.add(fmt("recomposition residual %.3g > 1e-10", st.max_residual));
  if (std::fabs(st.mean_wtilde) > 3.0 / rn)
    f.add(fmt("P-mean of residual factor %.3g > 3/sqrt(n)",
              std::fabs(st.mean_wtilde)));
  if (std::fabs(st.var_wtilde - 1.0) > 5.0 / rn)
    f.add(fmt("P-variance off by %.3g > 5/sqrt(n)",
              std::fabs(st.var_wtilde - 1.0)));
  if (std::fabs(st.corr_w_wtilde) > 3.0 / rn)
    f.add(fmt("endpoint correlation %.3g > 3/sqrt(n)",
              std::fabs(st.corr_w_wtilde)));
  if (std::fabs(st.q_mean_shifted) > 3.0 / rn)
    f.add(fmt("Q-mean of shifted residual %.3g > 3/sqrt(n)",
              std::fabs(st.q_mean_shifted)));
  if (std::fabs(st.q_var_shifted - 1.0) > 5.0 / rn)
    f.add(fmt("Q-variance of shifted residual off by %.3g > 5/sqrt(n)",
              std::fabs(st.q_var_shifted - 1.0)));
  if (std::fabs(st.q_mean_endpoint) > 3.0 * std::sqrt(red.horizon) / rn)
    f.add(fmt("Q-mean endpoint %.3g > 3*sqrt(T)/sqrt(n)",
              std::fabs(st.q_mean_endpoint)));
  const double secs = now_s() - t0;
  if (secs >= 30.0) f.add(fmt("runtime %.1f s >= 30 s", secs));
  note = fmt("residual %.1e, worst moment dev %.2g, %.1f s", st.max_residual,
             std::max(std::fabs(st.mean_wtilde),
                      std::fabs(st.var_wtilde - 1.0)),
             secs);
  return f.text;
}

// --- criterion 6: bridge crossing formulas vs bridge simulation --------------
std::string criterion6(std::string& note) {
  Failures f;
  const std::size_t kGrid = 129;
  const std::size_t kPaths = 100000;
  double worst_sigma = 0.0;
  std::uint64_t seed = 6000;

  // one-sided conditional formula at five endpoints
  const std::vector<double> one_vals(kGrid, 1.0);
  for (double y : {-1.5, -0.5, 0.0, 0.3, 0.8}) {
    const double formula = bcp::bridge_cross_one_sided(1.0, 1.0, y);
    const oracle::MCResult mcr =
        oracle::bridge_curve_crossing_mc(one_vals, 1.0, y, kPaths, ++seed);
    const double dev = std::fabs(formula - mcr.mean);
    worst_sigma = std::max(worst_sigma, dev / mcr.se);
    if (dev > 3.0 * mcr.se)
      f.add(fmt("one-sided at y=%.1f off by %.3g > 3 SE %.3g", y, dev,
                mcr.se));
  }

  // two-sided formula: flat strip and rising-lower variant
  const std::vector<double> upper(kGrid, 1.0);
  std::vector<double> flat_lower(kGrid, -1.0);
  std::vector<double> rising_lower(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i)
    rising_lower[i] = -1.0 + 0.5 * (static_cast<double>(i) / (kGrid - 1));
  for (double y : {-0.8, -0.3, 0.0, 0.4, 0.8}) {
    const double formula = bcp::bridge_cross_two_sided(1.0, -1.0, 0.0, 1.0, y);
    const oracle::MCResult mcr = oracle::bridge_band_crossing_mc(
        flat_lower, upper, 1.0, y, kPaths, ++seed);
    const double dev = std::fabs(formula - mcr.mean);
    worst_sigma = std::max(worst_sigma, dev / mcr.se);
    if (dev > 3.0 * mcr.se)
      f.add(fmt("strip at y=%.1f off by %.3g > 3 SE %.3g", y, dev, mcr.se));
  }
  for (double y : {-0.4, -0.1, 0.0, 0.3, 0.7}) {
    const double formula = bcp::bridge_cross_two_sided(1.0, -1.0, 0.5, 1.0, y);
    const oracle::MCResult mcr = oracle::bridge_band_crossing_mc(
        rising_lower, upper, 1.0, y, kPaths, ++seed);
    const double dev = std::fabs(formula - mcr.mean);
    worst_sigma = std::max(worst_sigma, dev / mcr.se);
    if (dev > 3.0 * mcr.se)
      f.add(fmt("rising lower at y=%.1f off by %.3g > 3 SE %.3g", y, dev,
                mcr.se));
  }

  // remote lower boundary degrades to the one-sided formula
  double worst_limit = 0.0;
  for (double y : {-1.5, -0.5, 0.0, 0.3, 0.8}) {
    const double two = bcp::bridge_cross_two_sided(1.0, -40.0, 0.0, 1.0, y);
    const double one = bcp::bridge_cross_one_sided(1.0, 1.0, y);
    worst_limit = std::max(worst_limit, std::fabs(two - one));
  }
  if (worst_limit > 1e-9)
    f.add(fmt("remote-lower limit gap %.3g > 1e-9", worst_limit));
  note = fmt("worst %.2f sigma, limit gap %.1e", worst_sigma, worst_limit);
  return f.text;
}

// --- criterion 7: conditional factorization gap ------------------------------
// Frozen regression values for the curved-boundary gaps (seeded run below).
constexpr double kCurvedGapPin[3] = {
    -0.0039255217506590969,
    0.026232256261766521,
    0.082024222499323035,
};

std::string criterion7(std::string& note) {
  Failures f;
  {
    const auto red = bcp::reduce_one_sided(linear_problem(1.0, 1.0));
    const auto cf = bcp::compute_coefficients(red);
    bcp::MCControl mc;
    mc.n_paths = 50000;
    mc.n_steps = 256;
    mc.seed = 71;
    for (double x : {-1.0, 0.0, 0.5}) {
      const bcp::FactorizationGap g = bcp::factorization_gap(red, cf, x, mc);
      if (std::fabs(g.gap) > 3.0 * g.gap_se + 1e-15)
        f.add(fmt("linear gap at x=%.1f is %.3g (SE %.3g)", x, g.gap,
                  g.gap_se));
    }
  }
  const auto red = bcp::reduce_one_sided(sinusoid_problem());
  const auto cf = bcp::compute_coefficients(red);
  const double xs[3] = {-1.0, 0.0, 0.5};
  double gaps[3];
  for (int i = 0; i < 3; ++i) {
    bcp::MCControl mc;
    mc.n_paths = 100000;
    mc.n_steps = 256;
    mc.seed = 72;
    const bcp::FactorizationGap g =
        bcp::factorization_gap(red, cf, xs[i], mc);
    gaps[i] = g.gap;
    if (!std::isfinite(g.gap) || !std::isfinite(g.gap_se) || g.gap_se <= 0.0)
      f.add(fmt("curved gap at x=%.1f not finite", xs[i]));
    if (!std::isnan(kCurvedGapPin[i]) &&
        std::fabs(g.gap - kCurvedGapPin[i]) > 1e-12)
      f.add(fmt("curved gap at x=%.1f drifted from pin by %.3g", xs[i],
                std::fabs(g.gap - kCurvedGapPin[i])));
  }
  std::ostringstream os;
  os.precision(17);
  os << "curved gaps " << gaps[0] << ", " << gaps[1] << ", " << gaps[2];
  note = os.str();
  return f.text;
}

// --- criterion 8: time-split convergence -------------------------------------
std::string criterion8(std::string& note) {
  Failures f;
  bcp::OneSidedProblem quad;
  quad.boundary = bcp::BoundaryCurve::polynomial({1.0, 0.0, 1.0});
  bcp::MethodControls ctl;
  ctl.mc.n_paths = 1000000;
  ctl.mc.n_steps = 512;
  ctl.mc.seed = 81;
  const bcp::Estimate ref =
      bcp::evaluate_method(quad, bcp::Method::path_mc, ctl);

  double prev_gap = 0.0;
  double final_gap = 0.0;
  bool first = true;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    bcp::SplitControl sc;
    sc.n_splits = n;
    const double v = bcp::split_marginal(quad, sc).value;
    const double gap = std::fabs(v - ref.value);
    if (!first && gap > prev_gap + 2.0 * ref.error)
      f.add(fmt("gap grew at %g splits: %.3g after %.3g", double(n), gap,
                prev_gap));
    prev_gap = gap;
    final_gap = gap;
    first = false;
  }
  const double allow = std::max(3.0 * ref.error, 5e-3);
  if (final_gap > allow)
    f.add(fmt("final gap %.3g > %.3g", final_gap, allow));

  bcp::OneSidedProblem flat;  // constant boundary at 1
  double lo = 2.0, hi = -2.0;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    bcp::SplitControl sc;
    sc.n_splits = n;
    const double v = bcp::split_marginal(flat, sc).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo > 1e-6)
    f.add(fmt("constant-boundary spread %.3g > 1e-6", hi - lo));
  note = fmt("final gap %.2g (allowed %.2g), flat spread %.1e", final_gap,
             allow, hi - lo);
  return f.text;
}

// --- criterion 9: scenario-mixture linearity ---------------------------------
std::string criterion9(std::string& note) {
  Failures f;
  const double v1 = bcp::linear_one_sided_marginal(1.0, 1.0, 1.0);
  const double v2 = bcp::linear_one_sided_marginal(0.5, 2.0, 1.0);
  auto mix_value = [&](double w) {
    bcp::ScenarioMixture mix;
    mix.scenarios.push_back({w, linear_problem(1.0, 1.0)});
    mix.scenarios.push_back({1.0 - w, linear_problem(2.0, 0.5)});
    return bcp::mixture_marginal(mix, bcp::Method::closed_form, {}).value;
  };
  const double got = mix_value(0.3);
  const double want = 0.3 * v1 + 0.7 * v2;
  if (std::fabs(got - want) > 1e-6)
    f.add(fmt("mixture off weighted closed forms by %.3g > 1e-6",
              std::fabs(got - want)));
  double worst = 0.0;
  for (double w : {0.25, 0.5, 0.9})
    worst = std::max(worst,
                     std::fabs(mix_value(w) - (w * v1 + (1.0 - w) * v2)));
  if (worst > 1e-12)
    f.add(fmt("weight linearity violated by %.3g > 1e-12", worst));
  note = fmt("closed-form dev %.1e, linearity dev %.1e",
             std::fabs(got - want), worst);
  return f.text;
}

// --- criterion 10: reflection-series truncation robustness -------------------
std::string criterion10(std::string& note) {
  Failures f;
  // Narrow band over a long horizon so the series genuinely needs many rings.
  bcp::SeriesControl coarse{1e-16, 8};
  bcp::SeriesControl fine{1e-16, 16};
  double worst_change = 0.0;
  double worst_margin = 1.0;
  for (double y : {-0.3, 0.0, 0.2}) {
    const bcp::TwoLineSeries a =
        bcp::two_line_bridge_noncross(4.0, y, -0.5, -0.5, 0.5, 0.5, coarse);
    const bcp::TwoLineSeries b =
        bcp::two_line_bridge_noncross(4.0, y, -0.5, -0.5, 0.5, 0.5, fine);
    const double change = std::fabs(a.noncross - b.noncross);
    worst_change = std::max(worst_change, change);
    if (change > 1e-10)
      f.add(fmt("doubling the ring cap moved y=%.1f by %.3g > 1e-10", y,
                change));
    if (a.remainder_bound + 1e-13 < change)
      f.add(fmt("remainder bound %.3g below observed change %.3g",
                a.remainder_bound, change));
    if (a.rings < 4) f.add(fmt("only %g rings summed", double(a.rings)));
    worst_margin = std::min(worst_margin, a.remainder_bound - change);
  }
  note = fmt("max change %.1e, bound slack %.1e", worst_change, worst_margin);
  return f.text;
}

// --- criterion 11: unnormalized diagnostic vs corrected marginal -------------
constexpr double kLinearDiagnosticGap = 0.7721216139363848;

int run_cli(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string criterion11(std::string& note) {
  Failures f;
  bcp::OneSidedProblem flat;  // constant boundary, no drift
  const double lit_flat =
      bcp::evaluate_method(flat, bcp::Method::paper_literal, {}).value;
  const double corr_flat =
      bcp::evaluate_method(flat, bcp::Method::explicit_form, {}).value;
  if (std::fabs(lit_flat - corr_flat) > 1e-8)
    f.add(fmt("driftless constant: literal differs by %.3g > 1e-8",
              std::fabs(lit_flat - corr_flat)));

  const auto lin = linear_problem(1.0, 1.0);
  const double lit =
      bcp::evaluate_method(lin, bcp::Method::paper_literal, {}).value;
  const double corr =
      bcp::evaluate_method(lin, bcp::Method::explicit_form, {}).value;
  const double gap = lit - corr;
  if (std::fabs(gap - kLinearDiagnosticGap) > 2e-6)
    f.add(fmt("diagnostic gap %.10f off pinned value by %.3g", gap,
              std::fabs(gap - kLinearDiagnosticGap)));

  // the compare subcommand must surface the same discrepancy
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bcp_acceptance";
  fs::create_directories(dir);
  const std::string cfg = (dir / "compare.json").string();
  const std::string out = (dir / "compare.csv").string();
  {
    std::ofstream c(cfg);
    c << R"({"problem": {"boundary": {"kind": "linear", "intercept": 1.0,
            "slope": 1.0}}, "methods": ["paper_literal", "explicit"],
            "compare_reference": "explicit"})";
  }
  const int rc = run_cli(std::string(BCP_CLI_EXE) + " compare --config " +
                         cfg + " --out " + out + " 2> " +
                         (dir / "compare.err").string());
  if (rc != 0) {
    f.add(fmt("compare subcommand exited %g", double(rc)));
  } else {
    std::ifstream in(out);
    std::string line, lit_row;
    while (std::getline(in, line))
      if (line.rfind("paper_literal,", 0) == 0) lit_row = line;
    if (lit_row.empty()) {
      f.add("compare output has no paper_literal row");
    } else {
      std::istringstream row(lit_row);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (cells.size() != 5 ||
          std::fabs(std::stod(cells[3]) - kLinearDiagnosticGap) > 2e-6)
        f.add("compare row does not surface the diagnostic gap");
    }
  }
  note = fmt("flat dev %.1e, linear gap %.10f", std::fabs(lit_flat - corr_flat),
             gap);
  return f.text;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<std::string(std::string&)> run;
  };
  const std::vector<Entry> criteria = {
      {"linear-boundary exactness", criterion1},
      {"constant-boundary closed form and path MC", criterion2},
      {"importance-sampling orientation", criterion3},
      {"hybrid agreement with path simulation", criterion4},
      {"endpoint decomposition statistics", criterion5},
      {"bridge crossing formulas vs bridge simulation", criterion6},
      {"conditional factorization gap", criterion7},
      {"time-split convergence", criterion8},
      {"scenario-mixture linearity", criterion9},
      {"reflection-series truncation robustness", criterion10},
      {"unnormalized diagnostic vs corrected marginal", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string note;
    std::string why;
    try {
      why = criteria[i].run(note);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::printf("PASS criterion %zu: %s (%s)\n", i + 1, criteria[i].name,
                  note.c_str());
    } else {
      ++failures;
      std::printf("FAIL criterion %zu: %s — %s\n", i + 1, criteria[i].name,
                  why.c_str());
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
