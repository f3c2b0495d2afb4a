#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "bcp/bridge.hpp"
#include "bcp/errors.hpp"
#include "bcp/estimators.hpp"
#include "bcp/mc.hpp"
#include "oracles.hpp"

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bcp::OneSidedProblem constant_problem() {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::constant(1.0);
  return p;
}

bcp::OneSidedProblem sinusoid_problem() {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::sinusoid(1.0, 0.25, 2.0 * kPi);
  return p;
}

bcp::MCControl small_mc() {
  bcp::MCControl mc;
  mc.n_paths = 20000;
  mc.n_steps = 128;
  mc.seed = 7;
  return mc;
}

}  // namespace

TEST_CASE("path MC hits the constant-boundary closed form") {
  const auto mc = small_mc();
  const auto est = bcp::path_mc_one_sided(constant_problem(), mc);
  CHECK(est.error > 0.0);
  CHECK(std::fabs(est.value - 0.3173105078629141) <= 4.0 * est.error);
  CHECK(est.method == bcp::Method::path_mc);
}

TEST_CASE("path MC is deterministic in the seed") {
  const auto mc = small_mc();
  const auto a = bcp::path_mc_one_sided(constant_problem(), mc);
  const auto b = bcp::path_mc_one_sided(constant_problem(), mc);
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);

  auto other = mc;
  other.seed = 8;
  const auto c = bcp::path_mc_one_sided(constant_problem(), other);
  CHECK(a.value != c.value);
}

TEST_CASE("plain sampling (no antithetic pairing) also works") {
  auto mc = small_mc();
  mc.antithetic = false;
  const auto est = bcp::path_mc_one_sided(constant_problem(), mc);
  CHECK(std::fabs(est.value - 0.3173105078629141) <= 4.0 * est.error);
}

TEST_CASE("two-sided path MC hits the strip value") {
  const auto mc = small_mc();
  bcp::TwoSidedProblem p;  // strip (-1, 1)
  const auto est = bcp::path_mc_two_sided(p, mc);
  CHECK(std::fabs(est.value - 0.6292225702004761) <= 4.0 * est.error);
}

TEST_CASE("importance sampling in the tilted measure is unbiased") {
  const auto mc = small_mc();

  // Linear boundary: the exact value is known, and the wrong orientation is a
  // violent negative control.
  bcp::OneSidedProblem lin;
  lin.boundary = bcp::BoundaryCurve::linear(1.0, 1.0);
  const auto lred = bcp::reduce_one_sided(lin);
  const auto lcf = bcp::compute_coefficients(lred);
  const double exact = bcp::linear_one_sided_marginal(1.0, 1.0, 1.0);
  const auto lgood = bcp::girsanov_importance_mc(
      lred, lcf, mc, bcp::MeasureDirection::q_to_p);
  CHECK(lgood.error > 0.0);
  CHECK(std::fabs(lgood.value - exact) <= 4.0 * lgood.error);
  const auto lbad = bcp::girsanov_importance_mc(
      lred, lcf, mc, bcp::MeasureDirection::p_to_q);
  CHECK(std::fabs(lbad.value - exact) > 10.0 * lbad.error);

  // Curved boundary: matches the unbiased path simulator (the factorized
  // explicit marginal is an approximation here, not the reference).
  const auto prob = sinusoid_problem();
  const auto red = bcp::reduce_one_sided(prob);
  const auto cf = bcp::compute_coefficients(red);
  const auto ref = bcp::path_mc_one_sided(prob, mc);
  const auto good = bcp::girsanov_importance_mc(
      red, cf, mc, bcp::MeasureDirection::q_to_p);
  CHECK(std::fabs(good.value - ref.value) <=
        4.0 * std::sqrt(good.error * good.error + ref.error * ref.error));
}

TEST_CASE("conditional bridge sampler: unit-weight and certain-cross cases") {
  const auto mc = small_mc();

  // Constant tilt rate: the weight is identically one and the sampler must
  // reproduce the pinned-bridge crossing formula.
  bcp::OneSidedProblem lin;
  lin.boundary = bcp::BoundaryCurve::linear(1.0, 1.0);
  const auto red = bcp::reduce_one_sided(lin);
  const auto cf = bcp::compute_coefficients(red);
  REQUIRE(cf.constant_theta());
  for (double x : {-1.0, 0.0, 0.5}) {
    const auto est = bcp::conditional_bridge_mc(red, cf, x, mc,
                                                bcp::ConditionalMode::corrected);
    const double ref =
        bcp::bridge_cross_one_sided(red.b, red.horizon, x + red.u_end());
    CHECK(std::fabs(est.value - ref) <= 4.0 * est.error + 1e-6);
  }

  // Pinned endpoint beyond the boundary: the indicator is identically one and
  // the corrected normalization must average to one.
  const auto sred = bcp::reduce_one_sided(sinusoid_problem());
  const auto scf = bcp::compute_coefficients(sred);
  const double x_cross = sred.b - sred.u_end() + 0.5;
  const auto certain = bcp::conditional_bridge_mc(
      sred, scf, x_cross, mc, bcp::ConditionalMode::corrected);
  CHECK(std::fabs(certain.value - 1.0) <= 4.0 * certain.error);
}

TEST_CASE("conditional bridge sampler matches an independent bridge oracle") {
  const auto red = bcp::reduce_one_sided(sinusoid_problem());
  const auto cf = bcp::compute_coefficients(red);
  const auto mc = small_mc();
  std::vector<double> curve(red.u.size());
  for (std::size_t i = 0; i < curve.size(); ++i) curve[i] = red.b - red.u[i];
  const double x = 0.0;
  const auto est = bcp::conditional_bridge_mc(red, cf, x, mc,
                                              bcp::ConditionalMode::corrected);
  const auto ora =
      oracle::bridge_curve_crossing_mc(curve, red.horizon, x, 100000, 777);
  CHECK(std::fabs(est.value - ora.mean) <=
        4.0 * std::sqrt(est.error * est.error + ora.se * ora.se));
}

TEST_CASE("literal conditional mode: constant tilt rate reduces to display") {
  bcp::OneSidedProblem lin;
  lin.boundary = bcp::BoundaryCurve::linear(1.0, 1.0);
  const auto red = bcp::reduce_one_sided(lin);
  const auto cf = bcp::compute_coefficients(red);
  const auto mc = small_mc();
  const double x = 0.0;
  const auto est = bcp::conditional_bridge_mc(red, cf, x, mc,
                                              bcp::ConditionalMode::literal);
  const double ref = bcp::conditional_literal_explicit(red, cf, x);
  CHECK(std::fabs(est.value - ref) <= 5.0 * est.error + 1e-6);

  // Curved boundary: the pathwise literal value is finite and reproducible.
  const auto sred = bcp::reduce_one_sided(sinusoid_problem());
  const auto scf = bcp::compute_coefficients(sred);
  const auto a = bcp::conditional_bridge_mc(sred, scf, x, mc,
                                            bcp::ConditionalMode::literal);
  const auto b = bcp::conditional_bridge_mc(sred, scf, x, mc,
                                            bcp::ConditionalMode::literal);
  CHECK(std::isfinite(a.value));
  CHECK(a.value > 0.0);
  CHECK(a.error > 0.0);
  CHECK(a.value == b.value);
}

TEST_CASE("decomposition statistics sit inside their bands") {
  const auto red = bcp::reduce_one_sided(sinusoid_problem());
  const auto cf = bcp::compute_coefficients(red);
  const auto mc = small_mc();
  const auto st = bcp::decomposition_stats(red, cf, mc);
  REQUIRE_FALSE(st.degenerate);
  const double rn = std::sqrt(static_cast<double>(st.n_paths));
  CHECK(st.max_residual <= 1e-10);
  CHECK(std::fabs(st.mean_wtilde) <= 4.0 / rn);
  CHECK(std::fabs(st.var_wtilde - 1.0) <= 6.0 / rn);
  CHECK(std::fabs(st.corr_w_wtilde) <= 4.0 / rn);
  CHECK(std::fabs(st.q_mean_shifted) <= 4.0 / rn);
  CHECK(std::fabs(st.q_var_shifted - 1.0) <= 6.0 / rn);
  CHECK(std::fabs(st.q_mean_endpoint) <= 4.0 / rn);
}

TEST_CASE("decomposition is flagged degenerate for a constant tilt rate") {
  bcp::OneSidedProblem lin;
  lin.boundary = bcp::BoundaryCurve::linear(1.0, 1.0);
  const auto red = bcp::reduce_one_sided(lin);
  const auto cf = bcp::compute_coefficients(red);
  const auto st = bcp::decomposition_stats(red, cf, small_mc());
  CHECK(st.degenerate);
}

TEST_CASE("factorization gap vanishes identically for constant tilt rates") {
  bcp::OneSidedProblem lin;
  lin.boundary = bcp::BoundaryCurve::linear(1.0, 1.0);
  const auto red = bcp::reduce_one_sided(lin);
  const auto cf = bcp::compute_coefficients(red);
  for (double x : {-1.0, 0.0, 0.5}) {
    const auto g = bcp::factorization_gap(red, cf, x, small_mc());
    CHECK_MARGIN(g.gap, 0.0, 1e-15);
    CHECK(g.indicator_mean >= 0.0);
    CHECK(g.indicator_mean <= 1.0);
  }
}

TEST_CASE("factorization gap is finite and scaled for the sinusoid") {
  const auto red = bcp::reduce_one_sided(sinusoid_problem());
  const auto cf = bcp::compute_coefficients(red);
  const auto g = bcp::factorization_gap(red, cf, 0.0, small_mc());
  CHECK(g.gap_se > 0.0);
  CHECK(std::isfinite(g.gap));
  CHECK(g.indicator_mean > 0.0);
  CHECK(g.indicator_mean < 1.0);
  CHECK(g.weight_mean > 0.0);
}

TEST_CASE("MC control validation") {
  bcp::MCControl mc;
  mc.n_paths = 0;
  CHECK_THROWS_AS(bcp::validate_mc_control(mc), bcp::Error);
  mc = {};
  mc.n_steps = 0;
  CHECK_THROWS_AS(bcp::validate_mc_control(mc), bcp::Error);
  mc = {};
  mc.workers = 0;
  CHECK_THROWS_AS(bcp::validate_mc_control(mc), bcp::Error);
}
