#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"

#include <cmath>

#include "bcp/errors.hpp"
#include "bcp/estimators.hpp"
#include "oracles.hpp"

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

template <typename F>
bcp::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const bcp::Error& e) {
    return e.code();
  }
  FAIL("expected a bcp::Error");
  return bcp::ErrorCode::ConfigInvalid;
}

bcp::OneSidedProblem constant_problem() {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::constant(1.0);
  return p;
}

bcp::OneSidedProblem linear_problem(double a, double b) {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::linear(b, a);
  return p;
}

bcp::OneSidedProblem sinusoid_problem() {
  bcp::OneSidedProblem p;
  p.boundary = bcp::BoundaryCurve::sinusoid(1.0, 0.25, 2.0 * kPi);
  return p;
}

}  // namespace

TEST_CASE("conditional explicit reduces to the endpoint-shifted bridge") {
  const auto red = bcp::reduce_one_sided(sinusoid_problem());
  for (double x : {-1.0, 0.0, 0.5}) {
    CHECK(bcp::conditional_explicit(red, x) ==
          doctest::Approx(bcp::bridge_cross_one_sided(red.b, red.horizon,
                                                      x + red.u_end()))
              .epsilon(1e-13));
  }
  CHECK(bcp::conditional_explicit(red, red.b - red.u_end() + 0.1) ==
        doctest::Approx(1.0));
}

TEST_CASE("corrected explicit marginal is exact on linear boundaries") {
  for (double a : {0.0, 0.5, 1.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      const auto est =
          bcp::marginal_explicit(bcp::reduce_one_sided(linear_problem(a, b)));
      CHECK_MARGIN(est.value, bcp::linear_one_sided_marginal(a, b, 1.0), 1e-7);
    }
  }
}

TEST_CASE("closed form marginal: linear exactness and applicability") {
  const auto est =
      bcp::closed_form_marginal(bcp::reduce_one_sided(linear_problem(1.0, 1.0)));
  CHECK(est.value == doctest::Approx(0.09041777356648555).epsilon(1e-13));
  CHECK(est.method == bcp::Method::closed_form);

  const auto flat =
      bcp::closed_form_marginal(bcp::reduce_one_sided(constant_problem()));
  CHECK(flat.value == doctest::Approx(0.3173105078629141).epsilon(1e-13));

  CHECK(code_of([&] {
          bcp::closed_form_marginal(bcp::reduce_one_sided(sinusoid_problem()));
        }) == bcp::ErrorCode::NotApplicable);
}

TEST_CASE("paper-literal marginal: pins and divergence from corrected") {
  const auto red = bcp::reduce_one_sided(linear_problem(1.0, 1.0));
  const auto literal = bcp::paper_literal_marginal(red);
  CHECK_MARGIN(literal.value, 0.8625393875028704, 2e-6);
  CHECK(literal.method == bcp::Method::paper_literal);

  const auto corrected = bcp::marginal_explicit(red);
  CHECK_MARGIN(literal.value - corrected.value, 0.7721216139363848, 2e-6);
}

TEST_CASE("paper-literal equals corrected for a driftless constant boundary") {
  const auto red = bcp::reduce_one_sided(constant_problem());
  const auto literal = bcp::paper_literal_marginal(red);
  const auto corrected = bcp::marginal_explicit(red);
  CHECK(std::fabs(literal.value - corrected.value) <= 1e-8);
  CHECK_MARGIN(corrected.value, 0.3173105078629141, 1e-7);
}

TEST_CASE("two-sided marginal: constant strip") {
  bcp::TwoSidedProblem p;  // defaults: strip (-1, 1), beta 0
  const auto est = bcp::marginal_explicit(bcp::reduce_two_sided(p));
  CHECK_MARGIN(est.value, 0.6292225702004761, 1e-6);
}

TEST_CASE("method dispatch on a constant boundary") {
  const bcp::ProblemVariant pv = constant_problem();
  bcp::MethodControls ctrl;
  ctrl.mc.n_paths = 20000;
  ctrl.mc.n_steps = 256;

  const auto closed =
      bcp::evaluate_method(pv, bcp::Method::closed_form, ctrl);
  CHECK(closed.value == doctest::Approx(0.3173105078629141).epsilon(1e-13));

  const auto expl =
      bcp::evaluate_method(pv, bcp::Method::explicit_form, ctrl);
  CHECK_MARGIN(expl.value, 0.3173105078629141, 1e-7);

  const auto split = bcp::evaluate_method(pv, bcp::Method::timesplit, ctrl);
  CHECK_MARGIN(split.value, 0.3173105078629141, 1e-6);

  const auto mc = bcp::evaluate_method(pv, bcp::Method::path_mc, ctrl);
  CHECK(mc.error > 0.0);
  CHECK(std::fabs(mc.value - 0.3173105078629141) <= 4.0 * mc.error);
}

TEST_CASE("method dispatch: hybrid tracks path MC on the sinusoid") {
  const bcp::ProblemVariant pv = sinusoid_problem();
  bcp::MethodControls ctrl;
  ctrl.mc.n_paths = 20000;
  ctrl.mc.n_steps = 256;
  const auto hybrid = bcp::evaluate_method(pv, bcp::Method::hybrid, ctrl);
  const auto mc = bcp::evaluate_method(pv, bcp::Method::path_mc, ctrl);
  const double combined =
      std::sqrt(hybrid.error * hybrid.error + mc.error * mc.error);
  CHECK(std::fabs(hybrid.value - mc.value) <= 4.0 * combined);
}

TEST_CASE("mixture combines closed forms linearly") {
  bcp::ScenarioMixture mix;
  mix.scenarios.push_back({0.5, linear_problem(1.0, 1.0)});
  mix.scenarios.push_back({0.5, constant_problem()});
  bcp::MethodControls ctrl;
  const auto est =
      bcp::mixture_marginal(mix, bcp::Method::closed_form, ctrl);
  CHECK_MARGIN(est.value, 0.20386414071469983, 1e-9);
  CHECK(est.method == bcp::Method::mixture);

  // weight linearity against a manual recombination
  bcp::ScenarioMixture tilted = mix;
  tilted.scenarios[0].weight = 0.25;
  tilted.scenarios[1].weight = 0.75;
  const auto direct =
      bcp::mixture_marginal(tilted, bcp::Method::closed_form, ctrl);
  const double a =
      bcp::evaluate_method(mix.scenarios[0].problem, bcp::Method::closed_form,
                           ctrl)
          .value;
  const double b =
      bcp::evaluate_method(mix.scenarios[1].problem, bcp::Method::closed_form,
                           ctrl)
          .value;
  CHECK(std::fabs(direct.value - (0.25 * a + 0.75 * b)) <= 1e-12);
}

TEST_CASE("mixture over sigma scenarios") {
  bcp::OneSidedProblem narrow = constant_problem();
  bcp::OneSidedProblem wide = constant_problem();
  wide.sigma = 2.0;
  bcp::ScenarioMixture mix;
  mix.scenarios.push_back({0.5, narrow});
  mix.scenarios.push_back({0.5, wide});
  bcp::MethodControls ctrl;
  const auto est =
      bcp::mixture_marginal(mix, bcp::Method::closed_form, ctrl);
  CHECK_MARGIN(est.value, 0.46719279265744395, 1e-9);
}

TEST_CASE("mixture validation") {
  bcp::ScenarioMixture empty;
  CHECK_THROWS_AS(bcp::validate_mixture(empty), bcp::Error);

  bcp::ScenarioMixture off;
  off.scenarios.push_back({0.6, constant_problem()});
  off.scenarios.push_back({0.6, constant_problem()});
  CHECK_THROWS_AS(bcp::validate_mixture(off), bcp::Error);

  bcp::ScenarioMixture sides;
  sides.scenarios.push_back({0.5, constant_problem()});
  sides.scenarios.push_back({0.5, bcp::TwoSidedProblem{}});
  CHECK_THROWS_AS(bcp::validate_mixture(sides), bcp::Error);
}
