// Tests for superconnections: component validation, curvature residuals on
// the chart grid, the frozen flat and non-flat examples, and gauge moves.
#include "doctest.h"
#include "fixtures.hpp"
#include "sct/superconn.hpp"

#include <random>

using namespace sct::superconn;
namespace ex = sct::expr;

TEST_CASE("components must be p-forms of endomorphism degree 1-p") {
  auto chart = ex::box_chart(2);
  GradedDims dims({1, 1});
  Superconnection a(chart, dims);

  // Correct: a 1-form with degree-0 coefficient.
  EndForm good(chart, dims);
  ExprEndo even(dims, 0);
  even.set_entry(0, 0, 0, ex::one());
  good.add_term(0b01, even);
  a.set_component(1, good);
  CHECK(a.max_component() == 1);

  // Wrong form degree for the slot.
  CHECK_THROWS(a.set_component(2, good));

  // Wrong endomorphism degree: 1-form coefficients must be degree 0.
  EndForm bad(chart, dims);
  ExprEndo odd(dims, 1);
  odd.set_entry(0, 0, 0, ex::one());
  bad.add_term(0b01, odd);
  CHECK_THROWS(a.set_component(1, bad));

  // Unset components read back as the zero form.
  CHECK(a.component(5).terms().empty());
}

TEST_CASE("shear connection has curvature of norm one everywhere") {
  auto a = fixtures::shear_connection();
  FlatnessReport r = flatness_residuals(a);
  REQUIRE(r.residuals.size() == 3);  // q = −1, 0, 1
  CHECK(r.residuals[0] == doctest::Approx(0.0));
  CHECK(r.residuals[1] == doctest::Approx(0.0));
  // F₁ = −E ⊗ dx1∧dx2: norm exactly 1 at every grid point.
  CHECK(r.residuals[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max_residual >= 0.5);
  CHECK(!r.is_flat(1e-6));
}

TEST_CASE("failing first-order flatness is reported in slot zero") {
  // A₀ with δ² ≠ 0: two raising steps V⁰→V¹→V².
  auto chart = ex::box_chart(2);
  GradedDims dims({1, 1, 1});
  GradedEndo delta(dims, 1);
  Eigen::MatrixXd one(1, 1);
  one(0, 0) = 1.0;
  delta.set_block(0, one);
  delta.set_block(1, one);
  Superconnection a(chart, dims);
  a.set_component(0, const_term(chart, dims, delta, {}));
  FlatnessReport r = flatness_residuals(a);
  // F_{−1} = −A₀∧A₀ has the single entry δ² = 1 on V⁰ → V².
  CHECK(r.residuals[0] == doctest::Approx(1.0));
}

TEST_CASE("five-step example is flat with a nonzero 2-form component") {
  auto a = fixtures::five_step_flat();
  CHECK(a.component(2).terms().size() == 2);
  // The two degree-(−1) blocks have a nonzero composite: the 2-form part is
  // not nilpotent for bookkeeping reasons elsewhere; flatness still holds.
  GradedDims dims({1, 1, 1, 1, 1});
  auto ma = fixtures::five_step_m(dims, 1.0, 2.0);
  auto mb = fixtures::five_step_m(dims, 3.0, -1.0);
  CHECK(sct::graded::compose(ma, mb).op_norm() > 0.5);

  FlatnessReport r = flatness_residuals(a);
  CHECK(r.max_residual <= 1e-12);
  CHECK(r.is_flat(1e-10));
}

TEST_CASE("gauge transforms preserve flatness and change the components") {
  auto a = fixtures::five_step_flat();
  auto [g, ginv] = fixtures::diagonal_gauge(a.chart(), a.dims());
  Superconnection b = gauge_transform(a, g, ginv);

  // The transformed superconnection gains a connection form −g⁻¹dg.
  CHECK(!b.component(1).terms().empty());
  // And its curvature still vanishes on the grid.
  FlatnessReport r = flatness_residuals(b);
  CHECK(r.max_residual <= 1e-10);

  // The inverse gauge restores the original flatness data and components.
  Superconnection back = gauge_transform(b, ginv, g);
  auto diff0 = back.component(0) - a.component(0);
  auto diff2 = back.component(2) - a.component(2);
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 5; ++i) {
    ex::Env env;
    for (const auto& v : a.chart()->vars) env.set(v, u(rng));
    CHECK(diff0.eval(env).norm() <= 1e-10);
    CHECK(diff2.eval(env).norm() <= 1e-10);
    CHECK(back.component(1).eval(env).norm() <= 1e-10);
  }
}

TEST_CASE("gauge transform rejects a wrong inverse") {
  auto a = fixtures::five_step_flat();
  auto [g, ginv] = fixtures::diagonal_gauge(a.chart(), a.dims());
  CHECK_THROWS(gauge_transform(a, g, g));
}

TEST_CASE("constant term helper normalizes axis order") {
  auto chart = ex::box_chart(2);
  GradedDims dims({1});
  GradedEndo e = GradedEndo::identity(dims);
  ex::Env env;
  env.set("x1", 0.5);
  env.set("x2", 0.5);
  auto fwd = const_term(chart, dims, e, {0, 1}).eval(env);
  auto rev = const_term(chart, dims, e, {1, 0}).eval(env);
  CHECK((fwd + rev).norm() <= 1e-15);
  CHECK(fwd.coeff(0b11, 0).block(0)(0, 0) == doctest::Approx(1.0));
}
