// Shared example data for the test suite.
//
// * shear_connection: a connection on the unit square whose curvature has
//   pointwise norm exactly 1 — the standard non-flat witness.
// * five_step_flat: a flat superconnection on [0,1]^3 over a five-step graded
//   space with a nonzero 2-form component built from two anticommuting
//   degree-(−1) blocks whose composite is nonzero.
// * tail_linked_flat: a flat superconnection whose 2-form part has a
//   nonconstant coefficient balanced by a 3-form part through the degree-0
//   bracket, so two-parameter boundary identities have a nonzero left side.
// * diagonal_gauge: an exp(diagonal polynomial) gauge pair for it.
#pragma once

#include "sct/superconn.hpp"

#include <utility>
#include <vector>

namespace fixtures {

using sct::expr::ChartPtr;
using sct::forms::EndForm;
using sct::forms::ExprEndo;
using sct::graded::GradedDims;
using sct::graded::GradedEndo;
using sct::superconn::Superconnection;

inline Superconnection shear_connection() {
  namespace ex = sct::expr;
  ChartPtr chart = ex::box_chart(2);
  GradedDims dims({1});
  EndForm a1(chart, dims);
  ExprEndo coeff(dims, 0);
  coeff.set_entry(0, 0, 0, ex::var("x2"));
  a1.add_term(0b01, coeff);  // x2 ⊗ dx1
  Superconnection a(chart, dims);
  a.set_component(1, a1);
  return a;
}

// Degree-raising differential: V⁰ → V¹ and V³ → V⁴, both with entry 1.
inline GradedEndo five_step_delta(const GradedDims& dims) {
  GradedEndo delta(dims, 1);
  Eigen::MatrixXd one(1, 1);
  one(0, 0) = 1.0;
  delta.set_block(0, one);
  delta.set_block(3, one);
  return delta;
}

// Degree-(−1) block pair (V² → V¹, V³ → V²) with the given entries.
inline GradedEndo five_step_m(const GradedDims& dims, double on2, double on3) {
  GradedEndo m(dims, -1);
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = on2;
  m.set_block(2, b);
  b(0, 0) = on3;
  m.set_block(3, b);
  return m;
}

inline Superconnection five_step_flat() {
  namespace ex = sct::expr;
  ChartPtr chart = ex::box_chart(3);
  GradedDims dims({1, 1, 1, 1, 1});

  Superconnection a(chart, dims);
  a.set_component(0, sct::superconn::const_term(chart, dims, five_step_delta(dims), {}));

  // A₂ = m_a ⊗ dx1∧dx2 + m_b ⊗ dx1∧dx3 with m_a∘m_b ≠ 0 on V³.
  EndForm a2 = sct::superconn::const_term(chart, dims, five_step_m(dims, 1.0, 2.0), {0, 1}) +
               sct::superconn::const_term(chart, dims, five_step_m(dims, 3.0, -1.0), {0, 2});
  a.set_component(2, a2);
  return a;
}

// Building blocks of tail_linked_flat, exposed so tests can state expected
// values: delta raises from V⁰ and V², m lowers from V² and V⁴, n drops two
// from V², V³, V⁴.  They satisfy δ² = 0, δm + mδ = 0 and δn − nδ = −m, which
// makes δ + x₃·m⊗dx₁∧dx₂ + n⊗dx₁∧dx₂∧dx₃ flat.
inline GradedEndo tail_delta(const GradedDims& dims) {
  GradedEndo delta(dims, 1);
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  delta.set_block(0, one);
  delta.set_block(2, one);
  return delta;
}

inline GradedEndo tail_m(const GradedDims& dims) {
  GradedEndo m(dims, -1);
  Eigen::MatrixXd b(1, 1);
  b << 1.0;
  m.set_block(2, b);
  b << -1.0;
  m.set_block(4, b);
  return m;
}

inline GradedEndo tail_n(const GradedDims& dims) {
  GradedEndo n(dims, -2);
  Eigen::MatrixXd b(1, 1);
  b << 1.0;
  n.set_block(2, b);
  n.set_block(4, b);
  b << 2.0;
  n.set_block(3, b);
  return n;
}

inline Superconnection tail_linked_flat() {
  namespace ex = sct::expr;
  ChartPtr chart = ex::box_chart(3);
  GradedDims dims({1, 1, 1, 1, 1});

  Superconnection a(chart, dims);
  a.set_component(0, sct::superconn::const_term(chart, dims, tail_delta(dims), {}));

  // A₂ = x₃·m ⊗ dx1∧dx2 — nonconstant, so dA₂ ≠ 0.
  EndForm a2(chart, dims);
  a2.add_term(0b011u, ExprEndo::from_constant(tail_m(dims)).scale(ex::var("x3")));
  a.set_component(2, a2);

  // A₃ = n ⊗ dx1∧dx2∧dx3 balances dA₂ in the 3-form curvature slot.
  a.set_component(3, sct::superconn::const_term(chart, dims, tail_n(dims), {0, 1, 2}));
  return a;
}

// g = exp(θ_k) blockwise with θ_k small polynomials; returns (g, g⁻¹).
inline std::pair<ExprEndo, ExprEndo> diagonal_gauge(const ChartPtr& chart,
                                                    const GradedDims& dims) {
  namespace ex = sct::expr;
  ExprEndo g(dims, 0), ginv(dims, 0);
  int which = 0;
  for (int k = dims.min_degree(); k <= dims.max_degree(); ++k) {
    for (int i = 0; i < dims.dim(k); ++i, ++which) {
      // Vary the exponent across blocks and coordinates.
      const auto& v = chart->vars[which % chart->dim()];
      ex::ExprPtr theta =
          ex::mul(ex::constant(0.1 * (1 + (which % 3))), ex::var(v));
      if (which % 2 == 0) {
        const auto& v2 = chart->vars[(which + 1) % chart->dim()];
        theta = ex::add(theta, ex::mul(ex::constant(0.05), ex::mul(ex::var(v), ex::var(v2))));
      }
      g.set_entry(k, i, i, ex::exp(theta));
      ginv.set_entry(k, i, i, ex::exp(ex::neg(theta)));
    }
  }
  return {g, ginv};
}

}  // namespace fixtures
