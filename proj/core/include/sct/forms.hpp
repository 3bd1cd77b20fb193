// Endomorphism-valued differential forms on a coordinate chart.
//
// A form is a sum of homogeneous terms  F ⊗ dx^I  where F is a graded
// endomorphism (symbolic entries for EndForm, numeric for CubeForm) of a
// single degree e, and I is a strictly increasing multi-index over the chart
// axes, stored as a bitmask.  All sign conventions are centralized here:
//
//   * product:      (F ⊗ dx^I)(G ⊗ dx^J) = (−1)^{|I|·e_G} (F∘G) ⊗ dx^I∧dx^J
//   * derivative:   d(F ⊗ dx^I) = (−1)^{e_F} Σ_j (∂_j F) ⊗ dx_j ∧ dx^I
//   * contraction:  on a chart whose last axis is the time variable t, write
//                   ω = (ω/t) ∧ dt + ω⊥ with the t-component extracted from
//                   canonically sorted terms without an extra sign.
//
// These choices make the product associative, satisfy the graded Leibniz rule
// d(AB) = (dA)B + (−1)^{|A|} A(dB) with |A| = form degree + endomorphism
// degree, and obey the two contraction identities exercised in the tests.
#pragma once

#include "sct/expr.hpp"
#include "sct/graded.hpp"
#include "sct/quad.hpp"

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sct::forms {

using graded::GradedDims;
using graded::GradedEndo;

// ---------------------------------------------------------------------------
// Multi-index helpers.  Axis i of the chart corresponds to bit (1u << i); the
// wedge factors of dx^I are ordered by increasing axis.

int form_degree(unsigned mask);

// Sign of the permutation that sorts the concatenation (a ascending, b
// ascending) into a single ascending sequence; requires a ∩ b = ∅.
int merge_sign(unsigned a, unsigned b);

// ---------------------------------------------------------------------------
// Matrices and graded endomorphisms with symbolic entries.

class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const expr::ExprPtr& at(int i, int j) const;
  void set(int i, int j, expr::ExprPtr e);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<expr::ExprPtr> entries_;  // row-major
};

// Degree-d endomorphism whose block entries are expressions in chart
// coordinates.  Mirrors graded::GradedEndo.
class ExprEndo {
 public:
  ExprEndo() = default;
  ExprEndo(GradedDims dims, int degree);  // all entries zero

  static ExprEndo from_constant(const GradedEndo& value);

  int degree() const { return degree_; }
  const GradedDims& dims() const { return dims_; }

  // Out-of-range source degrees read back as zero-shaped blocks.
  ExprMatrix block(int k) const;
  expr::ExprPtr entry(int k, int i, int j) const;
  void set_entry(int k, int i, int j, expr::ExprPtr e);
  void set_block(int k, const ExprMatrix& m);

  ExprEndo operator+(const ExprEndo& other) const;
  ExprEndo operator-() const;

  // Scalar function times endomorphism (entrywise, no sign).
  ExprEndo scale(const expr::ExprPtr& s) const;

  // Entrywise partial derivative (no sign; callers add Koszul signs).
  ExprEndo deriv(const std::string& variable) const;

  ExprEndo substitute(const std::map<std::string, expr::ExprPtr>& repl) const;

  GradedEndo eval(const expr::Env& env) const;

  bool is_structurally_zero() const;

 private:
  GradedDims dims_;
  int degree_ = 0;
  std::vector<ExprMatrix> blocks_;  // indexed by source degree − min
};

// Symbolic matrix product a ∘ b (degree adds).
ExprEndo compose(const ExprEndo& a, const ExprEndo& b);

// ---------------------------------------------------------------------------
// Symbolic endomorphism-valued forms.

class EndForm {
 public:
  using Key = std::pair<unsigned, int>;  // (axis mask, endomorphism degree)

  EndForm() = default;
  EndForm(expr::ChartPtr chart, GradedDims dims);

  const expr::ChartPtr& chart() const { return chart_; }
  const GradedDims& dims() const { return dims_; }

  // Adds coeff ⊗ dx^mask; the term key is (mask, coeff.degree()).  Terms with
  // structurally zero coefficients are dropped.
  void add_term(unsigned mask, const ExprEndo& coeff);

  // Adds coeff ⊗ dx_{axes[0]} ∧ dx_{axes[1]} ∧ …, normalizing the factor order
  // to ascending axes with the permutation sign.  Repeated axes give zero.
  void add_wedge_term(const std::vector<int>& axes, const ExprEndo& coeff);

  const std::map<Key, ExprEndo>& terms() const { return terms_; }

  EndForm operator+(const EndForm& other) const;
  EndForm operator-(const EndForm& other) const;
  EndForm operator-() const;
  EndForm scale(const expr::ExprPtr& s) const;

  // Keeps only terms of the given form degree.
  EndForm form_degree_part(int p) const;

  // Entrywise partial derivative of every coefficient; no Koszul sign.  This
  // is the ∂/∂t operator used on time-dependent families, not the exterior
  // derivative.
  EndForm deriv_coeffs(const std::string& variable) const;

  // Numeric snapshot at a point: coefficients evaluated, masks kept.
  class CubeForm eval(const expr::Env& env) const;

 private:
  expr::ChartPtr chart_;
  GradedDims dims_;
  std::map<Key, ExprEndo> terms_;
};

// Wedge product with the sign convention in the header comment.
EndForm wedge(const EndForm& a, const EndForm& b);

// Exterior derivative with the sign convention in the header comment.
EndForm ext_d(const EndForm& a);

// Pullback along the map whose i-th source coordinate is images[i], an
// expression in the coordinates of target_chart.  Coefficients are composed
// with the map and dx^I expands through minors of the symbolic Jacobian.
EndForm pullback(const EndForm& a, expr::ChartPtr target_chart,
                 const std::vector<expr::ExprPtr>& images);

// On a chart whose last variable is named "t": ω = first ∧ dt + second.
// Both parts live on the same chart and may still depend on t.
std::pair<EndForm, EndForm> split_t(const EndForm& a);

// ---------------------------------------------------------------------------
// Numeric endomorphism-valued forms over k unnamed axes.

class CubeForm {
 public:
  using Key = std::pair<unsigned, int>;  // (axis mask, endomorphism degree)

  CubeForm() = default;
  CubeForm(int axes, GradedDims dims);

  int axes() const { return axes_; }
  const GradedDims& dims() const { return dims_; }
  unsigned full_mask() const { return (axes_ >= 32) ? ~0u : ((1u << axes_) - 1u); }

  void add_term(unsigned mask, const GradedEndo& coeff);

  const std::map<Key, GradedEndo>& terms() const { return terms_; }

  // Coefficient of dx^mask at the given endomorphism degree (zero if absent).
  GradedEndo coeff(unsigned mask, int endo_degree) const;

  CubeForm operator+(const CubeForm& other) const;
  CubeForm operator-(const CubeForm& other) const;
  CubeForm operator*(double s) const;
  CubeForm& operator+=(const CubeForm& other);

  // sqrt of the summed squared block entries over all terms.
  double norm() const;

 private:
  int axes_ = 0;
  GradedDims dims_;
  std::map<Key, GradedEndo> terms_;
};

inline CubeForm operator*(double s, const CubeForm& f) { return f * s; }

// Wedge product of numeric forms; same sign convention as the symbolic one.
CubeForm cube_wedge(const CubeForm& a, const CubeForm& b);

// Tensor-product Gauss–Legendre integral of a form-valued field over the unit
// cube [0,1]^axes, termwise in (mask, degree).
CubeForm integrate_field(int axes, const GradedDims& dims, const quad::Rule& rule,
                         const std::function<CubeForm(const Eigen::VectorXd&)>& field);

}  // namespace sct::forms
