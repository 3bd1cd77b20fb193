// Superconnections on a trivialized graded bundle over one chart.
//
// A superconnection is a finite family of components A_p, p ≥ 0, where A_p is
// a p-form with coefficients of endomorphism degree 1 − p (total degree 1).
// A_0 is the degree-raising fiber differential, A_1 the connection form, and
// the higher components are the correction forms.  The curvature is
//
//   F = dA − A ∧ A,    A = Σ_p A_p,
//
// graded by form degree; the superconnection is flat when every graded piece
// vanishes on the chart.
#pragma once

#include "sct/forms.hpp"

#include <map>
#include <vector>

namespace sct::superconn {

using forms::EndForm;
using forms::ExprEndo;
using graded::GradedDims;
using graded::GradedEndo;

class Superconnection {
 public:
  Superconnection() = default;
  Superconnection(expr::ChartPtr chart, GradedDims dims);

  const expr::ChartPtr& chart() const { return chart_; }
  const GradedDims& dims() const { return dims_; }

  // Sets A_p.  Every term of the form must have form degree p and
  // endomorphism degree 1 − p; anything else is rejected.
  void set_component(int p, const EndForm& ap);

  // A_p, the zero form when unset.  Valid for any p ≥ 0.
  EndForm component(int p) const;

  // Largest p with a stored component (−1 when none are set).
  int max_component() const;

  // Σ_p A_p as one inhomogeneous form.
  EndForm total() const;

 private:
  expr::ChartPtr chart_;
  GradedDims dims_;
  std::map<int, EndForm> components_;
};

// Convenience: value ⊗ dx_{axes[0]} ∧ … as a one-term form on the chart.
EndForm const_term(const expr::ChartPtr& chart, const GradedDims& dims,
                   const GradedEndo& value, const std::vector<int>& axes);

struct FlatnessReport {
  // residuals[q + 1] = sup over the sample grid of the norm of the
  // (q+1)-form part of the curvature, for q = −1, 0, …, chart dim − 1.
  std::vector<double> residuals;
  double max_residual = 0.0;

  bool is_flat(double tol) const { return max_residual <= tol; }
};

// Evaluates the curvature on a cell-centered grid with roughly total_points
// sample points spread evenly across the chart box (strictly interior).
FlatnessReport flatness_residuals(const Superconnection& a, int total_points = 0);

// Conjugates the superconnection by an invertible degree-0 gauge g:
//   A'_1 = g⁻¹ A_1 g − g⁻¹ dg,   A'_p = g⁻¹ A_p g   (p ≠ 1).
// g_inv must invert g pointwise; this is spot-checked at random chart points
// before transforming, and a failure throws.
Superconnection gauge_transform(const Superconnection& a, const ExprEndo& g,
                                const ExprEndo& g_inv);

}  // namespace sct::superconn
