// Parallel transport of a superconnection along families of paths.
//
// A k-parameter family of paths is a piecewise-smooth map
// h : [0,1]^k × [0,1] → U, (w, t) ↦ h(w, t), into the chart.  Pulling the
// superconnection back through h and contracting against ∂/∂t produces a
// form-valued, time-dependent generator over the parameter axes; the
// transport forms Ψ_p(t, s) solve the triangular system
//
//   ∂_t Ψ_p(t, s) = Σ_{i=0}^{p} (A_{i+1}/t)(t) ∧ Ψ_{p−i}(t, s),
//   Ψ_0(s, s) = id,  Ψ_p(s, s) = 0  (p ≥ 1),
//
// where (A_{i+1}/t) is the dt-component of the pullback of A_{i+1}, an i-form
// over the parameter axes.  Ψ_0 = Φ is ordinary parallel transport of the
// connection component; Ψ_p is a p-form of endomorphism degree −p.
//
// Three independent evaluation routes are provided for cross-checking:
// a fixed-step RK4 solve of the coupled system, an iterated-integral series
// (for Φ) by panelwise Gauss collocation, and the first-order product
// approximation over descending partitions.
#pragma once

#include "sct/superconn.hpp"

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace sct::transport {

using forms::CubeForm;
using graded::GradedDims;
using graded::GradedEndo;
using superconn::Superconnection;

// ---------------------------------------------------------------------------
// Path families

// First-order data of the evaluation map at one (w, t): the chart point and
// the matrix of partials [∂h/∂w_1 … ∂h/∂w_k  ∂h/∂t] (time column last).
struct Jet {
  Eigen::VectorXd x;
  Eigen::MatrixXd deriv;  // target_dim × (params + 1)
};

class PathFamily {
 public:
  virtual ~PathFamily() = default;

  virtual int params() const = 0;      // k
  virtual int target_dim() const = 0;  // chart dimension

  // Jet at (w, t).  When t sits on a breakpoint, segment_hint names the smooth
  // piece to differentiate on (its index among the knot intervals); pass −1 to
  // let the family pick the piece containing t in its interior.
  virtual Jet jet(const Eigen::VectorXd& w, double t, int segment_hint) const = 0;

  // Ascending interior time breakpoints (empty for smooth families).
  virtual std::vector<double> breakpoints() const { return {}; }

  // {0} ∪ breakpoints ∪ {1}.
  std::vector<double> knots() const;

  // Index of the knot interval whose closure contains t (ties resolve to the
  // left interval except at t = 0).
  int segment_of(double t) const;
};

using PathPtr = std::shared_ptr<const PathFamily>;

// Family given by symbolic coordinate images over the cube chart
// (w1, …, wk, t); partial derivatives are taken symbolically.
PathPtr smooth_family(expr::ChartPtr cube, std::vector<expr::ExprPtr> images);

// The (k−1)-parameter family obtained by freezing parameter param_index.
PathPtr restrict_param(PathPtr base, int param_index, double value);

// ---------------------------------------------------------------------------
// Pullback through a jet

// Numeric pullback of a form through the first-order data of h at one point:
// the du^S coefficient is Σ_I det(D[I, S]) · (dx^I coefficient at x), with
// rows taken in increasing I and columns in increasing S.  Axes of the result
// are w_1 … w_k, t (axis k).
CubeForm jet_pullback(const forms::EndForm& a, const Jet& jet);

// The dt-component of jet_pullback as a form over the k parameter axes; the
// time axis is last, so extracting it costs no sign.
CubeForm contracted_pullback(const forms::EndForm& a, const Jet& jet);

// ---------------------------------------------------------------------------
// Quadrature and stepping control

struct QuadSpec {
  int rk4_steps = 200;   // RK4 steps per unit of time (scaled per segment)
  int gauss_order = 8;   // Gauss–Legendre points per panel / per axis
  int subdivisions = 4;  // quadrature panels per smooth time segment
};

// ---------------------------------------------------------------------------
// Transport solvers

// Parallel transport Φ(t, s) of the connection component at parameter w,
// by fixed-step RK4 that never straddles a time breakpoint.
GradedEndo transport_phi(const Superconnection& a, const PathFamily& path,
                         const Eigen::VectorXd& w, double s, double t,
                         const QuadSpec& q);

// Iterated-integral series for Φ(t, s) with panelwise Gauss collocation.
// terms is the number of series terms summed; converged reports whether the
// factorial tail bound dropped below threshold before the term cap (60).
struct SeriesResult {
  GradedEndo value;
  int terms = 0;
  bool converged = false;
};
SeriesResult phi_series(const Superconnection& a, const PathFamily& path,
                        const Eigen::VectorXd& w, double s, double t,
                        const QuadSpec& q);

// First-order product approximation over the descending uniform partition
// t = t_0 > t_1 > … > t_n = s:
//   Φ ≈ Π_i (id + A₁(h(t_i)) · (h(t_{i−1}) − h(t_i))),
// factors ordered with the one nearest t leftmost.  Converges at first order.
GradedEndo phi_product_limit(const Superconnection& a, const PathFamily& path,
                             const Eigen::VectorXd& w, double s, double t,
                             int steps);

// The transport forms Ψ_0 … Ψ_pmax at (t, s) and parameter w, solved jointly
// by RK4.  Entry p is a p-form of endomorphism degree −p over the k axes.
std::vector<CubeForm> transport_psi(const Superconnection& a, const PathFamily& path,
                                    const Eigen::VectorXd& w, double s, double t,
                                    int pmax, const QuadSpec& q);

// The same values through the integral recursion
//   Ψ_p(t, s) = Σ_{q<p} ∫_s^t Φ(t, u) ∧ (A_{p−q+1}/u) ∧ Ψ_q(u, s) du
// by composite Gauss panels aligned to the time breakpoints, memoizing
// Ψ_q(u, s) across quadrature nodes.  Independent of the RK4 route above.
std::vector<CubeForm> psi_recursive(const Superconnection& a, const PathFamily& path,
                                    const Eigen::VectorXd& w, double s, double t,
                                    int pmax, const QuadSpec& q);

// Fiber integral ∫_{[0,1]^k} Ψ_k(t, s) over the parameter cube (k = params).
GradedEndo integrate_psi(const Superconnection& a, const PathFamily& path,
                         double s, double t, const QuadSpec& q);

// ---------------------------------------------------------------------------
// Identity residuals

// ‖A₀(h(t)) Φ(t, s) − Φ(t, s) A₀(h(s))‖ for a single path (k = 0).
double chain_map_residual(const Superconnection& a, const PathFamily& path,
                          double s, double t, const QuadSpec& q);

// Boundary identity for a q-parameter family with w-independent endpoints:
//   ‖ A₀ ∫Ψ_q − (−1)^q (∫Ψ_q) A₀ − Σ_{i=1}^q (−1)^i (∫_{w_i=0}Ψ_{q−1} −
//     ∫_{w_i=1}Ψ_{q−1}) ‖
// over the full time interval [0, 1].  Vanishes for flat superconnections.
double stokes_residual(const Superconnection& a, const PathFamily& path,
                       const QuadSpec& q);

}  // namespace sct::transport
