#include "sct/superconn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sct::superconn {

Superconnection::Superconnection(expr::ChartPtr chart, GradedDims dims)
    : chart_(std::move(chart)), dims_(std::move(dims)) {}

void Superconnection::set_component(int p, const EndForm& ap) {
  if (p < 0) throw std::invalid_argument("component index must be nonnegative");
  if (ap.chart() != chart_ || !(ap.dims() == dims_)) {
    throw std::invalid_argument("component lives on a different chart or grading");
  }
  for (const auto& [key, coeff] : ap.terms()) {
    if (forms::form_degree(key.first) != p || key.second != 1 - p) {
      throw std::invalid_argument(
          "component p must be a p-form of endomorphism degree 1 - p");
    }
  }
  components_[p] = ap;
}

EndForm Superconnection::component(int p) const {
  auto it = components_.find(p);
  if (it != components_.end()) return it->second;
  return EndForm(chart_, dims_);
}

int Superconnection::max_component() const {
  return components_.empty() ? -1 : components_.rbegin()->first;
}

EndForm Superconnection::total() const {
  EndForm acc(chart_, dims_);
  for (const auto& [p, ap] : components_) acc = acc + ap;
  return acc;
}

EndForm const_term(const expr::ChartPtr& chart, const GradedDims& dims,
                   const GradedEndo& value, const std::vector<int>& axes) {
  EndForm f(chart, dims);
  f.add_wedge_term(axes, ExprEndo::from_constant(value));
  return f;
}

FlatnessReport flatness_residuals(const Superconnection& a, int total_points) {
  const auto& chart = a.chart();
  const int m = chart->dim();
  if (static_cast<int>(chart->bounds.size()) != m) {
    throw std::invalid_argument("flatness grid needs chart bounds");
  }
  if (total_points <= 0) {
    total_points = 1;
    for (int i = 0; i < std::min(m, 3); ++i) total_points *= 10;
  }
  // Cell-centered uniform grid with about total_points samples.
  const int per_axis = std::max(
      1, static_cast<int>(std::lround(std::pow(double(total_points), 1.0 / m))));

  const EndForm total = a.total();
  const EndForm curvature = forms::ext_d(total) - forms::wedge(total, total);

  FlatnessReport report;
  report.residuals.assign(static_cast<std::size_t>(m) + 1, 0.0);

  std::vector<int> idx(m, 0);
  for (;;) {
    expr::Env env;
    for (int i = 0; i < m; ++i) {
      const auto [lo, hi] = chart->bounds[i];
      env.set(chart->vars[i], lo + (idx[i] + 0.5) * (hi - lo) / per_axis);
    }
    const forms::CubeForm value = curvature.eval(env);
    for (const auto& [key, coeff] : value.terms()) {
      // The (q+1)-form part of the curvature is the flatness obstruction F_q.
      const std::size_t slot = static_cast<std::size_t>(forms::form_degree(key.first));
      report.residuals[slot] = std::max(report.residuals[slot], coeff.op_norm());
    }
    int i = 0;
    while (i < m && ++idx[i] == per_axis) {
      idx[i] = 0;
      ++i;
    }
    if (i == m) break;
  }
  for (double r : report.residuals) report.max_residual = std::max(report.max_residual, r);
  return report;
}

Superconnection gauge_transform(const Superconnection& a, const ExprEndo& g,
                                const ExprEndo& g_inv) {
  const auto& chart = a.chart();
  if (g.degree() != 0 || g_inv.degree() != 0) {
    throw std::invalid_argument("gauge transform needs degree-0 endomorphisms");
  }
  // Spot-check that g_inv inverts g at random interior points.
  std::mt19937 rng(0x5bd1e995u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GradedEndo id = GradedEndo::identity(a.dims());
  for (int trial = 0; trial < 8; ++trial) {
    expr::Env env;
    for (int i = 0; i < chart->dim(); ++i) {
      double lo = 0.0, hi = 1.0;
      if (static_cast<int>(chart->bounds.size()) > i) {
        lo = chart->bounds[i].first;
        hi = chart->bounds[i].second;
      }
      env.set(chart->vars[i], lo + (hi - lo) * u(rng));
    }
    const GradedEndo prod = graded::compose(g.eval(env), g_inv.eval(env));
    if ((prod - id).op_norm() > 1e-10) {
      throw std::invalid_argument("gauge transform: g_inv does not invert g");
    }
  }

  EndForm gform(chart, a.dims());
  gform.add_term(0, g);
  EndForm ginvform(chart, a.dims());
  ginvform.add_term(0, g_inv);

  Superconnection out(chart, a.dims());
  for (int p = 0; p <= a.max_component(); ++p) {
    EndForm conj = forms::wedge(forms::wedge(ginvform, a.component(p)), gform);
    if (p == 1) conj = conj - forms::wedge(ginvform, forms::ext_d(gform));
    out.set_component(p, conj);
  }
  // The connection correction term exists even when A_1 itself is absent.
  if (a.max_component() < 1) {
    EndForm correction = -forms::wedge(ginvform, forms::ext_d(gform));
    out.set_component(1, correction);
  }
  return out;
}

}  // namespace sct::superconn
