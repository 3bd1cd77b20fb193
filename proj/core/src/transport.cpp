#include "sct/transport.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

namespace sct::transport {

namespace {

std::vector<int> mask_axes(unsigned mask) {
  std::vector<int> axes;
  for (int i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1u) axes.push_back(i);
  }
  return axes;
}

CubeForm form_part(const CubeForm& f, int min_degree, int max_degree) {
  CubeForm out(f.axes(), f.dims());
  for (const auto& [key, coeff] : f.terms()) {
    const int p = forms::form_degree(key.first);
    if (p >= min_degree && p <= max_degree) out.add_term(key.first, coeff);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PathFamily helpers

std::vector<double> PathFamily::knots() const {
  std::vector<double> k{0.0};
  for (double b : breakpoints()) k.push_back(b);
  k.push_back(1.0);
  return k;
}

int PathFamily::segment_of(double t) const {
  const auto k = knots();
  int seg = 0;
  for (std::size_t j = 0; j + 1 < k.size(); ++j) {
    if (k[j] < t) {
      seg = static_cast<int>(j);
    } else {
      break;
    }
  }
  return seg;
}

namespace {

class SmoothFamily final : public PathFamily {
 public:
  SmoothFamily(expr::ChartPtr cube, std::vector<expr::ExprPtr> images)
      : cube_(std::move(cube)), images_(std::move(images)) {
    k_ = cube_->dim() - 1;
    if (k_ < 0 || cube_->index_of("t") != cube_->dim() - 1) {
      throw std::invalid_argument("smooth_family: cube chart must end in t");
    }
    partials_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
      partials_[i].reserve(cube_->dim());
      for (const auto& v : cube_->vars) {
        partials_[i].push_back(expr::diff(images_[i], v));
      }
    }
  }

  int params() const override { return k_; }
  int target_dim() const override { return static_cast<int>(images_.size()); }

  Jet jet(const Eigen::VectorXd& w, double t, int /*segment_hint*/) const override {
    if (w.size() != k_) throw std::invalid_argument("jet: wrong parameter count");
    expr::Env env;
    for (int j = 0; j < k_; ++j) env.set(cube_->vars[j], w[j]);
    env.set("t", t);
    const int m = target_dim();
    Jet out;
    out.x.resize(m);
    out.deriv.resize(m, k_ + 1);
    for (int i = 0; i < m; ++i) {
      out.x[i] = expr::eval(images_[i], env);
      for (int j = 0; j <= k_; ++j) out.deriv(i, j) = expr::eval(partials_[i][j], env);
    }
    return out;
  }

 private:
  expr::ChartPtr cube_;
  std::vector<expr::ExprPtr> images_;
  std::vector<std::vector<expr::ExprPtr>> partials_;
  int k_ = 0;
};

class RestrictedFamily final : public PathFamily {
 public:
  RestrictedFamily(PathPtr base, int index, double value)
      : base_(std::move(base)), index_(index), value_(value) {
    if (index_ < 0 || index_ >= base_->params()) {
      throw std::invalid_argument("restrict_param: index out of range");
    }
  }

  int params() const override { return base_->params() - 1; }
  int target_dim() const override { return base_->target_dim(); }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }

  Jet jet(const Eigen::VectorXd& w, double t, int segment_hint) const override {
    const int k = base_->params();
    Eigen::VectorXd full(k);
    for (int j = 0; j < k; ++j) {
      full[j] = (j < index_) ? w[j] : (j == index_ ? value_ : w[j - 1]);
    }
    Jet bj = base_->jet(full, t, segment_hint);
    Jet out;
    out.x = bj.x;
    out.deriv.resize(bj.deriv.rows(), k);  // k−1 parameters plus time
    int col = 0;
    for (int j = 0; j <= k; ++j) {
      if (j == index_) continue;
      out.deriv.col(col++) = bj.deriv.col(j);
    }
    return out;
  }

 private:
  PathPtr base_;
  int index_;
  double value_;
};

}  // namespace

PathPtr smooth_family(expr::ChartPtr cube, std::vector<expr::ExprPtr> images) {
  return std::make_shared<SmoothFamily>(std::move(cube), std::move(images));
}

PathPtr restrict_param(PathPtr base, int param_index, double value) {
  return std::make_shared<RestrictedFamily>(std::move(base), param_index, value);
}

// ---------------------------------------------------------------------------
// Jet pullback

CubeForm jet_pullback(const forms::EndForm& a, const Jet& jet) {
  const int m = static_cast<int>(jet.x.size());
  const int axes = static_cast<int>(jet.deriv.cols());
  if (a.chart()->dim() != m) {
    throw std::invalid_argument("jet_pullback: point dimension mismatch");
  }
  expr::Env env;
  for (int i = 0; i < m; ++i) env.set(a.chart()->vars[i], jet.x[i]);

  CubeForm out(axes, a.dims());
  for (const auto& [key, coeff] : a.terms()) {
    const std::vector<int> rows = mask_axes(key.first);
    const int p = static_cast<int>(rows.size());
    const GradedEndo value = coeff.eval(env);
    for (unsigned s = 0; s < (1u << axes); ++s) {
      if (std::popcount(s) != p) continue;
      const std::vector<int> cols = mask_axes(s);
      double det = 1.0;
      if (p > 0) {
        Eigen::MatrixXd minor(p, p);
        for (int i = 0; i < p; ++i) {
          for (int j = 0; j < p; ++j) minor(i, j) = jet.deriv(rows[i], cols[j]);
        }
        det = minor.determinant();
      }
      if (det != 0.0) out.add_term(s, value * det);
    }
  }
  return out;
}

CubeForm contracted_pullback(const forms::EndForm& a, const Jet& jet) {
  const int m = static_cast<int>(jet.x.size());
  const int k = static_cast<int>(jet.deriv.cols()) - 1;
  if (a.chart()->dim() != m) {
    throw std::invalid_argument("contracted_pullback: point dimension mismatch");
  }
  expr::Env env;
  for (int i = 0; i < m; ++i) env.set(a.chart()->vars[i], jet.x[i]);

  CubeForm out(k, a.dims());
  for (const auto& [key, coeff] : a.terms()) {
    const std::vector<int> rows = mask_axes(key.first);
    const int p = static_cast<int>(rows.size());
    if (p == 0) continue;  // no dt component
    const GradedEndo value = coeff.eval(env);
    // Column sets: p−1 parameter axes in ascending order, then the time axis,
    // which is last, so the dt factor is already trailing and drops signless.
    for (unsigned s = 0; s < (1u << k); ++s) {
      if (std::popcount(s) != p - 1) continue;
      const std::vector<int> wcols = mask_axes(s);
      Eigen::MatrixXd minor(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p - 1; ++j) minor(i, j) = jet.deriv(rows[i], wcols[j]);
        minor(i, p - 1) = jet.deriv(rows[i], k);  // time column
      }
      const double det = minor.determinant();
      if (det != 0.0) out.add_term(s, value * det);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

struct Segment {
  double lo, hi;
  int hint;
};

std::vector<Segment> clipped_segments(const PathFamily& path, double s, double t) {
  std::vector<Segment> segs;
  const auto kn = path.knots();
  for (std::size_t j = 0; j + 1 < kn.size(); ++j) {
    const double lo = std::max(s, kn[j]);
    const double hi = std::min(t, kn[j + 1]);
    if (hi - lo > 1e-14) segs.push_back({lo, hi, static_cast<int>(j)});
  }
  if (segs.empty() && t > s) segs.push_back({s, t, path.segment_of(0.5 * (s + t))});
  return segs;
}

// Joint RK4 solve of the whole transport state Σ_p Ψ_p as one mixed-degree
// form: ∂_t Ψ = D(t) ∧ Ψ with D the contracted pullback of the total
// superconnection (its 0-form part alone when phi_only).
CubeForm solve_state(const Superconnection& a, const PathFamily& path,
                     const Eigen::VectorXd& w, double s, double t, const QuadSpec& q,
                     bool phi_only) {
  const int k = path.params();
  CubeForm y(k, a.dims());
  y.add_term(0, GradedEndo::identity(a.dims()));
  if (t == s) return y;
  if (t < s) throw std::invalid_argument("transport runs forward: need s <= t");

  const forms::EndForm total = a.total();
  auto slash = [&](double u, int hint) {
    CubeForm d = contracted_pullback(total, path.jet(w, u, hint));
    return phi_only ? form_part(d, 0, 0) : d;
  };

  for (const Segment& seg : clipped_segments(path, s, t)) {
    const int n =
        std::max(1, static_cast<int>(std::ceil(q.rk4_steps * (seg.hi - seg.lo))));
    const double h = (seg.hi - seg.lo) / n;
    for (int i = 0; i < n; ++i) {
      const double t0 = seg.lo + i * h;
      const CubeForm d0 = slash(t0, seg.hint);
      const CubeForm dm = slash(t0 + 0.5 * h, seg.hint);
      const CubeForm d1 = slash(t0 + h, seg.hint);
      const CubeForm s1 = cube_wedge(d0, y);
      const CubeForm s2 = cube_wedge(dm, y + s1 * (0.5 * h));
      const CubeForm s3 = cube_wedge(dm, y + s2 * (0.5 * h));
      const CubeForm s4 = cube_wedge(d1, y + s3 * h);
      y += (s1 + s2 * 2.0 + s3 * 2.0 + s4) * (h / 6.0);
    }
  }
  return y;
}

GradedEndo a0_at(const Superconnection& a, const Eigen::VectorXd& x) {
  expr::Env env;
  for (int i = 0; i < a.chart()->dim(); ++i) env.set(a.chart()->vars[i], x[i]);
  return a.component(0).eval(env).coeff(0u, 1);
}

}  // namespace

GradedEndo transport_phi(const Superconnection& a, const PathFamily& path,
                         const Eigen::VectorXd& w, double s, double t,
                         const QuadSpec& q) {
  return solve_state(a, path, w, s, t, q, true).coeff(0u, 0);
}

std::vector<CubeForm> transport_psi(const Superconnection& a, const PathFamily& path,
                                    const Eigen::VectorXd& w, double s, double t,
                                    int pmax, const QuadSpec& q) {
  const CubeForm state = solve_state(a, path, w, s, t, q, false);
  std::vector<CubeForm> out;
  out.reserve(pmax + 1);
  for (int p = 0; p <= pmax; ++p) out.push_back(form_part(state, p, p));
  return out;
}

SeriesResult phi_series(const Superconnection& a, const PathFamily& path,
                        const Eigen::VectorXd& w, double s, double t,
                        const QuadSpec& q) {
  SeriesResult res;
  const GradedEndo id = GradedEndo::identity(a.dims());
  res.value = id;
  res.converged = true;
  if (t == s) return res;
  if (t < s) throw std::invalid_argument("transport runs forward: need s <= t");

  const forms::EndForm a1 = a.component(1);
  auto generator = [&](double u, int hint) {
    return contracted_pullback(a1, path.jet(w, u, hint)).coeff(0u, 0);
  };

  // Growth bound for the factorial tail: 1.05 × sup‖generator‖ over samples.
  double bnorm = 0.0;
  for (int i = 0; i < 256; ++i) {
    const double u = s + (t - s) * (i + 0.5) / 256.0;
    bnorm = std::max(bnorm, generator(u, path.segment_of(u)).op_norm());
  }
  bnorm *= 1.05;

  // Collocation panels: each smooth segment divided into equal panels, each
  // carrying Gauss nodes and barycentric weights for interpolation.
  const quad::Rule rule = quad::gauss_legendre_01(q.gauss_order);
  const int g = rule.size();
  struct Panel {
    double a, b;
    int hint;
    std::vector<double> tau;
    std::vector<double> bary;
  };
  std::vector<Panel> panels;
  for (const Segment& seg : clipped_segments(path, s, t)) {
    for (int d = 0; d < q.subdivisions; ++d) {
      Panel panel;
      panel.a = seg.lo + (seg.hi - seg.lo) * d / q.subdivisions;
      panel.b = seg.lo + (seg.hi - seg.lo) * (d + 1) / q.subdivisions;
      panel.hint = seg.hint;
      panel.tau.reserve(g);
      for (int l = 0; l < g; ++l) {
        panel.tau.push_back(panel.a + (panel.b - panel.a) * rule.nodes[l]);
      }
      panel.bary.assign(g, 1.0);
      for (int j = 0; j < g; ++j) {
        for (int l = 0; l < g; ++l) {
          if (l != j) panel.bary[j] /= panel.tau[j] - panel.tau[l];
        }
      }
      panels.push_back(std::move(panel));
    }
  }

  // term_nodes[p][j] holds the current series term at panel p's node j; the
  // zeroth term is identically the identity.
  std::vector<std::vector<GradedEndo>> prev(panels.size(),
                                            std::vector<GradedEndo>(g, id));
  GradedEndo acc = id;
  double bound = 1.0;  // (bnorm·(t−s))^n / n!
  res.converged = false;
  for (int n = 1; n <= 60; ++n) {
    std::vector<std::vector<GradedEndo>> cur(panels.size());
    GradedEndo running(a.dims(), 0);  // value of the new term at the panel start
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
      const Panel& panel = panels[pi];
      auto interp = [&](double u) -> GradedEndo {
        for (int j = 0; j < g; ++j) {
          if (std::abs(u - panel.tau[j]) < 1e-14) return prev[pi][j];
        }
        GradedEndo num(a.dims(), prev[pi][0].degree());
        double den = 0.0;
        for (int j = 0; j < g; ++j) {
          const double c = panel.bary[j] / (u - panel.tau[j]);
          den += c;
          num += prev[pi][j] * c;
        }
        return num * (1.0 / den);
      };
      auto integrate_to = [&](double x) {
        GradedEndo sum(a.dims(), 0);
        for (int l = 0; l < g; ++l) {
          const double u = panel.a + (x - panel.a) * rule.nodes[l];
          const double wgt = (x - panel.a) * rule.weights[l];
          sum += graded::compose(generator(u, panel.hint), interp(u)) * wgt;
        }
        return sum;
      };
      cur[pi].reserve(g);
      for (int j = 0; j < g; ++j) cur[pi].push_back(running + integrate_to(panel.tau[j]));
      running += integrate_to(panel.b);
    }
    acc += running;  // running now holds the new term at t
    res.terms = n;
    prev = std::move(cur);
    bound *= bnorm * (t - s) / n;
    if (bound <= 1e-15) {
      res.converged = true;
      break;
    }
  }
  res.value = acc;
  return res;
}

GradedEndo phi_product_limit(const Superconnection& a, const PathFamily& path,
                             const Eigen::VectorXd& w, double s, double t, int steps) {
  const GradedEndo id = GradedEndo::identity(a.dims());
  if (t == s) return id;
  if (t < s) throw std::invalid_argument("transport runs forward: need s <= t");
  if (steps < 1) throw std::invalid_argument("product approximation needs steps >= 1");

  const forms::EndForm a1 = a.component(1);
  GradedEndo acc = id;
  Eigen::VectorXd x_prev = path.jet(w, t, path.segment_of(t)).x;
  for (int i = 1; i <= steps; ++i) {
    const double ti = t - (t - s) * i / steps;
    const Eigen::VectorXd xi = path.jet(w, ti, path.segment_of(ti)).x;
    const Eigen::VectorXd v = x_prev - xi;
    // A₁ at x_i applied to the chord: Σ_j (dx_j coefficient)(x_i) · v_j.
    expr::Env env;
    for (int c = 0; c < a.chart()->dim(); ++c) env.set(a.chart()->vars[c], xi[c]);
    GradedEndo f(a.dims(), 0);
    for (const auto& [key, coeff] : a1.terms()) {
      const int axis = std::countr_zero(key.first);
      f += coeff.eval(env) * v[axis];
    }
    acc = graded::compose(acc, id + f);
    x_prev = xi;
  }
  return acc;
}

std::vector<CubeForm> psi_recursive(const Superconnection& a, const PathFamily& path,
                                    const Eigen::VectorXd& w, double s, double t,
                                    int pmax, const QuadSpec& q) {
  const int k = path.params();
  const forms::EndForm total = a.total();
  const quad::Rule rule = quad::gauss_legendre_01(q.gauss_order);

  auto bits = [](double x) { return std::bit_cast<long long>(x); };

  std::map<long long, CubeForm> dcache;  // v ↦ positive-degree part of D(v)
  auto d_pos = [&](double v) -> const CubeForm& {
    auto it = dcache.find(bits(v));
    if (it == dcache.end()) {
      CubeForm d = contracted_pullback(total, path.jet(w, v, path.segment_of(v)));
      it = dcache.emplace(bits(v), form_part(d, 1, k)).first;
    }
    return it->second;
  };

  std::map<std::pair<long long, long long>, GradedEndo> phicache;
  auto phi = [&](double hi, double lo) -> const GradedEndo& {
    const auto key = std::make_pair(bits(hi), bits(lo));
    auto it = phicache.find(key);
    if (it == phicache.end()) {
      it = phicache.emplace(key, transport_phi(a, path, w, lo, hi, q)).first;
    }
    return it->second;
  };

  std::map<std::pair<int, long long>, CubeForm> cache;
  std::function<CubeForm(int, double)> psi = [&](int p, double u) -> CubeForm {
    if (p == 0) {
      CubeForm f(k, a.dims());
      f.add_term(0, phi(u, s));
      return f;
    }
    const auto ck = std::make_pair(p, bits(u));
    if (auto it = cache.find(ck); it != cache.end()) return it->second;
    CubeForm acc(k, a.dims());
    for (const Segment& seg : clipped_segments(path, s, u)) {
      for (int d = 0; d < q.subdivisions; ++d) {
        const double pa = seg.lo + (seg.hi - seg.lo) * d / q.subdivisions;
        const double pb = seg.lo + (seg.hi - seg.lo) * (d + 1) / q.subdivisions;
        for (int l = 0; l < rule.size(); ++l) {
          const double v = pa + (pb - pa) * rule.nodes[l];
          const double wgt = (pb - pa) * rule.weights[l];
          CubeForm inner(k, a.dims());
          for (int lower = 0; lower < p; ++lower) {
            const CubeForm dpart = form_part(d_pos(v), p - lower, p - lower);
            if (dpart.terms().empty()) continue;
            inner += cube_wedge(dpart, psi(lower, v));
          }
          if (inner.terms().empty()) continue;
          CubeForm phif(k, a.dims());
          phif.add_term(0, phi(u, v));
          acc += cube_wedge(phif, inner) * wgt;
        }
      }
    }
    cache.emplace(ck, acc);
    return acc;
  };

  std::vector<CubeForm> out;
  out.reserve(pmax + 1);
  for (int p = 0; p <= pmax; ++p) out.push_back(psi(p, t));
  return out;
}

GradedEndo integrate_psi(const Superconnection& a, const PathFamily& path, double s,
                         double t, const QuadSpec& q) {
  const int k = path.params();
  const quad::Rule rule = quad::gauss_legendre_01(q.gauss_order);
  auto field = [&](const Eigen::VectorXd& w) {
    return solve_state(a, path, w, s, t, q, false);
  };
  const CubeForm integral = forms::integrate_field(k, a.dims(), rule, field);
  return integral.coeff(integral.full_mask(), -k);
}

double chain_map_residual(const Superconnection& a, const PathFamily& path, double s,
                          double t, const QuadSpec& q) {
  if (path.params() != 0) {
    throw std::invalid_argument("chain_map_residual expects a single path");
  }
  const Eigen::VectorXd w(0);
  const GradedEndo phi = transport_phi(a, path, w, s, t, q);
  const GradedEndo a0_end = a0_at(a, path.jet(w, t, path.segment_of(t)).x);
  const GradedEndo a0_start = a0_at(a, path.jet(w, s, path.segment_of(s)).x);
  return (graded::compose(a0_end, phi) - graded::compose(phi, a0_start)).op_norm();
}

double stokes_residual(const Superconnection& a, const PathFamily& path,
                       const QuadSpec& q) {
  const int qdim = path.params();
  if (qdim < 1) return chain_map_residual(a, path, 0.0, 1.0, q);

  // The identity needs w-independent endpoints; spot-check before integrating.
  const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(qdim, 0.5);
  std::mt19937 rng(0x9e3779b9u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (double tt : {0.0, 1.0}) {
    const Eigen::VectorXd ref = path.jet(w0, tt, path.segment_of(tt)).x;
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd w(qdim);
      for (int i = 0; i < qdim; ++i) w[i] = u01(rng);
      if ((path.jet(w, tt, path.segment_of(tt)).x - ref).norm() > 1e-9) {
        throw std::invalid_argument(
            "stokes_residual: family endpoints move with the parameters");
      }
    }
  }

  const GradedEndo iq = integrate_psi(a, path, 0.0, 1.0, q);
  const GradedEndo a0_end = a0_at(a, path.jet(w0, 1.0, path.segment_of(1.0)).x);
  const GradedEndo a0_start = a0_at(a, path.jet(w0, 0.0, path.segment_of(0.0)).x);
  const double parity = (qdim & 1) ? -1.0 : 1.0;
  const GradedEndo lhs =
      graded::compose(a0_end, iq) - graded::compose(iq, a0_start) * parity;

  // Face sum with the orientation induced by the graded differential: the
  // (−1)^{e} in d together with the cube's merge signs gives each face pair
  // the weight (−1)^{i+q+1}(w_i=0 minus w_i=1).  The degree-(q−1) state of
  // the restricted family is exactly the matching coefficient of the full
  // family, so the faces can be integrated independently.
  const PathPtr alias(PathPtr(), &path);  // non-owning: wrappers share the family
  GradedEndo rhs(a.dims(), 1 - qdim);
  for (int i = 1; i <= qdim; ++i) {
    const GradedEndo low =
        integrate_psi(a, *restrict_param(alias, i - 1, 0.0), 0.0, 1.0, q);
    const GradedEndo high =
        integrate_psi(a, *restrict_param(alias, i - 1, 1.0), 0.0, 1.0, q);
    rhs += (low - high) * (((i + qdim + 1) & 1) ? -1.0 : 1.0);
  }
  return (lhs - rhs).op_norm();
}

}  // namespace sct::transport
