#include "sct/forms.hpp"

#include <bit>
#include <stdexcept>

namespace sct::forms {

int form_degree(unsigned mask) { return std::popcount(mask); }

int merge_sign(unsigned a, unsigned b) {
  if (a & b) throw std::invalid_argument("merge_sign: overlapping multi-indices");
  // Inversions of the concatenation (a ascending, b ascending): pairs with an
  // element of a strictly above an element of b.
  int inversions = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    const unsigned bit = rest & ~(rest - 1);
    inversions += std::popcount(a & ~((bit << 1) - 1));
  }
  return (inversions & 1) ? -1 : 1;
}

// ---------------------------------------------------------------------------
// ExprMatrix

ExprMatrix::ExprMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  entries_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
                  expr::zero());
}

const expr::ExprPtr& ExprMatrix::at(int i, int j) const {
  return entries_[static_cast<std::size_t>(i) * cols_ + j];
}

void ExprMatrix::set(int i, int j, expr::ExprPtr e) {
  entries_[static_cast<std::size_t>(i) * cols_ + j] = std::move(e);
}

// ---------------------------------------------------------------------------
// ExprEndo

ExprEndo::ExprEndo(GradedDims dims, int degree)
    : dims_(std::move(dims)), degree_(degree) {
  const int lo = dims_.min_degree(), hi = dims_.max_degree();
  blocks_.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) {
    blocks_.emplace_back(dims_.dim(k + degree_), dims_.dim(k));
  }
}

ExprEndo ExprEndo::from_constant(const GradedEndo& value) {
  ExprEndo r(value.dims(), value.degree());
  for (int k = value.dims().min_degree(); k <= value.dims().max_degree(); ++k) {
    const Eigen::MatrixXd b = value.block(k);
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        if (b(i, j) != 0.0) {
          r.set_entry(k, static_cast<int>(i), static_cast<int>(j),
                      expr::constant(b(i, j)));
        }
      }
    }
  }
  return r;
}

ExprMatrix ExprEndo::block(int k) const {
  if (k < dims_.min_degree() || k > dims_.max_degree()) {
    return ExprMatrix(dims_.dim(k + degree_), dims_.dim(k));
  }
  return blocks_[static_cast<std::size_t>(k - dims_.min_degree())];
}

expr::ExprPtr ExprEndo::entry(int k, int i, int j) const {
  if (k < dims_.min_degree() || k > dims_.max_degree()) return expr::zero();
  return blocks_[static_cast<std::size_t>(k - dims_.min_degree())].at(i, j);
}

void ExprEndo::set_entry(int k, int i, int j, expr::ExprPtr e) {
  if (k < dims_.min_degree() || k > dims_.max_degree()) {
    throw std::out_of_range("set_entry: source degree outside graded range");
  }
  blocks_[static_cast<std::size_t>(k - dims_.min_degree())].set(i, j, std::move(e));
}

void ExprEndo::set_block(int k, const ExprMatrix& m) {
  if (k < dims_.min_degree() || k > dims_.max_degree()) {
    throw std::out_of_range("set_block: source degree outside graded range");
  }
  auto& dst = blocks_[static_cast<std::size_t>(k - dims_.min_degree())];
  if (m.rows() != dst.rows() || m.cols() != dst.cols()) {
    throw std::invalid_argument("set_block: block shape mismatch");
  }
  dst = m;
}

namespace {

template <typename F>
ExprEndo map_entries(const ExprEndo& a, F&& f) {
  ExprEndo r(a.dims(), a.degree());
  for (int k = a.dims().min_degree(); k <= a.dims().max_degree(); ++k) {
    const ExprMatrix b = a.block(k);
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) r.set_entry(k, i, j, f(b.at(i, j)));
    }
  }
  return r;
}

}  // namespace

ExprEndo ExprEndo::operator+(const ExprEndo& other) const {
  if (!(dims_ == other.dims_) || degree_ != other.degree_) {
    throw std::invalid_argument("ExprEndo sum: mismatched dims or degree");
  }
  ExprEndo r(dims_, degree_);
  for (int k = dims_.min_degree(); k <= dims_.max_degree(); ++k) {
    const ExprMatrix a = block(k), b = other.block(k);
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < a.cols(); ++j) {
        r.set_entry(k, i, j, expr::add(a.at(i, j), b.at(i, j)));
      }
    }
  }
  return r;
}

ExprEndo ExprEndo::operator-() const {
  return map_entries(*this, [](const expr::ExprPtr& e) { return expr::neg(e); });
}

ExprEndo ExprEndo::scale(const expr::ExprPtr& s) const {
  return map_entries(*this, [&](const expr::ExprPtr& e) { return expr::mul(s, e); });
}

ExprEndo ExprEndo::deriv(const std::string& variable) const {
  return map_entries(*this,
                     [&](const expr::ExprPtr& e) { return expr::diff(e, variable); });
}

ExprEndo ExprEndo::substitute(const std::map<std::string, expr::ExprPtr>& repl) const {
  return map_entries(*this,
                     [&](const expr::ExprPtr& e) { return expr::substitute(e, repl); });
}

GradedEndo ExprEndo::eval(const expr::Env& env) const {
  GradedEndo r(dims_, degree_);
  for (int k = dims_.min_degree(); k <= dims_.max_degree(); ++k) {
    const ExprMatrix b = block(k);
    Eigen::MatrixXd m(b.rows(), b.cols());
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) m(i, j) = expr::eval(b.at(i, j), env);
    }
    r.set_block(k, m);
  }
  return r;
}

bool ExprEndo::is_structurally_zero() const {
  for (int k = dims_.min_degree(); k <= dims_.max_degree(); ++k) {
    const ExprMatrix b = block(k);
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) {
        if (!expr::is_zero(b.at(i, j))) return false;
      }
    }
  }
  return true;
}

ExprEndo compose(const ExprEndo& a, const ExprEndo& b) {
  if (!(a.dims() == b.dims())) {
    throw std::invalid_argument("compose: mismatched graded dims");
  }
  ExprEndo r(a.dims(), a.degree() + b.degree());
  for (int k = a.dims().min_degree(); k <= a.dims().max_degree(); ++k) {
    const ExprMatrix bb = b.block(k);
    const ExprMatrix ab = a.block(k + b.degree());
    for (int i = 0; i < ab.rows(); ++i) {
      for (int j = 0; j < bb.cols(); ++j) {
        expr::ExprPtr acc = expr::zero();
        for (int l = 0; l < bb.rows(); ++l) {
          acc = expr::add(acc, expr::mul(ab.at(i, l), bb.at(l, j)));
        }
        r.set_entry(k, i, j, std::move(acc));
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// EndForm

EndForm::EndForm(expr::ChartPtr chart, GradedDims dims)
    : chart_(std::move(chart)), dims_(std::move(dims)) {}

void EndForm::add_term(unsigned mask, const ExprEndo& coeff) {
  if (!(coeff.dims() == dims_)) {
    throw std::invalid_argument("add_term: coefficient dims mismatch");
  }
  if (form_degree(mask) > chart_->dim()) {
    throw std::invalid_argument("add_term: mask exceeds chart dimension");
  }
  if (coeff.is_structurally_zero()) return;
  const Key key{mask, coeff.degree()};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, coeff);
  } else {
    it->second = it->second + coeff;
    if (it->second.is_structurally_zero()) terms_.erase(it);
  }
}

void EndForm::add_wedge_term(const std::vector<int>& axes, const ExprEndo& coeff) {
  unsigned mask = 0;
  int inversions = 0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const unsigned bit = 1u << axes[i];
    if (mask & bit) return;  // repeated axis: the wedge vanishes
    for (std::size_t j = 0; j < i; ++j) {
      if (axes[j] > axes[i]) ++inversions;
    }
    mask |= bit;
  }
  add_term(mask, (inversions & 1) ? -coeff : coeff);
}

namespace {

void require_same_shape(const EndForm& a, const EndForm& b) {
  if (a.chart() != b.chart() || !(a.dims() == b.dims())) {
    throw std::invalid_argument("EndForm arithmetic: mismatched chart or dims");
  }
}

}  // namespace

EndForm EndForm::operator+(const EndForm& other) const {
  require_same_shape(*this, other);
  EndForm r = *this;
  for (const auto& [key, coeff] : other.terms_) r.add_term(key.first, coeff);
  return r;
}

EndForm EndForm::operator-(const EndForm& other) const { return *this + (-other); }

EndForm EndForm::operator-() const {
  EndForm r(chart_, dims_);
  for (const auto& [key, coeff] : terms_) r.add_term(key.first, -coeff);
  return r;
}

EndForm EndForm::scale(const expr::ExprPtr& s) const {
  EndForm r(chart_, dims_);
  for (const auto& [key, coeff] : terms_) r.add_term(key.first, coeff.scale(s));
  return r;
}

EndForm EndForm::form_degree_part(int p) const {
  EndForm r(chart_, dims_);
  for (const auto& [key, coeff] : terms_) {
    if (form_degree(key.first) == p) r.add_term(key.first, coeff);
  }
  return r;
}

EndForm EndForm::deriv_coeffs(const std::string& variable) const {
  EndForm r(chart_, dims_);
  for (const auto& [key, coeff] : terms_) r.add_term(key.first, coeff.deriv(variable));
  return r;
}

CubeForm EndForm::eval(const expr::Env& env) const {
  CubeForm r(chart_->dim(), dims_);
  for (const auto& [key, coeff] : terms_) r.add_term(key.first, coeff.eval(env));
  return r;
}

EndForm wedge(const EndForm& a, const EndForm& b) {
  require_same_shape(a, b);
  EndForm r(a.chart(), a.dims());
  for (const auto& [ka, fa] : a.terms()) {
    for (const auto& [kb, fb] : b.terms()) {
      if (ka.first & kb.first) continue;
      int sign = merge_sign(ka.first, kb.first);
      if ((form_degree(ka.first) & 1) && (kb.second & 1)) sign = -sign;
      ExprEndo prod = compose(fa, fb);
      r.add_term(ka.first | kb.first, sign < 0 ? -prod : prod);
    }
  }
  return r;
}

EndForm ext_d(const EndForm& a) {
  const auto& chart = a.chart();
  EndForm r(chart, a.dims());
  for (const auto& [key, coeff] : a.terms()) {
    const int endo_sign = (key.second & 1) ? -1 : 1;
    for (int j = 0; j < chart->dim(); ++j) {
      const unsigned bit = 1u << j;
      if (key.first & bit) continue;
      ExprEndo d = coeff.deriv(chart->vars[j]);
      if (d.is_structurally_zero()) continue;
      const int sign = endo_sign * merge_sign(bit, key.first);
      r.add_term(key.first | bit, sign < 0 ? -d : d);
    }
  }
  return r;
}

namespace {

// Laplace expansion of a small symbolic determinant.
expr::ExprPtr det_expr(const std::vector<std::vector<expr::ExprPtr>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return expr::one();
  if (n == 1) return m[0][0];
  expr::ExprPtr acc = expr::zero();
  for (std::size_t c = 0; c < n; ++c) {
    if (expr::is_zero(m[0][c])) continue;
    std::vector<std::vector<expr::ExprPtr>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<expr::ExprPtr> row;
      row.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != c) row.push_back(m[i][j]);
      }
      minor.push_back(std::move(row));
    }
    expr::ExprPtr term = expr::mul(m[0][c], det_expr(minor));
    acc = (c & 1) ? expr::sub(std::move(acc), std::move(term))
                  : expr::add(std::move(acc), std::move(term));
  }
  return acc;
}

std::vector<int> mask_axes(unsigned mask) {
  std::vector<int> axes;
  for (int i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1u) axes.push_back(i);
  }
  return axes;
}

}  // namespace

EndForm pullback(const EndForm& a, expr::ChartPtr target_chart,
                 const std::vector<expr::ExprPtr>& images) {
  const int src_dim = a.chart()->dim();
  const int dst_dim = target_chart->dim();
  if (static_cast<int>(images.size()) != src_dim) {
    throw std::invalid_argument("pullback: one image expression per source coordinate");
  }
  // Coordinate substitution map and symbolic Jacobian J[i][j] = ∂ images_i/∂ u_j.
  std::map<std::string, expr::ExprPtr> repl;
  for (int i = 0; i < src_dim; ++i) repl[a.chart()->vars[i]] = images[i];
  std::vector<std::vector<expr::ExprPtr>> jac(src_dim);
  for (int i = 0; i < src_dim; ++i) {
    jac[i].reserve(dst_dim);
    for (int j = 0; j < dst_dim; ++j) {
      jac[i].push_back(expr::diff(images[i], target_chart->vars[j]));
    }
  }

  EndForm r(target_chart, a.dims());
  for (const auto& [key, coeff] : a.terms()) {
    const std::vector<int> rows = mask_axes(key.first);
    const int p = static_cast<int>(rows.size());
    const ExprEndo subbed = coeff.substitute(repl);
    // dx^I pulls back to Σ_S det(J[I,S]) du^S over ascending multi-indices S.
    for (unsigned s = 0; s < (1u << dst_dim); ++s) {
      if (std::popcount(s) != p) continue;
      const std::vector<int> cols = mask_axes(s);
      std::vector<std::vector<expr::ExprPtr>> minor(p);
      for (int i = 0; i < p; ++i) {
        minor[i].reserve(p);
        for (int j = 0; j < p; ++j) minor[i].push_back(jac[rows[i]][cols[j]]);
      }
      expr::ExprPtr det = det_expr(minor);
      if (expr::is_zero(det)) continue;
      r.add_term(s, subbed.scale(det));
    }
  }
  return r;
}

std::pair<EndForm, EndForm> split_t(const EndForm& a) {
  const auto& chart = a.chart();
  const int ti = chart->index_of("t");
  if (ti < 0) throw std::invalid_argument("split_t: chart has no variable named t");
  if (ti != chart->dim() - 1) {
    throw std::invalid_argument("split_t: t must be the last chart variable");
  }
  const unsigned tbit = 1u << ti;
  EndForm slash(chart, a.dims());
  EndForm perp(chart, a.dims());
  for (const auto& [key, coeff] : a.terms()) {
    if (key.first & tbit) {
      // t is the last axis, so dropping the trailing dt costs no sign.
      slash.add_term(key.first & ~tbit, coeff);
    } else {
      perp.add_term(key.first, coeff);
    }
  }
  return {slash, perp};
}

// ---------------------------------------------------------------------------
// CubeForm

CubeForm::CubeForm(int axes, GradedDims dims) : axes_(axes), dims_(std::move(dims)) {}

void CubeForm::add_term(unsigned mask, const GradedEndo& coeff) {
  if (!(coeff.dims() == dims_)) {
    throw std::invalid_argument("add_term: coefficient dims mismatch");
  }
  if (form_degree(mask) > axes_) {
    throw std::invalid_argument("add_term: mask exceeds axis count");
  }
  if (coeff.op_norm() == 0.0) return;
  const Key key{mask, coeff.degree()};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, coeff);
  } else {
    it->second += coeff;
    if (it->second.op_norm() == 0.0) terms_.erase(it);
  }
}

GradedEndo CubeForm::coeff(unsigned mask, int endo_degree) const {
  auto it = terms_.find(Key{mask, endo_degree});
  if (it != terms_.end()) return it->second;
  return GradedEndo(dims_, endo_degree);
}

CubeForm CubeForm::operator+(const CubeForm& other) const {
  CubeForm r = *this;
  r += other;
  return r;
}

CubeForm CubeForm::operator-(const CubeForm& other) const { return *this + other * -1.0; }

CubeForm CubeForm::operator*(double s) const {
  CubeForm r(axes_, dims_);
  for (const auto& [key, coeff] : terms_) r.add_term(key.first, coeff * s);
  return r;
}

CubeForm& CubeForm::operator+=(const CubeForm& other) {
  if (axes_ != other.axes_ || !(dims_ == other.dims_)) {
    throw std::invalid_argument("CubeForm sum: mismatched axes or dims");
  }
  for (const auto& [key, coeff] : other.terms_) add_term(key.first, coeff);
  return *this;
}

double CubeForm::norm() const {
  double sq = 0.0;
  for (const auto& [key, coeff] : terms_) {
    const double n = coeff.op_norm();
    sq += n * n;
  }
  return std::sqrt(sq);
}

CubeForm cube_wedge(const CubeForm& a, const CubeForm& b) {
  if (a.axes() != b.axes() || !(a.dims() == b.dims())) {
    throw std::invalid_argument("cube_wedge: mismatched axes or dims");
  }
  CubeForm r(a.axes(), a.dims());
  for (const auto& [ka, fa] : a.terms()) {
    for (const auto& [kb, fb] : b.terms()) {
      if (ka.first & kb.first) continue;
      int sign = merge_sign(ka.first, kb.first);
      if ((form_degree(ka.first) & 1) && (kb.second & 1)) sign = -sign;
      r.add_term(ka.first | kb.first, graded::compose(fa, fb) * static_cast<double>(sign));
    }
  }
  return r;
}

CubeForm integrate_field(int axes, const GradedDims& dims, const quad::Rule& rule,
                         const std::function<CubeForm(const Eigen::VectorXd&)>& field) {
  CubeForm acc(axes, dims);
  if (axes == 0) {
    acc += field(Eigen::VectorXd(0));
    return acc;
  }
  const int n = rule.size();
  std::vector<int> idx(axes, 0);
  Eigen::VectorXd w(axes);
  for (;;) {
    double weight = 1.0;
    for (int i = 0; i < axes; ++i) {
      w[i] = rule.nodes[idx[i]];
      weight *= rule.weights[idx[i]];
    }
    acc += field(w) * weight;
    int i = 0;
    while (i < axes && ++idx[i] == n) {
      idx[i] = 0;
      ++i;
    }
    if (i == axes) break;
  }
  return acc;
}

}  // namespace sct::forms
