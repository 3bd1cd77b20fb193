#include "sct/graded.hpp"

#include <cmath>
#include <stdexcept>

namespace sct::graded {

GradedDims::GradedDims(std::vector<int> dims, int min_degree)
    : dims_(std::move(dims)), min_(min_degree) {
  for (int d : dims_) {
    if (d < 0) throw std::invalid_argument("graded dimension must be nonnegative");
  }
}

int GradedDims::total() const {
  int t = 0;
  for (int d : dims_) t += d;
  return t;
}

int GradedDims::offset(int k) const {
  int off = 0;
  for (int j = min_; j < k; ++j) off += dim(j);
  return off;
}

GradedEndo::GradedEndo(GradedDims dims, int degree)
    : dims_(std::move(dims)), degree_(degree) {
  const int lo = dims_.min_degree(), hi = dims_.max_degree();
  blocks_.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) {
    blocks_.push_back(Eigen::MatrixXd::Zero(dims_.dim(k + degree_), dims_.dim(k)));
  }
}

GradedEndo GradedEndo::identity(const GradedDims& dims) {
  GradedEndo f(dims, 0);
  for (int k = dims.min_degree(); k <= dims.max_degree(); ++k) {
    f.blocks_[static_cast<std::size_t>(k - dims.min_degree())] =
        Eigen::MatrixXd::Identity(dims.dim(k), dims.dim(k));
  }
  return f;
}

Eigen::MatrixXd GradedEndo::block(int k) const {
  if (k < dims_.min_degree() || k > dims_.max_degree()) {
    return Eigen::MatrixXd::Zero(dims_.dim(k + degree_), dims_.dim(k));
  }
  return blocks_[static_cast<std::size_t>(k - dims_.min_degree())];
}

void GradedEndo::set_block(int k, const Eigen::MatrixXd& m) {
  if (k < dims_.min_degree() || k > dims_.max_degree()) {
    throw std::out_of_range("set_block: source degree outside graded range");
  }
  if (m.rows() != dims_.dim(k + degree_) || m.cols() != dims_.dim(k)) {
    throw std::invalid_argument("set_block: block shape mismatch");
  }
  blocks_[static_cast<std::size_t>(k - dims_.min_degree())] = m;
}

namespace {

void require_compatible(const GradedEndo& a, const GradedEndo& b) {
  if (!(a.dims() == b.dims()) || a.degree() != b.degree()) {
    throw std::invalid_argument("graded endomorphisms have mismatched dims or degree");
  }
}

}  // namespace

GradedEndo GradedEndo::operator+(const GradedEndo& other) const {
  require_compatible(*this, other);
  GradedEndo r = *this;
  for (std::size_t i = 0; i < r.blocks_.size(); ++i) r.blocks_[i] += other.blocks_[i];
  return r;
}

GradedEndo GradedEndo::operator-(const GradedEndo& other) const {
  require_compatible(*this, other);
  GradedEndo r = *this;
  for (std::size_t i = 0; i < r.blocks_.size(); ++i) r.blocks_[i] -= other.blocks_[i];
  return r;
}

GradedEndo GradedEndo::operator-() const {
  GradedEndo r = *this;
  for (auto& b : r.blocks_) b = -b;
  return r;
}

GradedEndo GradedEndo::operator*(double s) const {
  GradedEndo r = *this;
  for (auto& b : r.blocks_) b *= s;
  return r;
}

GradedEndo& GradedEndo::operator+=(const GradedEndo& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

GradedEndo& GradedEndo::operator*=(double s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

double GradedEndo::op_norm() const {
  double sq = 0.0;
  for (const auto& b : blocks_) sq += b.squaredNorm();
  return std::sqrt(sq);
}

double GradedEndo::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_) {
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  }
  return m;
}

Eigen::MatrixXd GradedEndo::dense() const {
  const int n = dims_.total();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = dims_.min_degree(); k <= dims_.max_degree(); ++k) {
    const Eigen::MatrixXd b = block(k);
    if (b.size() == 0) continue;
    m.block(dims_.offset(k + degree_), dims_.offset(k), b.rows(), b.cols()) = b;
  }
  return m;
}

GradedEndo compose(const GradedEndo& a, const GradedEndo& b) {
  if (!(a.dims() == b.dims())) {
    throw std::invalid_argument("compose: mismatched graded dims");
  }
  GradedEndo r(a.dims(), a.degree() + b.degree());
  for (int k = a.dims().min_degree(); k <= a.dims().max_degree(); ++k) {
    // b sends V_k into V_{k + deg b}; a then acts from that degree.
    r.set_block(k, a.block(k + b.degree()) * b.block(k));
  }
  return r;
}

GradedEndo super_commutator(const GradedEndo& a, const GradedEndo& b) {
  const bool both_odd = (a.degree() & 1) && (b.degree() & 1);
  GradedEndo ab = compose(a, b);
  GradedEndo ba = compose(b, a);
  return both_odd ? ab + ba : ab - ba;
}

}  // namespace sct::graded
