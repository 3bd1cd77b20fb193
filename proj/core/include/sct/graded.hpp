// Integer-graded vector spaces and graded endomorphisms.
//
// A graded space V = ⊕_k V_k is described by the dimension of each summand
// over a contiguous range of degrees.  A homogeneous endomorphism f of degree
// d is a family of blocks f_k : V_k → V_{k+d}, one per source degree k, and is
// stored densely as small Eigen matrices.  Blocks whose source or target
// degree falls outside the graded range are identically zero and read back as
// empty or zero-shaped matrices; writing them is rejected.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sct::graded {

// Dimensions of a graded vector space over degrees [min_degree, max_degree].
class GradedDims {
 public:
  GradedDims() = default;
  explicit GradedDims(std::vector<int> dims, int min_degree = 0);

  int min_degree() const { return min_; }
  int max_degree() const { return min_ + static_cast<int>(dims_.size()) - 1; }

  // Dimension of V_k; zero outside the stored range.
  int dim(int k) const {
    if (k < min_ || k > max_degree()) return 0;
    return dims_[static_cast<std::size_t>(k - min_)];
  }

  // Total dimension of ⊕_k V_k.
  int total() const;

  // Start of the degree-k block when the summands are concatenated in
  // increasing degree order (used to embed endomorphisms as dense matrices).
  int offset(int k) const;

  bool operator==(const GradedDims&) const = default;

 private:
  std::vector<int> dims_;
  int min_ = 0;
};

// A homogeneous degree-d endomorphism of a graded space.
class GradedEndo {
 public:
  GradedEndo() = default;

  // Zero endomorphism of the given degree; all blocks materialized.
  GradedEndo(GradedDims dims, int degree);

  static GradedEndo identity(const GradedDims& dims);

  int degree() const { return degree_; }
  const GradedDims& dims() const { return dims_; }

  // Block with source degree k, shape dim(k + degree) × dim(k).  Out-of-range
  // source degrees read back as the appropriately shaped zero matrix.
  Eigen::MatrixXd block(int k) const;

  // Overwrite the block with source degree k; the shape must match and k must
  // lie inside the graded range.
  void set_block(int k, const Eigen::MatrixXd& m);

  GradedEndo operator+(const GradedEndo& other) const;
  GradedEndo operator-(const GradedEndo& other) const;
  GradedEndo operator-() const;
  GradedEndo operator*(double s) const;
  GradedEndo& operator+=(const GradedEndo& other);
  GradedEndo& operator*=(double s);

  // Frobenius norm of the dense embedding: sqrt of the summed squared block
  // entries.  The identity on two one-dimensional summands has norm √2.
  double op_norm() const;

  // Largest absolute entry over all blocks.
  double max_abs() const;

  // Dense matrix on ⊕_k V_k with summands concatenated in degree order.
  Eigen::MatrixXd dense() const;

 private:
  GradedDims dims_;
  int degree_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;  // indexed by source degree − min
};

inline GradedEndo operator*(double s, const GradedEndo& f) { return f * s; }

// Composition a ∘ b; the result has degree deg a + deg b.
GradedEndo compose(const GradedEndo& a, const GradedEndo& b);

// Graded commutator a∘b − (−1)^{deg a · deg b} b∘a.
GradedEndo super_commutator(const GradedEndo& a, const GradedEndo& b);

}  // namespace sct::graded
