// Gauss–Legendre quadrature rules on [0, 1] and affine images of them.
#pragma once

#include <vector>

namespace sct::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// n-point Gauss–Legendre rule on [0, 1]; exact for polynomials of degree
// 2n − 1.  Nodes are computed by Newton iteration on the Legendre recurrence
// and are deterministic.
Rule gauss_legendre_01(int n);

// The same rule mapped affinely onto [a, b] (weights scaled by b − a).
Rule shifted(const Rule& rule, double a, double b);

}  // namespace sct::quad
