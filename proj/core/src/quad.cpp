#include "sct/quad.hpp"

#include <cmath>
#include <stdexcept>

namespace sct::quad {

Rule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  // Roots of P_n on [-1, 1] by Newton iteration; symmetric, so solve half.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map x ∈ [-1, 1] to [0, 1]; keep nodes in increasing order.
    r.nodes[i] = 0.5 * (1.0 - x);
    r.weights[i] = 0.5 * w;
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[n - 1 - i] = 0.5 * w;
  }
  return r;
}

Rule shifted(const Rule& rule, double a, double b) {
  Rule r = rule;
  for (int i = 0; i < r.size(); ++i) {
    r.nodes[i] = a + (b - a) * rule.nodes[i];
    r.weights[i] = (b - a) * rule.weights[i];
  }
  return r;
}

}  // namespace sct::quad
