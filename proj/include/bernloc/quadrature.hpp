#pragma once

#include <Eigen/Dense>

namespace bernloc {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix
/// of the Legendre recurrence, weights are 2 * (first eigenvector component)^2.
QuadratureRule gauss_legendre(int n);

/// Integrate f over [a, b] with the given rule.
template <typename Fn>
double integrate_rule(const QuadratureRule& rule, double a, double b, Fn&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights(i) * f(mid + half * rule.nodes(i));
  }
  return half * acc;
}

}  // namespace bernloc
