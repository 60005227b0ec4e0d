#pragma once

// Gauss rules: 1D Gauss-Legendre / Gauss-Jacobi via Golub-Welsch, and
// tetrahedral rules (hardcoded degree-2, conical product for higher degree).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "wellfem/errors.hpp"
#include "wellfem/geometry.hpp"

namespace wellfem {

struct QuadratureRule1D {
  std::vector<double> points;   // in [0,1]
  std::vector<double> weights;
};

namespace detail {

/// Golub-Welsch for the Jacobi weight (1-x)^alpha on [-1,1] (beta = 0),
/// mapped to the weight (1-t)^alpha on [0,1].
inline QuadratureRule1D gauss_jacobi01(int n, double alpha) {
  if (n < 1) throw InvalidArgument("gauss_jacobi01: n must be >= 1");
  const double beta = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + alpha + beta;
    J(k, k) = (k == 0) ? (beta - alpha) / (alpha + beta + 2.0)
                       : (beta * beta - alpha * alpha) / (s * (s + 2.0));
    if (k >= 1) {
      const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta);
      const double den = s * s * (s + 1.0) * (s - 1.0);
      const double off = std::sqrt(num / den);
      J(k, k - 1) = J(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) / (alpha + beta + 1.0);

  QuadratureRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // x in [-1,1] with weight (1-x)^alpha  ->  t = (1+x)/2 with weight
  // (1-t)^alpha, picking up a factor 2^-(alpha+1).
  const double scale = std::pow(2.0, -(alpha + 1.0));
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0 * scale;
  }
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre on [0,1]; exact for polynomials of degree 2n-1.
inline QuadratureRule1D gauss_legendre(int n) {
  return detail::gauss_jacobi01(n, 0.0);
}

struct TetRule {
  std::vector<Vec4> bary;       // barycentric points
  std::vector<double> weights;  // sum to 1; multiply by |T|
};

/// Rule exact for polynomials of total degree <= degree.
inline TetRule tet_rule(int degree) {
  TetRule rule;
  if (degree <= 2) {
    // Classic 4-point degree-2 rule.
    const double a = 0.5854101966249684544614;
    const double b = 0.1381966011250105151795;
    for (int i = 0; i < 4; ++i) {
      Vec4 lam = Vec4::Constant(b);
      lam[i] = a;
      rule.bary.push_back(lam);
      rule.weights.push_back(0.25);
    }
    return rule;
  }
  // Conical product: x = u, y = v(1-u), z = w(1-u-v), Jacobian (1-u)^2(1-v).
  const int n = degree / 2 + 1;
  const QuadratureRule1D qu = detail::gauss_jacobi01(n, 2.0);
  const QuadratureRule1D qv = detail::gauss_jacobi01(n, 1.0);
  const QuadratureRule1D qw = gauss_legendre(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = qu.points[i];
        const double y = qv.points[j] * (1.0 - x);
        const double z = qw.points[k] * (1.0 - x - y);
        rule.bary.emplace_back(1.0 - x - y - z, x, y, z);
        // Reference volume is 1/6; normalize so weights sum to 1.
        rule.weights.push_back(6.0 * qu.weights[i] * qv.weights[j] * qw.weights[k]);
      }
  return rule;
}

}  // namespace wellfem
