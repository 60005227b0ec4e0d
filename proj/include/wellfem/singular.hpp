#pragma once

// The analytic line-source pressure field, cutoff functions localizing it,
// and extension operators that lift 1D nodal data into the 3D domain.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "wellfem/errors.hpp"
#include "wellfem/geometry.hpp"

namespace wellfem {

/// Pressure field of a unit-strength line source along a well segment.
/// Evaluations clamp the cylindrical radius at clamp_radius (the borehole
/// radius by default), so values stay finite on the centreline.
class SingularField {
 public:
  enum class Kind {
    InfiniteLine,   ///< -(mu/2 pi kappa) ln(rho)
    FiniteSegment,  ///< finite-length source, decays like 1/|x| far away
    Truncated,      ///< infinite-line field cut to zero beyond truncation_radius
  };

  SingularField(Kind kind, const WellSegment& seg, double kappa, double mu,
                double truncation_radius = 0.0, double clamp_radius = -1.0)
      : kind_(kind), seg_(seg), kappa_(kappa), mu_(mu),
        trunc_(truncation_radius),
        clamp_(clamp_radius > 0.0 ? clamp_radius : seg.radius()) {
    if (!(kappa > 0.0) || !(mu > 0.0))
      throw InvalidArgument("SingularField: kappa and mu must be positive");
    if (kind == Kind::Truncated && !(truncation_radius > clamp_))
      throw InvalidArgument("SingularField: truncation radius must exceed clamp radius");
  }

  Kind kind() const { return kind_; }
  const WellSegment& segment() const { return seg_; }
  double clamp_radius() const { return clamp_; }
  double truncation_radius() const { return trunc_; }

  double value(const Vec3& x) const {
    double rho, t;
    Vec3 dir;
    seg_.cylindrical(x, rho, t, dir);
    return value_cyl(rho, t);
  }

  Vec3 gradient(const Vec3& x) const {
    double rho, t;
    Vec3 dir;
    seg_.cylindrical(x, rho, t, dir);
    double g_rho, g_t;
    gradient_cyl(rho, t, g_rho, g_t);
    return g_rho * dir + g_t * seg_.tangent();
  }

  /// Value in cylindrical coordinates (axial t measured from the segment
  /// start, so the source occupies t in [0, L]).
  double value_cyl(double rho, double t) const {
    rho = std::max(rho, clamp_);
    switch (kind_) {
      case Kind::InfiniteLine:
        return -mu_ / (2.0 * M_PI * kappa_) * std::log(rho);
      case Kind::Truncated:
        return (rho < trunc_)
                   ? mu_ / (2.0 * M_PI * kappa_) * std::log(trunc_ / rho)
                   : 0.0;
      case Kind::FiniteSegment: {
        const double L = seg_.length();
        const double u = L - t;
        const double ra = std::hypot(rho, t);
        const double rb = std::hypot(rho, u);
        // r_b + u and r_a - t suffer cancellation when the point sits past
        // the respective endpoint near the axis; the rho^2 forms do not.
        const double num = (u >= 0.0) ? rb + u : rho * rho / (rb - u);
        const double den = (t <= 0.0) ? ra - t : rho * rho / (ra + t);
        return mu_ / (4.0 * M_PI * kappa_) * std::log(num / den);
      }
    }
    return 0.0;
  }

  void gradient_cyl(double rho, double t, double& g_rho, double& g_t) const {
    rho = std::max(rho, clamp_);
    switch (kind_) {
      case Kind::InfiniteLine:
        g_rho = -mu_ / (2.0 * M_PI * kappa_) / rho;
        g_t = 0.0;
        return;
      case Kind::Truncated:
        g_rho = (rho < trunc_) ? -mu_ / (2.0 * M_PI * kappa_) / rho : 0.0;
        g_t = 0.0;
        return;
      case Kind::FiniteSegment: {
        const double L = seg_.length();
        const double u = L - t;
        const double ra = std::hypot(rho, t);
        const double rb = std::hypot(rho, u);
        const double num = (u >= 0.0) ? rb + u : rho * rho / (rb - u);
        const double den = (t <= 0.0) ? ra - t : rho * rho / (ra + t);
        const double c = mu_ / (4.0 * M_PI * kappa_);
        g_rho = c * (rho / (rb * num) - rho / (ra * den));
        g_t = c * (1.0 / ra - 1.0 / rb);
        return;
      }
    }
  }

 private:
  Kind kind_;
  WellSegment seg_;
  double kappa_, mu_, trunc_, clamp_;
};

/// Smooth weight localizing the singular field near the well. Value depends
/// only on the distance d(x) to the segment.
class CutoffFunction {
 public:
  enum class Kind { Unity, Plateau, Gaussian };

  static CutoffFunction unity(const WellSegment& seg) {
    return CutoffFunction(Kind::Unity, seg, 0.0, 0.0);
  }

  /// 1 for d <= r_inner, 0 for d >= r_outer, C^2 quintic blend between.
  static CutoffFunction plateau(const WellSegment& seg, double r_inner, double r_outer) {
    if (!(r_inner >= 0.0) || !(r_outer > r_inner))
      throw InvalidArgument("CutoffFunction::plateau: need 0 <= r_inner < r_outer");
    return CutoffFunction(Kind::Plateau, seg, r_inner, r_outer);
  }

  /// exp(-d^2 / 2c^2).
  static CutoffFunction gaussian(const WellSegment& seg, double c) {
    if (!(c > 0.0)) throw InvalidArgument("CutoffFunction::gaussian: c must be positive");
    return CutoffFunction(Kind::Gaussian, seg, c, 0.0);
  }

  Kind kind() const { return kind_; }

  double value(const Vec3& x) const {
    switch (kind_) {
      case Kind::Unity:
        return 1.0;
      case Kind::Plateau: {
        const double d = dist_to_segment(x, seg_);
        if (d <= p0_) return 1.0;
        if (d >= p1_) return 0.0;
        const double u = (d - p0_) / (p1_ - p0_);
        return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
      }
      case Kind::Gaussian: {
        const double d = dist_to_segment(x, seg_);
        return std::exp(-d * d / (2.0 * p0_ * p0_));
      }
    }
    return 1.0;
  }

  Vec3 gradient(const Vec3& x) const {
    if (kind_ == Kind::Unity) return Vec3::Zero();
    const double tc = std::clamp(seg_.axial_coord(x), 0.0, seg_.length());
    const Vec3 diff = x - seg_.point_at(tc);
    const double d = diff.norm();
    double dval;  // d/dd of the profile
    if (kind_ == Kind::Plateau) {
      if (d <= p0_ || d >= p1_) return Vec3::Zero();
      const double u = (d - p0_) / (p1_ - p0_);
      dval = -30.0 * u * u * (1.0 - u) * (1.0 - u) / (p1_ - p0_);
    } else {
      if (d < 1e-14) return Vec3::Zero();
      dval = -d / (p0_ * p0_) * std::exp(-d * d / (2.0 * p0_ * p0_));
    }
    if (d < 1e-14) return Vec3::Zero();
    return dval / d * diff;
  }

  /// Radius beyond which the weight is numerically zero (< ~1e-14).
  double support_radius() const {
    switch (kind_) {
      case Kind::Unity:
        return std::numeric_limits<double>::infinity();
      case Kind::Plateau:
        return p1_;
      case Kind::Gaussian:
        return p0_ * std::sqrt(2.0 * std::log(1e14));
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  CutoffFunction(Kind kind, const WellSegment& seg, double p0, double p1)
      : kind_(kind), seg_(seg), p0_(p0), p1_(p1) {}

  Kind kind_;
  WellSegment seg_;
  double p0_, p1_;
};

/// Lifts P1 nodal data on the 1D mesh to a function of the 3D position via
/// the axial coordinate. Past the mesh ends the profile ramps to a constant
/// over delta = 0.05 L with matched value and slope (C^1), so gradients stay
/// bounded everywhere.
class ExtensionOperator {
 public:
  enum class Kind {
    Axial,  ///< piecewise-linear profile (the nodal interpolant itself)
    Rbf,    ///< C^2 cubic polyharmonic interpolant of the nodal values
  };

  ExtensionOperator(Kind kind, const LineMesh1D& mesh)
      : kind_(kind), mesh_(&mesh), delta_(0.05 * mesh.length()) {
    if (kind == Kind::Rbf) build_rbf();
  }

  Kind kind() const { return kind_; }
  const LineMesh1D& mesh1d() const { return *mesh_; }

  /// Weights w_l(t) and their t-derivatives so that the extension of nodal
  /// data f is sum_l f_l w_l(t). Valid for any real t.
  void cardinal(double t, Eigen::VectorXd& vals, Eigen::VectorXd& ders) const {
    const int n = mesh_->n_vertices();
    vals.resize(n);
    ders.resize(n);
    const double L = mesh_->length();
    if (t >= 0.0 && t <= L) {
      cardinal_inside(t, vals, ders);
      return;
    }
    // Past an endpoint: w(t) = w(end) + w'(end) delta g(u), g(u) = u(1-u/2),
    // with u the scaled overshoot clamped at 1; C^1 at the end, constant
    // beyond delta.
    const double end = (t < 0.0) ? 0.0 : L;
    const double over = (t < 0.0) ? -t : t - L;
    const double sgn = (t < 0.0) ? -1.0 : 1.0;
    Eigen::VectorXd v0(n), d0(n);
    cardinal_inside(end, v0, d0);
    const double u = std::min(over / delta_, 1.0);
    const double g = u * (1.0 - 0.5 * u);
    const double dg = (over < delta_) ? (1.0 - u) : 0.0;
    vals = v0 + sgn * delta_ * g * d0;
    ders = dg * d0;
  }

  double value(const Eigen::VectorXd& nodal, const Vec3& x) const {
    Eigen::VectorXd v, d;
    cardinal(mesh_->segment().axial_coord(x), v, d);
    return v.dot(nodal);
  }

  Vec3 gradient(const Eigen::VectorXd& nodal, const Vec3& x) const {
    Eigen::VectorXd v, d;
    cardinal(mesh_->segment().axial_coord(x), v, d);
    return d.dot(nodal) * mesh_->segment().tangent();
  }

 private:
  void cardinal_inside(double t, Eigen::VectorXd& vals, Eigen::VectorXd& ders) const {
    vals.setZero();
    ders.setZero();
    if (kind_ == Kind::Axial) {
      const int c = mesh_->locate(t);
      const auto& cell = mesh_->cells[c];
      const double s0 = mesh_->arc[cell[0]];
      const double len = mesh_->cell_length(c);
      const double xi = (t - s0) / len;
      vals[cell[0]] = 1.0 - xi;
      vals[cell[1]] = xi;
      ders[cell[0]] = -1.0 / len;
      ders[cell[1]] = 1.0 / len;
      return;
    }
    const int n = mesh_->n_vertices();
    Eigen::VectorXd k(n + 2), dk(n + 2);
    for (int j = 0; j < n; ++j) {
      const double r = t - mesh_->arc[j];
      k[j] = std::abs(r) * r * r;
      dk[j] = 3.0 * std::abs(r) * r;
    }
    k[n] = 1.0;
    k[n + 1] = t;
    dk[n] = 0.0;
    dk[n + 1] = 1.0;
    vals = (rbf_inv_t_ * k).head(n);
    ders = (rbf_inv_t_ * dk).head(n);
  }

  void build_rbf() {
    const int n = mesh_->n_vertices();
    for (int i = 1; i < n; ++i)
      if (!(mesh_->arc[i] - mesh_->arc[i - 1] > 1e-14))
        throw InvalidArgument("ExtensionOperator: duplicate interpolation nodes");
    // [K P; P^T 0] with K_ij = |s_i - s_j|^3 and linear tail P = [1 s].
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 2, n + 2);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double r = std::abs(mesh_->arc[i] - mesh_->arc[j]);
        A(i, j) = r * r * r;
      }
      A(i, n) = A(n, i) = 1.0;
      A(i, n + 1) = A(n + 1, i) = mesh_->arc[i];
    }
    rbf_inv_t_ = A.fullPivLu().inverse().transpose();
  }

  Kind kind_;
  const LineMesh1D* mesh_;
  double delta_;
  Eigen::MatrixXd rbf_inv_t_;  // inverse of the interpolation matrix, transposed
};

/// Average of f over the borehole circle at station s (trapezoid in the
/// angle, spectrally accurate for smooth periodic integrands).
template <class F>
double circle_average(const F& f, const WellSegment& seg, double s, int n_theta = 16) {
  if (n_theta < 1) throw InvalidArgument("circle_average: n_theta must be >= 1");
  double acc = 0.0;
  for (int k = 0; k < n_theta; ++k)
    acc += f(seg.circle_point(s, 2.0 * M_PI * k / n_theta));
  return acc / n_theta;
}

/// Corrected transfer coefficient beta / (1 + beta gbar).
inline double beta_star(double beta, double gbar) {
  const double den = 1.0 + beta * gbar;
  if (std::abs(den) < 1e-12)
    throw DegenerateCoefficient("beta_star: 1 + beta*gbar vanishes");
  return beta / den;
}

}  // namespace wellfem
