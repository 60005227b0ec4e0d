#pragma once

// Manufactured solutions on the unit cube with a vertical well, used by the
// convergence studies and by the self-check that guards every experiment.

#include <cmath>
#include <string>

#include "wellfem/coupling.hpp"
#include "wellfem/errors.hpp"
#include "wellfem/fem.hpp"
#include "wellfem/geometry.hpp"
#include "wellfem/singular.hpp"

namespace wellfem {

/// A complete problem description: geometry, coefficients, and the exact
/// fields. The full pressure p_exact clamps the cylindrical radius at the
/// borehole radius, so it is finite everywhere.
struct ManufacturedCase {
  std::string id;
  double radius = 0.0;
  Vec3 box_lo = Vec3::Zero(), box_hi = Vec3::Ones();
  Vec3 seg_a, seg_b;
  ModelParams params;
  SingularField::Kind kernel_kind = SingularField::Kind::InfiniteLine;
  CutoffFunction::Kind cutoff_kind = CutoffFunction::Kind::Unity;
  double cutoff_c = 0.0;  ///< Gaussian width when cutoff_kind == Gaussian
  ExtensionOperator::Kind extension_kind = ExtensionOperator::Kind::Axial;
  int mesh1d_divisor = 1;  ///< 1D mesh resolution m = n / divisor

  ScalarField3D p_exact;   ///< full pressure, radius clamped at the borehole
  ScalarField3D p_model;   ///< unclamped line-source pressure, singular on the well
  ScalarField3D v_exact;   ///< smooth remainder of p_exact
  ScalarField3D v_split;   ///< exact regular part of the split formulation
  ScalarField1D phat_exact;
  ScalarField1D beta, beta_hat;
  ScalarField3D v_source;  ///< -div((kappa/mu) grad v_exact), analytic
  VectorField3D v_grad;    ///< grad v_exact
  VectorField3D p_grad;    ///< grad p_exact (clamped like p_exact)
  ScalarField1D phat_ds;   ///< d/ds phat_exact

  WellSegment segment() const { return WellSegment(seg_a, seg_b, radius); }

  CutoffFunction make_cutoff(const WellSegment& seg) const {
    switch (cutoff_kind) {
      case CutoffFunction::Kind::Unity:
        return CutoffFunction::unity(seg);
      case CutoffFunction::Kind::Gaussian:
        return CutoffFunction::gaussian(seg, cutoff_c);
      case CutoffFunction::Kind::Plateau:
        return CutoffFunction::plateau(seg, cutoff_c, 2.0 * cutoff_c);
    }
    return CutoffFunction::unity(seg);
  }

  /// Bundle the model for a given 1D mesh (which must outlive the result).
  WellModel make_model(const LineMesh1D& mesh1d) const {
    const WellSegment& seg = mesh1d.segment();
    SingularField kernel(kernel_kind, seg, params.kappa, params.mu);
    return WellModel(kernel, make_cutoff(seg),
                     ExtensionOperator(extension_kind, mesh1d), beta, beta_hat);
  }

  /// Dirichlet data: exact trace of v (split system) or p (standard) on the
  /// cube boundary, exact well pressure at the 1D endpoints.
  BcData make_bc(const FESpace3D& V, const FESpace1D& What, Formulation form) const {
    BcData bc;
    const ScalarField3D& g = (form == Formulation::Srb) ? v_split : p_exact;
    for (int d : V.boundary_dofs)
      bc.dirichlet_3d.emplace_back(d, g(V.mesh().vertices[d]));
    for (int d : What.boundary_dofs)
      bc.dirichlet_1d.emplace_back(d, phat_exact(What.mesh().arc[d]));
    return bc;
  }
};

/// Vertical well through the whole cube, infinite-line kernel, no cutoff.
/// All coefficients depend on the borehole radius R.
inline ManufacturedCase make_case1(double R) {
  if (!(R > 0.0 && R < 0.5)) throw InvalidArgument("make_case1: need 0 < R < 0.5");
  ManufacturedCase mc;
  mc.id = "case1";
  mc.radius = R;
  mc.seg_a = Vec3(0.5, 0.5, 0.0);
  mc.seg_b = Vec3(0.5, 0.5, 1.0);
  mc.params = {1.0, 1.0, 1.0};
  mc.kernel_kind = SingularField::Kind::InfiniteLine;
  mc.cutoff_kind = CutoffFunction::Kind::Unity;
  mc.extension_kind = ExtensionOperator::Kind::Axial;
  mc.mesh1d_divisor = 1;

  const double lnR = std::log(R);
  auto rad = [](const Vec3& x) { return std::hypot(x[0] - 0.5, x[1] - 0.5); };

  mc.v_exact = [rad](const Vec3& x) {
    const double r = rad(x);
    const double r2lnr = (r > 0.0) ? r * r * (std::log(r) - 1.0) : 0.0;
    return 3.0 / (4.0 * M_PI) * x[2] * r2lnr;
  };
  mc.p_exact = [rad, R, v = mc.v_exact](const Vec3& x) {
    const double r = std::max(rad(x), R);
    return -(x[2] * x[2] * x[2] + 1.0) / (2.0 * M_PI) * std::log(r) + v(x);
  };
  mc.p_model = [rad, v = mc.v_exact](const Vec3& x) {
    const double r = std::max(rad(x), 1e-300);
    return -(x[2] * x[2] * x[2] + 1.0) / (2.0 * M_PI) * std::log(r) + v(x);
  };
  mc.v_split = mc.v_exact;  // unit cutoff: the split leaves exactly v
  mc.phat_exact = [lnR, R](double s) {
    return (1.0 - lnR) / (2.0 * M_PI) * (s * s * s + 1.0 - 1.5 * R * R * s);
  };
  mc.beta = [](double) { return 2.0 * M_PI; };
  mc.beta_hat = [lnR](double s) {
    return 6.0 * s * (1.0 - lnR) / (s * s * s + 1.0);
  };
  // -Lap v = 6 z * (-(1/2 pi) ln r): the smooth remainder of the line source.
  mc.v_source = [rad](const Vec3& x) {
    const double r = rad(x);
    return (r > 0.0) ? -6.0 * x[2] * std::log(r) / (2.0 * M_PI) : 0.0;
  };
  mc.v_grad = [rad](const Vec3& x) {
    const double r = rad(x);
    if (r == 0.0) return Vec3(0.0, 0.0, 0.0);
    const double cxy = 3.0 / (4.0 * M_PI) * x[2] * (2.0 * std::log(r) - 1.0);
    return Vec3(cxy * (x[0] - 0.5), cxy * (x[1] - 0.5),
                3.0 / (4.0 * M_PI) * r * r * (std::log(r) - 1.0));
  };
  mc.p_grad = [rad, R, vg = mc.v_grad](const Vec3& x) {
    const double r = rad(x);
    const double z3 = x[2] * x[2] * x[2];
    Vec3 g = vg(x);
    if (r >= R) {
      const double cxy = -(z3 + 1.0) / (2.0 * M_PI * r * r);
      g[0] += cxy * (x[0] - 0.5);
      g[1] += cxy * (x[1] - 0.5);
    }
    g[2] += -3.0 * x[2] * x[2] * std::log(std::max(r, R)) / (2.0 * M_PI);
    return g;
  };
  mc.phat_ds = [lnR, R](double s) {
    return (1.0 - lnR) / (2.0 * M_PI) * (3.0 * s * s - 1.5 * R * R);
  };
  return mc;
}

/// Well occupying the middle half of the cube axis, finite-segment kernel,
/// Gaussian cutoff, smooth (RBF) extension.
inline ManufacturedCase make_case2(double R = 1e-4) {
  if (!(R > 0.0 && R < 0.1)) throw InvalidArgument("make_case2: need 0 < R < 0.1");
  ManufacturedCase mc;
  mc.id = "case2";
  mc.radius = R;
  mc.seg_a = Vec3(0.5, 0.5, 0.25);
  mc.seg_b = Vec3(0.5, 0.5, 0.75);
  mc.params = {1.0, 1.0, 1.0};
  mc.kernel_kind = SingularField::Kind::FiniteSegment;
  mc.cutoff_kind = CutoffFunction::Kind::Gaussian;
  mc.cutoff_c = 0.04;
  mc.extension_kind = ExtensionOperator::Kind::Rbf;
  mc.mesh1d_divisor = 2;

  const WellSegment seg(mc.seg_a, mc.seg_b, R);
  const SingularField G(SingularField::Kind::FiniteSegment, seg, 1.0, 1.0);

  mc.v_exact = [a = mc.seg_a, b = mc.seg_b](const Vec3& x) {
    return ((x - b).norm() - (x - a).norm()) / (4.0 * M_PI);
  };
  mc.p_exact = [G, v = mc.v_exact](const Vec3& x) {
    return x[2] * G.value(x) + v(x);
  };
  mc.p_model = [Gu = SingularField(SingularField::Kind::FiniteSegment, seg, 1.0, 1.0,
                                   0.0, 1e-300),
                v = mc.v_exact](const Vec3& x) {
    return x[2] * Gu.value(x) + v(x);
  };
  // The split solves for v = p - z Psi G; the cutoff leaves the full
  // singular part z G active only near the well.
  mc.v_split = [G, psi = CutoffFunction::gaussian(seg, mc.cutoff_c),
                p = mc.p_exact](const Vec3& x) {
    return p(x) - x[2] * psi.value(x) * G.value(x);
  };
  mc.phat_exact = [](double s) { return std::sin(0.25 + s) + 2.0; };

  // The borehole average of p_exact is radially symmetric; evaluate it at
  // one point on the circle of radius R.
  auto pbar = [G, v = mc.v_exact, R](double s) {
    const Vec3 x = G.segment().circle_point(s, 0.0);
    return (0.25 + s) * G.value_cyl(R, s) + v(x);
  };
  mc.beta = [pbar, phat = mc.phat_exact](double s) {
    const double z = 0.25 + s;
    return z / (phat(s) - pbar(s));
  };
  // beta_hat = -beta sin(z)/z; the sinc factor gets a series branch so the
  // expression stays finite for wells touching z = 0.
  mc.beta_hat = [beta = mc.beta](double s) {
    const double z = 0.25 + s;
    const double sinc = std::abs(z) < 1e-6 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    return -beta(s) * sinc;
  };
  // Lap v = -2 dG/dz, so -Lap v matches the smooth remainder of Lap(z G).
  mc.v_source = [a = mc.seg_a, b = mc.seg_b](const Vec3& x) {
    const double ra = (x - a).norm(), rb = (x - b).norm();
    return 2.0 / (4.0 * M_PI) * (1.0 / ra - 1.0 / rb);
  };
  mc.v_grad = [a = mc.seg_a, b = mc.seg_b](const Vec3& x) {
    return Vec3(((x - b).normalized() - (x - a).normalized()) / (4.0 * M_PI));
  };
  mc.p_grad = [G, vg = mc.v_grad](const Vec3& x) {
    return Vec3(x[2] * G.gradient(x) + G.value(x) * Vec3::UnitZ() + vg(x));
  };
  mc.phat_ds = [](double s) { return std::cos(0.25 + s); };
  return mc;
}

struct ValidationReport {
  int source_sign = 0;         ///< sign making -Lap v match v_source best
  double v_lap_rel = 0.0;      ///< FD Laplacian of v vs v_source, relative
  double p_lap_rel = 0.0;      ///< FD Laplacian of p off the well vs 0, relative
  double residual_1d = 0.0;    ///< max well-equation residual (exact fields)
  double strength_rel = 0.0;   ///< near-well flux vs beta (phat - pbar)
  double strength_tol = 0.05;  ///< bound for the above, grows with the control radius
  double phat_gap = 0.0;       ///< max |phat - pbar| scale (diagnostic)

  bool ok(double lap_tol = 1e-4, double res_tol = 1e-4) const {
    return source_sign == 1 && v_lap_rel <= lap_tol && p_lap_rel <= lap_tol &&
           residual_1d <= res_tol && strength_rel <= strength_tol;
  }
};

namespace detail {

inline double fd_laplacian(const ScalarField3D& f, const Vec3& x, double h) {
  double acc = -6.0 * f(x);
  for (int d = 0; d < 3; ++d) {
    Vec3 e = Vec3::Zero();
    e[d] = h;
    acc += f(x + e) + f(x - e);
  }
  return acc / (h * h);
}

}  // namespace detail

/// Self-check of a manufactured case: the exact fields must satisfy the
/// model equations (to finite-difference accuracy) before any experiment
/// trusts them. The sign of the 3D source term is resolved numerically.
inline ValidationReport validate_manufactured(const ManufacturedCase& mc) {
  ValidationReport rep;
  const WellSegment seg = mc.segment();
  const double h = 1e-3;

  // Interior sample points away from the well axis and the boundary.
  std::vector<Vec3> pts;
  for (double x : {0.15, 0.35, 0.85})
    for (double y : {0.2, 0.7})
      for (double z : {0.15, 0.45, 0.8}) pts.emplace_back(x, y, z);

  double err_plus = 0.0, err_minus = 0.0, p_err = 0.0;
  for (const Vec3& x : pts) {
    const double lap = detail::fd_laplacian(mc.v_exact, x, h);
    const double src = mc.v_source(x);
    const double scale = std::max(1.0, std::abs(src));
    err_plus = std::max(err_plus, std::abs(-lap - src) / scale);
    err_minus = std::max(err_minus, std::abs(-lap + src) / scale);

    const double lap_p = detail::fd_laplacian(mc.p_exact, x, h);
    double mag = 0.0;
    for (int d = 0; d < 3; ++d) {
      Vec3 e = Vec3::Zero();
      e[d] = h;
      mag += std::abs(mc.p_exact(x + e) - 2.0 * mc.p_exact(x) + mc.p_exact(x - e)) / (h * h);
    }
    p_err = std::max(p_err, std::abs(lap_p) / std::max(1.0, mag));
  }
  rep.source_sign = (err_plus <= err_minus) ? 1 : -1;
  rep.v_lap_rel = std::min(err_plus, err_minus);
  rep.p_lap_rel = p_err;

  // Residual of the well equation with the exact fields; pbar is the
  // borehole average of the (clamped) exact pressure.
  const double L = seg.length();
  const double hs = 1e-4;
  for (int k = 1; k < 20; ++k) {
    const double s = L * k / 20.0;
    const double ddp = (mc.phat_exact(s + hs) - 2.0 * mc.phat_exact(s) +
                        mc.phat_exact(s - hs)) / (hs * hs);
    const double pbar = circle_average(mc.p_exact, seg, s);
    const double gap = mc.phat_exact(s) - pbar;
    const double r = -mc.params.kappa_hat / mc.params.mu * ddp + mc.beta_hat(s) * gap;
    rep.residual_1d = std::max(rep.residual_1d, std::abs(r));
    rep.phat_gap = std::max(rep.phat_gap, std::abs(gap));
  }

  // Line-source strength: the radial flux of p through a thin cylinder must
  // match beta (phat - pbar). The finite control radius costs O(r0), so the
  // comparison is loose but still pins the sign and magnitude.
  const double r0 = std::max(2.0 * mc.radius, 1e-3);
  const double dr = 0.1 * r0;
  // Smooth-field contamination of the flux is O(r0^2 ln r0).
  rep.strength_tol = 0.05 + 2.0 * r0 * r0 * std::abs(2.0 * std::log(r0) - 1.0);
  for (int k = 1; k < 8; ++k) {
    const double s = L * k / 8.0;
    auto p_at = [&](double r) {
      double acc = 0.0;
      for (int j = 0; j < 16; ++j) {
        const Vec3 c = seg.point_at(s) +
                       r * (std::cos(2 * M_PI * j / 16.0) * seg.e1() +
                            std::sin(2 * M_PI * j / 16.0) * seg.e2());
        acc += mc.p_exact(c);
      }
      return acc / 16.0;
    };
    const double dpdr = (p_at(r0 + dr) - p_at(r0 - dr)) / (2.0 * dr);
    const double flux = -mc.params.kappa / mc.params.mu * 2.0 * M_PI * r0 * dpdr;
    const double q = mc.beta(s) * (mc.phat_exact(s) - circle_average(mc.p_exact, seg, s));
    rep.strength_rel = std::max(rep.strength_rel,
                                std::abs(flux - q) / std::max(1.0, std::abs(q)));
  }
  return rep;
}

}  // namespace wellfem
