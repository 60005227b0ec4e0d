#pragma once

// P1 Lagrange spaces on the 3D and 1D meshes, DG0 on the 1D mesh, assembly
// of stiffness/mass matrices and norm evaluation (plain and weighted).

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "wellfem/geometry.hpp"
#include "wellfem/quadrature.hpp"
#include "wellfem/sparse.hpp"

namespace wellfem {

using ScalarField3D = std::function<double(const Vec3&)>;
using VectorField3D = std::function<Vec3(const Vec3&)>;
using ScalarField1D = std::function<double(double)>;

/// P1 space on a tet mesh; dofs biject with vertices.
class FESpace3D {
 public:
  explicit FESpace3D(const TetMesh3D& mesh) : mesh_(&mesh) {
    std::vector<char> on_bdry(mesh.vertices.size(), 0);
    for (const auto& f : mesh.boundary_faces)
      for (int v : f.v) on_bdry[v] = 1;
    for (size_t v = 0; v < on_bdry.size(); ++v)
      if (on_bdry[v]) boundary_dofs.push_back(static_cast<int>(v));
  }

  const TetMesh3D& mesh() const { return *mesh_; }
  int n_dofs() const { return static_cast<int>(mesh_->vertices.size()); }

  /// Gradients of the 4 local basis functions on cell c (constant on the cell).
  std::array<Vec3, 4> basis_gradients(int c) const {
    const auto& t = mesh_->cells[c];
    Eigen::Matrix3d m;
    m.col(0) = mesh_->vertices[t[1]] - mesh_->vertices[t[0]];
    m.col(1) = mesh_->vertices[t[2]] - mesh_->vertices[t[0]];
    m.col(2) = mesh_->vertices[t[3]] - mesh_->vertices[t[0]];
    const Eigen::Matrix3d minv_t = m.inverse().transpose();
    std::array<Vec3, 4> g;
    for (int i = 0; i < 3; ++i) g[i + 1] = minv_t.col(i);
    g[0] = -(g[1] + g[2] + g[3]);
    return g;
  }

  double eval(const Eigen::VectorXd& u, int c, const Vec4& lam) const {
    const auto& t = mesh_->cells[c];
    return lam[0] * u[t[0]] + lam[1] * u[t[1]] + lam[2] * u[t[2]] + lam[3] * u[t[3]];
  }

  Vec3 eval_gradient(const Eigen::VectorXd& u, int c) const {
    const auto g = basis_gradients(c);
    const auto& t = mesh_->cells[c];
    return u[t[0]] * g[0] + u[t[1]] * g[1] + u[t[2]] * g[2] + u[t[3]] * g[3];
  }

  double eval_at(const Eigen::VectorXd& u, const Vec3& x) const {
    const int c = mesh_->locate_cell(x);
    return eval(u, c, mesh_->barycentric(c, x));
  }

  Eigen::VectorXd interpolate(const ScalarField3D& f) const {
    Eigen::VectorXd u(n_dofs());
    for (int v = 0; v < n_dofs(); ++v) u[v] = f(mesh_->vertices[v]);
    return u;
  }

  std::vector<int> boundary_dofs;

 private:
  const TetMesh3D* mesh_;
};

/// P1 space on a 1D mesh.
class FESpace1D {
 public:
  explicit FESpace1D(const LineMesh1D& mesh) : mesh_(&mesh) {
    boundary_dofs = {0, mesh.n_vertices() - 1};
  }

  const LineMesh1D& mesh() const { return *mesh_; }
  int n_dofs() const { return mesh_->n_vertices(); }

  double eval(const Eigen::VectorXd& u, double s) const {
    const int c = mesh_->locate(s);
    const auto& cell = mesh_->cells[c];
    const double s0 = mesh_->arc[cell[0]], s1 = mesh_->arc[cell[1]];
    const double xi = (s - s0) / (s1 - s0);
    return (1.0 - xi) * u[cell[0]] + xi * u[cell[1]];
  }

  double eval_derivative(const Eigen::VectorXd& u, double s) const {
    const int c = mesh_->locate(s);
    const auto& cell = mesh_->cells[c];
    return (u[cell[1]] - u[cell[0]]) / (mesh_->arc[cell[1]] - mesh_->arc[cell[0]]);
  }

  Eigen::VectorXd interpolate(const ScalarField1D& f) const {
    Eigen::VectorXd u(n_dofs());
    for (int v = 0; v < n_dofs(); ++v) u[v] = f(mesh_->arc[v]);
    return u;
  }

  std::array<int, 2> boundary_dofs;

 private:
  const LineMesh1D* mesh_;
};

/// Piecewise-constant space on a 1D mesh; one dof per cell.
class DG0Space1D {
 public:
  explicit DG0Space1D(const LineMesh1D& mesh) : mesh_(&mesh) {}
  const LineMesh1D& mesh() const { return *mesh_; }
  int n_dofs() const { return mesh_->n_cells(); }

 private:
  const LineMesh1D* mesh_;
};

/// A_{i,k} = int coeff grad(phi_k).grad(phi_i); symmetric, constants in kernel.
inline SparseMatrix assemble_stiffness_3d(const FESpace3D& space,
                                          const ScalarField3D& coeff,
                                          int quad_degree = 2) {
  const TetMesh3D& mesh = space.mesh();
  SparseMatrix A(space.n_dofs(), space.n_dofs());
  const TetRule rule = tet_rule(quad_degree);
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const double vol = mesh.cell_volume(static_cast<int>(c));
    double cint = 0.0;
    for (size_t q = 0; q < rule.bary.size(); ++q)
      cint += rule.weights[q] *
              coeff(mesh.point_from_barycentric(static_cast<int>(c), rule.bary[q]));
    cint *= vol;
    const auto g = space.basis_gradients(static_cast<int>(c));
    const auto& t = mesh.cells[c];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        A.add(t[i], t[j], cint * g[i].dot(g[j]));
  }
  A.finalize();
  return A;
}

/// 1D stiffness; tridiagonal for the mesh ordering.
inline SparseMatrix assemble_stiffness_1d(const FESpace1D& space,
                                          const ScalarField1D& coeff,
                                          int quad_points = 3) {
  const LineMesh1D& mesh = space.mesh();
  SparseMatrix A(space.n_dofs(), space.n_dofs());
  const QuadratureRule1D q = gauss_legendre(quad_points);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    double cint = 0.0;
    for (size_t k = 0; k < q.points.size(); ++k)
      cint += q.weights[k] * coeff(mesh.arc[cell[0]] + q.points[k] * len);
    cint *= len;
    const double e = cint / (len * len);
    A.add(cell[0], cell[0], e);
    A.add(cell[1], cell[1], e);
    A.add(cell[0], cell[1], -e);
    A.add(cell[1], cell[0], -e);
  }
  A.finalize();
  return A;
}

/// M_{j,l} = int coeff phi_j phi_l ds, per-cell Gauss quadrature. The
/// coefficient may jump across cell boundaries (integration never crosses
/// a cell).
inline SparseMatrix assemble_mass_1d_p1p1(const FESpace1D& space,
                                          const ScalarField1D& coeff,
                                          int quad_points = 3) {
  const LineMesh1D& mesh = space.mesh();
  SparseMatrix M(space.n_dofs(), space.n_dofs());
  const QuadratureRule1D q = gauss_legendre(quad_points);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    double m00 = 0, m01 = 0, m11 = 0;
    for (size_t k = 0; k < q.points.size(); ++k) {
      const double xi = q.points[k];
      const double w = q.weights[k] * len * coeff(mesh.arc[cell[0]] + xi * len);
      m00 += w * (1 - xi) * (1 - xi);
      m01 += w * (1 - xi) * xi;
      m11 += w * xi * xi;
    }
    M.add(cell[0], cell[0], m00);
    M.add(cell[0], cell[1], m01);
    M.add(cell[1], cell[0], m01);
    M.add(cell[1], cell[1], m11);
  }
  M.finalize();
  return M;
}

/// N_{m,l} = int_{I_m} coeff phi_l ds  (DG0 test x P1 trial).
inline SparseMatrix assemble_mass_1d_dg0p1(
    const DG0Space1D& dg, const FESpace1D& p1,
    const ScalarField1D& coeff = [](double) { return 1.0; }, int quad_points = 3) {
  if (&dg.mesh() != &p1.mesh())
    throw InvalidArgument("assemble_mass_1d_dg0p1: spaces on different meshes");
  const LineMesh1D& mesh = p1.mesh();
  SparseMatrix N(dg.n_dofs(), p1.n_dofs());
  const QuadratureRule1D q = gauss_legendre(quad_points);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    double n0 = 0, n1 = 0;
    for (size_t k = 0; k < q.points.size(); ++k) {
      const double xi = q.points[k];
      const double w = q.weights[k] * len * coeff(mesh.arc[cell[0]] + xi * len);
      n0 += w * (1 - xi);
      n1 += w * xi;
    }
    N.add(c, cell[0], n0);
    N.add(c, cell[1], n1);
  }
  N.finalize();
  return N;
}

/// b_i = int f phi_i dx.
inline Eigen::VectorXd assemble_load_3d(const FESpace3D& space, const ScalarField3D& f,
                                        int quad_degree = 2) {
  const TetMesh3D& mesh = space.mesh();
  const TetRule rule = tet_rule(quad_degree);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_dofs());
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    const auto& t = mesh.cells[c];
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const double w = rule.weights[q] * vol * f(mesh.point_from_barycentric(c, rule.bary[q]));
      for (int i = 0; i < 4; ++i) b[t[i]] += w * rule.bary[q][i];
    }
  }
  return b;
}

inline Eigen::VectorXd assemble_load_1d(const FESpace1D& space, const ScalarField1D& f,
                                        int quad_points = 3) {
  const LineMesh1D& mesh = space.mesh();
  const QuadratureRule1D q = gauss_legendre(quad_points);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    for (size_t k = 0; k < q.points.size(); ++k) {
      const double xi = q.points[k];
      const double w = q.weights[k] * len * f(mesh.arc[cell[0]] + xi * len);
      b[cell[0]] += w * (1 - xi);
      b[cell[1]] += w * xi;
    }
  }
  return b;
}

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

/// || u_h - ref ||_{L2} and | u_h - ref |_{H1} over the 3D mesh, elementwise
/// Gauss quadrature. Pass ref = nullptr for the plain norm of u_h; pass
/// ref_grad = nullptr to skip the seminorm.
inline ErrorNorms error_norms_3d(const FESpace3D& space, const Eigen::VectorXd& u,
                                 const ScalarField3D* ref, const VectorField3D* ref_grad,
                                 int quad_degree = 4) {
  const TetMesh3D& mesh = space.mesh();
  const TetRule rule = tet_rule(quad_degree);
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    const Vec3 gu = space.eval_gradient(u, c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 x = mesh.point_from_barycentric(c, rule.bary[q]);
      const double e = space.eval(u, c, rule.bary[q]) - (ref ? (*ref)(x) : 0.0);
      l2 += rule.weights[q] * vol * e * e;
      if (ref_grad) {
        const Vec3 ge = gu - (*ref_grad)(x);
        h1 += rule.weights[q] * vol * ge.squaredNorm();
      } else if (!ref) {
        h1 += rule.weights[q] * vol * gu.squaredNorm();
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

/// Error norms over the physical exterior of the borehole: quadrature
/// points with dist(x, seg) < seg.radius are skipped, so an unclamped
/// (singular-on-the-well) reference stays finite in the integrand.
inline ErrorNorms error_norms_exterior(const FESpace3D& space, const Eigen::VectorXd& u,
                                       const ScalarField3D* ref,
                                       const VectorField3D* ref_grad,
                                       const WellSegment& seg, int quad_degree = 5) {
  const TetMesh3D& mesh = space.mesh();
  const TetRule rule = tet_rule(quad_degree);
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    const Vec3 gu = space.eval_gradient(u, c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 x = mesh.point_from_barycentric(c, rule.bary[q]);
      if (dist_to_segment(x, seg) < seg.radius()) continue;
      const double e = space.eval(u, c, rule.bary[q]) - (ref ? (*ref)(x) : 0.0);
      l2 += rule.weights[q] * vol * e * e;
      if (ref_grad) {
        const Vec3 ge = gu - (*ref_grad)(x);
        h1 += rule.weights[q] * vol * ge.squaredNorm();
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

inline ErrorNorms error_norms_1d(const FESpace1D& space, const Eigen::VectorXd& u,
                                 const ScalarField1D* ref, const ScalarField1D* ref_ds,
                                 int quad_points = 4) {
  const LineMesh1D& mesh = space.mesh();
  const QuadratureRule1D rule = gauss_legendre(quad_points);
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    const double du = (u[cell[1]] - u[cell[0]]) / len;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const double s = mesh.arc[cell[0]] + xi * len;
      const double e = (1 - xi) * u[cell[0]] + xi * u[cell[1]] - (ref ? (*ref)(s) : 0.0);
      l2 += rule.weights[q] * len * e * e;
      if (ref_ds) {
        const double ge = du - (*ref_ds)(s);
        h1 += rule.weights[q] * len * ge * ge;
      } else if (!ref) {
        h1 += rule.weights[q] * len * du * du;
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

/// Norms of the difference of two P1 functions (exact quadrature).
inline ErrorNorms fe_diff_norms_3d(const FESpace3D& space, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& w) {
  const TetMesh3D& mesh = space.mesh();
  const Eigen::VectorXd d = u - w;
  const TetRule rule = tet_rule(2);
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const double e = space.eval(d, c, rule.bary[q]);
      l2 += rule.weights[q] * vol * e * e;
    }
    h1 += vol * space.eval_gradient(d, c).squaredNorm();
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

inline ErrorNorms fe_diff_norms_1d(const FESpace1D& space, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& w) {
  const LineMesh1D& mesh = space.mesh();
  const Eigen::VectorXd d = u - w;
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double len = mesh.cell_length(c);
    const double d0 = d[cell[0]], d1 = d[cell[1]];
    l2 += len / 3.0 * (d0 * d0 + d0 * d1 + d1 * d1);
    h1 += (d1 - d0) * (d1 - d0) / len;
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

/// L2 norm of a callable over the mesh.
inline double norm_L2(const TetMesh3D& mesh, const ScalarField3D& f, int quad_degree = 4) {
  const TetRule rule = tet_rule(quad_degree);
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const double v = f(mesh.point_from_barycentric(c, rule.bary[q]));
      acc += rule.weights[q] * vol * v * v;
    }
  }
  return std::sqrt(acc);
}

/// Weighted norm (int u^2 r^{2 alpha})^{1/2}, r = distance to the segment.
/// Requires -1 < alpha < 1; alpha = 0 reduces to the plain L2 norm.
inline double norm_L2_weighted(const TetMesh3D& mesh, const ScalarField3D& f,
                               const WellSegment& seg, double alpha,
                               int quad_degree = 4) {
  if (!(alpha > -1.0 && alpha < 1.0))
    throw InvalidArgument("norm_L2_weighted: alpha must lie in (-1,1)");
  const TetRule rule = tet_rule(quad_degree);
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 x = mesh.point_from_barycentric(c, rule.bary[q]);
      const double v = f(x);
      const double r = dist_to_segment(x, seg);
      acc += rule.weights[q] * vol * v * v * std::pow(r, 2.0 * alpha);
    }
  }
  return std::sqrt(acc);
}

}  // namespace wellfem
