#pragma once

// Pressure reconstruction from the split unknowns, convergence-rate
// bookkeeping, and plain-text output (CSV, legacy VTK).

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "wellfem/coupling.hpp"
#include "wellfem/errors.hpp"
#include "wellfem/fem.hpp"
#include "wellfem/geometry.hpp"

namespace wellfem {

/// Lagrange basis of degree k on the reference tetrahedron, in barycentric
/// form. Nodes are the lattice multi-indices alpha/k.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree) : degree_(degree) {
    if (degree < 1 || degree > 3)
      throw InvalidArgument("LagrangeBasis: degree must be 1..3");
    for (int a0 = 0; a0 <= degree; ++a0)
      for (int a1 = 0; a1 <= degree - a0; ++a1)
        for (int a2 = 0; a2 <= degree - a0 - a1; ++a2) {
          const int a3 = degree - a0 - a1 - a2;
          alphas_.push_back({a0, a1, a2, a3});
          nodes_.emplace_back(double(a0) / degree, double(a1) / degree,
                              double(a2) / degree, double(a3) / degree);
        }
  }

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec4>& nodes() const { return nodes_; }

  double eval(int i, const Vec4& lam) const {
    double v = 1.0;
    for (int d = 0; d < 4; ++d) v *= factor(alphas_[i][d], lam[d]);
    return v;
  }

  /// Partial derivatives with respect to the 4 barycentric coordinates.
  Vec4 eval_grad_bary(int i, const Vec4& lam) const {
    Vec4 g;
    for (int d = 0; d < 4; ++d) {
      double other = 1.0;
      for (int e = 0; e < 4; ++e)
        if (e != d) other *= factor(alphas_[i][e], lam[e]);
      g[d] = other * dfactor(alphas_[i][d], lam[d]);
    }
    return g;
  }

 private:
  double factor(int a, double lam) const {
    double v = 1.0;
    for (int m = 0; m < a; ++m) v *= (degree_ * lam - m) / (a - m);
    return v;
  }

  double dfactor(int a, double lam) const {
    double v = 0.0;
    for (int m = 0; m < a; ++m) {
      double term = double(degree_) / (a - m);
      for (int mm = 0; mm < a; ++mm)
        if (mm != m) term *= (degree_ * lam - mm) / (a - mm);
      v += term;
    }
    return v;
  }

  int degree_;
  std::vector<std::array<int, 4>> alphas_;
  std::vector<Vec4> nodes_;
};

/// p_h = E(beta* (phat_h - vbar_h)) I_k(psi G) + v_h, with I_k the
/// elementwise degree-k interpolant of the weighted kernel. Node values of
/// psi G are cached per cell on first use.
class ReconstructedPressure {
 public:
  ReconstructedPressure(const FESpace3D& V, const WellModel& model,
                        Eigen::VectorXd v_h, const Eigen::VectorXd& phat_h,
                        const Eigen::VectorXd& vbar_h, int degree = 1)
      : V_(&V), model_(&model), v_(std::move(v_h)), basis_(degree),
        cache_(V.mesh().cells.size()) {
    const int n = model.mesh1d().n_vertices();
    if (phat_h.size() != n || vbar_h.size() != n)
      throw InvalidArgument("ReconstructedPressure: 1D vector size mismatch");
    w_.resize(n);
    for (int l = 0; l < n; ++l)
      w_[l] = model.beta_star(l) * (phat_h[l] - vbar_h[l]);
  }

  int degree() const { return basis_.degree(); }

  double value(int c, const Vec4& lam) const {
    const Vec3 x = V_->mesh().point_from_barycentric(c, lam);
    const auto& nv = node_values(c);
    double ig = 0.0;
    for (int i = 0; i < basis_.size(); ++i) ig += nv[i] * basis_.eval(i, lam);
    return model_->extension().value(w_, x) * ig + V_->eval(v_, c, lam);
  }

  double value(const Vec3& x) const {
    const int c = V_->mesh().locate_cell(x);
    return value(c, V_->mesh().barycentric(c, x));
  }

  Vec3 gradient(int c, const Vec4& lam) const {
    const Vec3 x = V_->mesh().point_from_barycentric(c, lam);
    const auto& nv = node_values(c);
    const auto gl = V_->basis_gradients(c);  // gradients of lam[1..3]; lam0 = -sum
    double ig = 0.0;
    Vec3 g_ig = Vec3::Zero();
    for (int i = 0; i < basis_.size(); ++i) {
      ig += nv[i] * basis_.eval(i, lam);
      const Vec4 gb = basis_.eval_grad_bary(i, lam);
      Vec3 gx = Vec3::Zero();
      for (int d = 0; d < 4; ++d) gx += gb[d] * gl[d];
      g_ig += nv[i] * gx;
    }
    const double ew = model_->extension().value(w_, x);
    const Vec3 g_ew = model_->extension().gradient(w_, x);
    return g_ew * ig + ew * g_ig + V_->eval_gradient(v_, c);
  }

  /// Vertex values (exact for degree 1, the vertex samples otherwise).
  Eigen::VectorXd nodal() const {
    const TetMesh3D& mesh = V_->mesh();
    Eigen::VectorXd p(V_->n_dofs());
    for (int j = 0; j < V_->n_dofs(); ++j) {
      const Vec3& x = mesh.vertices[j];
      p[j] = model_->extension().value(w_, x) * model_->psi().value(x) *
                 model_->kernel().value(x) +
             v_[j];
    }
    return p;
  }

 private:
  const std::vector<double>& node_values(int c) const {
    auto& nv = cache_[c];
    if (nv.empty()) {
      nv.resize(basis_.size());
      for (int i = 0; i < basis_.size(); ++i) {
        const Vec3 x = V_->mesh().point_from_barycentric(c, basis_.nodes()[i]);
        nv[i] = model_->psi().value(x) * model_->kernel().value(x);
      }
    }
    return nv;
  }

  const FESpace3D* V_;
  const WellModel* model_;
  Eigen::VectorXd v_, w_;
  LagrangeBasis basis_;
  mutable std::vector<std::vector<double>> cache_;
};

/// Norms of I_1(p_exact) - p_h (the exact field enters through its vertex
/// interpolant, which absorbs the singularity the same way on both sides).
inline ErrorNorms reconstruction_error(const ReconstructedPressure& p_h,
                                       const FESpace3D& V, const ScalarField3D& p_exact,
                                       int quad_degree = 4) {
  const TetMesh3D& mesh = V.mesh();
  const Eigen::VectorXd pa = V.interpolate(p_exact);
  const TetRule rule = tet_rule(quad_degree);
  double l2 = 0.0, h1 = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = mesh.cell_volume(c);
    const Vec3 ga = V.eval_gradient(pa, c);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const double e = V.eval(pa, c, rule.bary[q]) - p_h.value(c, rule.bary[q]);
      l2 += rule.weights[q] * vol * e * e;
      const Vec3 ge = ga - p_h.gradient(c, rule.bary[q]);
      h1 += rule.weights[q] * vol * ge.squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

struct ConvergenceRow {
  double h = 0.0;       ///< nominal mesh size 1/n
  double radius = 0.0;
  std::string formulation;
  double l2_omega = 0.0, h1_omega = 0.0;   ///< 3D errors
  double l2_lambda = 0.0, h1_lambda = 0.0; ///< 1D errors
};

/// Error table over a refinement sequence plus observed rates. Rows must
/// share radius and formulation and come in strictly decreasing h.
struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;

  void validate() const {
    if (rows.size() < 2)
      throw InvalidArgument("ConvergenceReport: need at least two rows");
    for (size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].h < rows[i - 1].h))
        throw InvalidArgument("ConvergenceReport: h must decrease strictly");
      if (rows[i].radius != rows[0].radius || rows[i].formulation != rows[0].formulation)
        throw InvalidArgument("ConvergenceReport: rows mix radii or formulations");
    }
  }

  std::vector<double> pairwise_rates(double ConvergenceRow::* field) const {
    validate();
    std::vector<double> r;
    for (size_t i = 1; i < rows.size(); ++i)
      r.push_back(std::log(rows[i - 1].*field / rows[i].*field) /
                  std::log(rows[i - 1].h / rows[i].h));
    return r;
  }

  /// Least-squares slope of log(error) against log(h).
  double fitted_rate(double ConvergenceRow::* field) const {
    validate();
    const size_t n = rows.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : rows) {
      const double x = std::log(row.h), y = std::log(row.*field);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
};

inline void write_csv(const ConvergenceReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open " + path);
  out << "h,radius,formulation,l2_omega,h1_omega,l2_lambda,h1_lambda\n";
  char buf[512];
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%s,%.12e,%.12e,%.12e,%.12e\n",
                  r.h, r.radius, r.formulation.c_str(), r.l2_omega, r.h1_omega,
                  r.l2_lambda, r.h1_lambda);
    out << buf;
  }
  if (!out) throw IoError("write_csv: write failed for " + path);
}

/// Legacy ASCII VTK (version 3.0) unstructured grid with point scalars.
inline void write_vtk(const TetMesh3D& mesh,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& fields,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_vtk: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n"
      << "wellfem output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  out << std::setprecision(12);
  for (const auto& v : mesh.vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
  out << "CELLS " << mesh.cells.size() << " " << 5 * mesh.cells.size() << "\n";
  for (const auto& c : mesh.cells)
    out << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  out << "CELL_TYPES " << mesh.cells.size() << "\n";
  for (size_t c = 0; c < mesh.cells.size(); ++c) out << "10\n";
  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.vertices.size() << "\n";
    for (const auto& [name, data] : fields) {
      if (data.size() != static_cast<int>(mesh.vertices.size()))
        throw InvalidArgument("write_vtk: field size mismatch for " + name);
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (int i = 0; i < data.size(); ++i) out << data[i] << "\n";
    }
  }
  if (!out) throw IoError("write_vtk: write failed for " + path);
}

/// Well profile s -> p_hat as CSV.
inline void write_profile_csv(const LineMesh1D& mesh, const Eigen::VectorXd& phat,
                              const std::string& path) {
  if (phat.size() != mesh.n_vertices())
    throw InvalidArgument("write_profile_csv: vector size mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("write_profile_csv: cannot open " + path);
  out << "s,p_hat\n";
  char buf[128];
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e\n", mesh.arc[i], phat[i]);
    out << buf;
  }
  if (!out) throw IoError("write_profile_csv: write failed for " + path);
}

/// n x n samples of a P1 field on the horizontal plane at height z.
inline void write_slice_csv(const FESpace3D& V, const Eigen::VectorXd& u, double z,
                            int n, const std::string& path) {
  if (n < 2) throw InvalidArgument("write_slice_csv: n must be >= 2");
  const TetMesh3D& mesh = V.mesh();
  if (z < mesh.box_lo[2] || z > mesh.box_hi[2])
    throw InvalidArgument("write_slice_csv: z outside the domain");
  std::ofstream out(path);
  if (!out) throw IoError("write_slice_csv: cannot open " + path);
  out << "x,y,value\n";
  char buf[192];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = mesh.box_lo[0] + (mesh.box_hi[0] - mesh.box_lo[0]) * i / (n - 1);
      const double y = mesh.box_lo[1] + (mesh.box_hi[1] - mesh.box_lo[1]) * j / (n - 1);
      const double val = V.eval_at(u, Vec3(x, y, z));
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e\n", x, y, val);
      out << buf;
    }
  if (!out) throw IoError("write_slice_csv: write failed for " + path);
}

}  // namespace wellfem
