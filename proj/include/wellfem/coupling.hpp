#pragma once

// Mixed-dimensional coupling: the well model bundling kernel/cutoff/
// extension with the transfer coefficients, the trace/averaging operators,
// and assembly of the coupled block systems in both formulations.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "wellfem/errors.hpp"
#include "wellfem/fem.hpp"
#include "wellfem/geometry.hpp"
#include "wellfem/quadrature.hpp"
#include "wellfem/singular.hpp"
#include "wellfem/sparse.hpp"

namespace wellfem {

struct ModelParams {
  double kappa = 1.0;      ///< reservoir permeability
  double kappa_hat = 1.0;  ///< well permeability
  double mu = 1.0;         ///< viscosity
};

/// One well: singular kernel, cutoff, extension, and the transfer
/// coefficients beta (wall) / beta_hat (per-volume) as functions of
/// arclength. prepare() precomputes the corrected coefficients at the 1D
/// mesh vertices; the *_at accessors interpolate them linearly.
class WellModel {
 public:
  WellModel(SingularField kernel, CutoffFunction psi, ExtensionOperator ext,
            ScalarField1D beta, ScalarField1D beta_hat)
      : kernel_(std::move(kernel)), psi_(std::move(psi)), ext_(std::move(ext)),
        beta_(std::move(beta)), beta_hat_(std::move(beta_hat)) {
    prepare();
  }

  const SingularField& kernel() const { return kernel_; }
  const CutoffFunction& psi() const { return psi_; }
  const ExtensionOperator& extension() const { return ext_; }
  const LineMesh1D& mesh1d() const { return ext_.mesh1d(); }
  const WellSegment& segment() const { return ext_.mesh1d().segment(); }

  double beta(double s) const { return beta_(s); }
  double beta_hat(double s) const { return beta_hat_(s); }

  /// Borehole average of psi * kernel at 1D vertex l.
  double gbar(int l) const { return gbar_[l]; }
  double beta_star(int l) const { return bstar_[l]; }
  double beta_hat_star(int l) const { return bhstar_[l]; }

  double beta_star_at(double s) const { return interp(bstar_, s); }
  double beta_hat_star_at(double s) const { return interp(bhstar_, s); }

 private:
  void prepare() {
    const LineMesh1D& mesh = mesh1d();
    const int n = mesh.n_vertices();
    gbar_.resize(n);
    bstar_.resize(n);
    bhstar_.resize(n);
    for (int l = 0; l < n; ++l) {
      const double s = mesh.arc[l];
      gbar_[l] = circle_average(
          [&](const Vec3& x) { return kernel_.value(x) * psi_.value(x); },
          mesh.segment(), s);
      const double b = beta_(s);
      const double den = 1.0 + b * gbar_[l];
      if (std::abs(den) < 1e-12)
        throw DegenerateCoefficient("WellModel: corrected coefficient blows up");
      bstar_[l] = b / den;
      bhstar_[l] = beta_hat_(s) / den;
    }
  }

  double interp(const Eigen::VectorXd& vals, double s) const {
    const LineMesh1D& mesh = mesh1d();
    const int c = mesh.locate(s);
    const auto& cell = mesh.cells[c];
    const double xi = (s - mesh.arc[cell[0]]) / mesh.cell_length(c);
    return (1.0 - xi) * vals[cell[0]] + xi * vals[cell[1]];
  }

  SingularField kernel_;
  CutoffFunction psi_;
  ExtensionOperator ext_;
  ScalarField1D beta_, beta_hat_;
  Eigen::VectorXd gbar_, bstar_, bhstar_;
};

/// T_{k,l} = phi_k(x_l), x_l the 1D mesh vertices. Columns sum to 1.
inline SparseMatrix trace_matrix(const FESpace3D& space, const LineMesh1D& mesh1d) {
  const TetMesh3D& mesh = space.mesh();
  SparseMatrix T(space.n_dofs(), mesh1d.n_vertices());
  for (int l = 0; l < mesh1d.n_vertices(); ++l) {
    const int c = mesh.locate_cell(mesh1d.vertices[l]);
    const Vec4 lam = mesh.barycentric(c, mesh1d.vertices[l]);
    for (int i = 0; i < 4; ++i) T.add(mesh.cells[c][i], l, lam[i]);
  }
  T.finalize();
  return T;
}

/// Like trace_matrix but column l averages phi_k over the borehole circle
/// at vertex l. Throws NotFound if a circle point leaves the mesh.
inline SparseMatrix vertex_average_matrix(const FESpace3D& space,
                                          const LineMesh1D& mesh1d, int n_theta = 16) {
  const TetMesh3D& mesh = space.mesh();
  SparseMatrix T(space.n_dofs(), mesh1d.n_vertices());
  for (int l = 0; l < mesh1d.n_vertices(); ++l) {
    for (int k = 0; k < n_theta; ++k) {
      const Vec3 x = mesh1d.segment().circle_point(mesh1d.arc[l], 2.0 * M_PI * k / n_theta);
      const int c = mesh.locate_cell(x);
      const Vec4 lam = mesh.barycentric(c, x);
      for (int i = 0; i < 4; ++i) T.add(mesh.cells[c][i], l, lam[i] / n_theta);
    }
  }
  T.finalize();
  return T;
}

/// Pi_{m,k} = average of phi_k over the borehole cylinder surface above 1D
/// cell m (Gauss along the axis, trapezoid around the circle). Rows sum to 1.
inline SparseMatrix averaging_matrix(const FESpace3D& space, const LineMesh1D& mesh1d,
                                     int quad_points = 3, int n_theta = 16) {
  const TetMesh3D& mesh = space.mesh();
  SparseMatrix P(mesh1d.n_cells(), space.n_dofs());
  const QuadratureRule1D q = gauss_legendre(quad_points);
  for (int m = 0; m < mesh1d.n_cells(); ++m) {
    const double s0 = mesh1d.arc[mesh1d.cells[m][0]];
    const double len = mesh1d.cell_length(m);
    for (size_t a = 0; a < q.points.size(); ++a) {
      const double s = s0 + q.points[a] * len;
      for (int k = 0; k < n_theta; ++k) {
        const Vec3 x = mesh1d.segment().circle_point(s, 2.0 * M_PI * k / n_theta);
        const int c = mesh.locate_cell(x);
        const Vec4 lam = mesh.barycentric(c, x);
        const double w = q.weights[a] / n_theta;
        for (int i = 0; i < 4; ++i) P.add(m, mesh.cells[c][i], w * lam[i]);
      }
    }
  }
  P.finalize();
  return P;
}

/// C_{i,l} = (kappa/mu) [ (G grad(psi E(b*_l phi_l)), grad phi_i)
///                        - (grad(psi E(b*_l phi_l)) . grad G, phi_i) ].
/// These are the regular remainder terms of the split 3D equation.
inline SparseMatrix coupling_block(const FESpace3D& space, const WellModel& model,
                                   const ModelParams& prm, int quad_degree = 5) {
  if (model.kernel().kind() == SingularField::Kind::Truncated)
    throw InvalidArgument(
        "coupling_block: the truncated kernel is only meaningful for "
        "near-well index calculations, not for the split assembly");
  const TetMesh3D& mesh = space.mesh();
  const LineMesh1D& mesh1d = model.mesh1d();
  const int n1 = mesh1d.n_vertices();
  SparseMatrix C(space.n_dofs(), n1);
  const TetRule rule = tet_rule(quad_degree);
  const double coeff = prm.kappa / prm.mu;
  const double support = model.psi().support_radius();
  const WellSegment& seg = model.segment();

  Eigen::VectorXd w(n1), dw(n1);
  Eigen::MatrixXd local(4, n1);
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto& t = mesh.cells[c];
    if (std::isfinite(support)) {
      double dmin = dist_to_segment(mesh.vertices[t[0]], seg);
      double hc = 0.0;
      for (int i = 1; i < 4; ++i) {
        dmin = std::min(dmin, dist_to_segment(mesh.vertices[t[i]], seg));
        hc = std::max(hc, (mesh.vertices[t[i]] - mesh.vertices[t[0]]).norm());
      }
      if (dmin - hc > support) continue;
    }
    const double vol = mesh.cell_volume(c);
    const auto bg = space.basis_gradients(c);
    local.setZero();
    for (size_t q = 0; q < rule.bary.size(); ++q) {
      const Vec3 x = mesh.point_from_barycentric(c, rule.bary[q]);
      const double psi = model.psi().value(x);
      const Vec3 gpsi = model.psi().gradient(x);
      if (psi == 0.0 && gpsi.isZero()) continue;
      model.extension().cardinal(seg.axial_coord(x), w, dw);
      const double G = model.kernel().value(x);
      const Vec3 gG = model.kernel().gradient(x);
      const double wq = rule.weights[q] * vol;
      const Vec3 tau = seg.tangent();
      for (int l = 0; l < n1; ++l) {
        const double bs = model.beta_star(l);
        if (w[l] == 0.0 && dw[l] == 0.0) continue;
        const Vec3 grad_pe = psi * dw[l] * tau + w[l] * gpsi;  // grad(psi E_l)
        const double f2 = grad_pe.dot(gG);
        for (int i = 0; i < 4; ++i) {
          local(i, l) += wq * coeff * bs *
                         (G * grad_pe.dot(bg[i]) - f2 * rule.bary[q][i]);
        }
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int l = 0; l < n1; ++l)
        if (local(i, l) != 0.0) C.add(t[i], l, local(i, l));
  }
  C.finalize();
  return C;
}

enum class Formulation { Standard, Srb };
enum class VbarMode { Trace, Average };

struct BcData {
  std::vector<std::pair<int, double>> dirichlet_3d;  ///< (dof, value)
  std::vector<std::pair<int, double>> dirichlet_1d;
};

/// 2x2 block system in the unknowns (v or p, p_hat). flatten() produces the
/// monolithic matrix with Dirichlet rows/columns eliminated symmetrically.
struct BlockSystem {
  int n3 = 0, n1 = 0;
  Eigen::SparseMatrix<double> A11, A12, A21, A22;
  Eigen::VectorXd rhs3, rhs1;
  BcData bc;

  void flatten(Eigen::SparseMatrix<double>& K, Eigen::VectorXd& F) const {
    const int n = n3 + n1;
    std::vector<char> fixed(n, 0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const auto& [d, v] : bc.dirichlet_3d) {
      fixed[d] = 1;
      g[d] = v;
    }
    for (const auto& [d, v] : bc.dirichlet_1d) {
      fixed[n3 + d] = 1;
      g[n3 + d] = v;
    }
    F.resize(n);
    F.head(n3) = rhs3;
    F.tail(n1) = rhs1;

    std::vector<Eigen::Triplet<double>> trips;
    auto push_block = [&](const Eigen::SparseMatrix<double>& B, int r0, int c0) {
      for (int k = 0; k < B.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
          const int i = r0 + static_cast<int>(it.row());
          const int j = c0 + static_cast<int>(it.col());
          if (fixed[i]) continue;
          if (fixed[j]) {
            F[i] -= it.value() * g[j];
            continue;
          }
          trips.emplace_back(i, j, it.value());
        }
    };
    push_block(A11, 0, 0);
    push_block(A12, 0, n3);
    push_block(A21, n3, 0);
    push_block(A22, n3, n3);
    for (int d = 0; d < n; ++d)
      if (fixed[d]) {
        trips.emplace_back(d, d, 1.0);
        F[d] = g[d];
      }
    K.resize(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
  }
};

namespace detail {

inline SparseMatrix vbar_matrix(const FESpace3D& V, const LineMesh1D& mesh1d,
                                VbarMode mode) {
  return mode == VbarMode::Trace ? trace_matrix(V, mesh1d)
                                 : vertex_average_matrix(V, mesh1d);
}

}  // namespace detail

/// Split formulation: unknowns are the regular part v and p_hat.
/// collapsed_cutoff replaces the coupling block with its zero-support limit
/// -T Mhat_{beta*}; in that limit the system coincides with the standard
/// formulation entry by entry.
inline BlockSystem assemble_srb_system(
    const FESpace3D& V, const FESpace1D& What, const WellModel& model,
    const ModelParams& prm, const BcData& bc, VbarMode vbar = VbarMode::Trace,
    const ScalarField3D& f3 = [](const Vec3&) { return 0.0; },
    const ScalarField1D& f1 = [](double) { return 0.0; },
    bool collapsed_cutoff = false) {
  if (&What.mesh() != &model.mesh1d())
    throw InvalidArgument("assemble_srb_system: 1D space and model use different meshes");
  BlockSystem sys;
  sys.n3 = V.n_dofs();
  sys.n1 = What.n_dofs();
  sys.bc = bc;

  const SparseMatrix A =
      assemble_stiffness_3d(V, [&](const Vec3&) { return prm.kappa / prm.mu; });
  const SparseMatrix Ahat =
      assemble_stiffness_1d(What, [&](double) { return prm.kappa_hat / prm.mu; });
  const SparseMatrix Mhat = assemble_mass_1d_p1p1(
      What, [&](double s) { return model.beta_hat_star_at(s); });
  const SparseMatrix T = detail::vbar_matrix(V, What.mesh(), vbar);

  Eigen::SparseMatrix<double> C;
  if (collapsed_cutoff) {
    const SparseMatrix Mstar = assemble_mass_1d_p1p1(
        What, [&](double s) { return model.beta_star_at(s); });
    C = -(T.matrix() * Mstar.matrix());
  } else {
    C = coupling_block(V, model, prm).matrix();
  }

  sys.A11 = A.matrix() - C * T.matrix().transpose();
  sys.A12 = C;
  sys.A21 = -(Mhat.matrix() * T.matrix().transpose());
  sys.A22 = Ahat.matrix() + Mhat.matrix();
  sys.rhs3 = assemble_load_3d(V, f3);
  sys.rhs1 = assemble_load_1d(What, f1);
  return sys;
}

/// Standard formulation: unknown is the full pressure p; the exchange term
/// uses cylinder-surface averages per 1D cell.
inline BlockSystem assemble_standard_system(
    const FESpace3D& V, const FESpace1D& What, const WellModel& model,
    const ModelParams& prm, const BcData& bc,
    const ScalarField3D& f3 = [](const Vec3&) { return 0.0; },
    const ScalarField1D& f1 = [](double) { return 0.0; }) {
  if (&What.mesh() != &model.mesh1d())
    throw InvalidArgument("assemble_standard_system: 1D space and model use different meshes");
  BlockSystem sys;
  sys.n3 = V.n_dofs();
  sys.n1 = What.n_dofs();
  sys.bc = bc;

  const SparseMatrix A =
      assemble_stiffness_3d(V, [&](const Vec3&) { return prm.kappa / prm.mu; });
  const SparseMatrix Ahat =
      assemble_stiffness_1d(What, [&](double) { return prm.kappa_hat / prm.mu; });
  DG0Space1D dg(What.mesh());
  const SparseMatrix Pi = averaging_matrix(V, What.mesh());
  const SparseMatrix Nb =
      assemble_mass_1d_dg0p1(dg, What, [&](double s) { return model.beta(s); });
  const SparseMatrix Nbh =
      assemble_mass_1d_dg0p1(dg, What, [&](double s) { return model.beta_hat(s); });
  const SparseMatrix Mb =
      assemble_mass_1d_p1p1(What, [&](double s) { return model.beta(s); });
  const SparseMatrix Mbh =
      assemble_mass_1d_p1p1(What, [&](double s) { return model.beta_hat(s); });
  const SparseMatrix T = trace_matrix(V, What.mesh());

  sys.A11 = A.matrix() + T.matrix() * Nb.matrix().transpose() * Pi.matrix();
  sys.A12 = -(T.matrix() * Mb.matrix());
  sys.A21 = -(Nbh.matrix().transpose() * Pi.matrix());
  sys.A22 = Ahat.matrix() + Mbh.matrix();
  sys.rhs3 = assemble_load_3d(V, f3);
  sys.rhs1 = assemble_load_1d(What, f1);
  return sys;
}

}  // namespace wellfem
