#pragma once

// Structured tetrahedral meshes of box domains, 1D meshes of embedded well
// segments, and the geometric queries (distance to segment, point location)
// the mixed-dimensional coupling relies on.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "wellfem/errors.hpp"

namespace wellfem {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

/// A straight well segment: endpoints, borehole radius and an orthonormal
/// frame around the centreline. Immutable after construction.
class WellSegment {
 public:
  WellSegment(const Vec3& a, const Vec3& b, double radius)
      : a_(a), b_(b), radius_(radius) {
    const Vec3 d = b - a;
    length_ = d.norm();
    if (!(length_ > 0.0)) throw InvalidArgument("WellSegment: zero length");
    if (!(radius > 0.0)) throw InvalidArgument("WellSegment: radius must be positive");
    tau_ = d / length_;
    // Frame normal to the axis, chosen deterministically.
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(tau_[i]) < std::abs(tau_[k])) k = i;
    e1_ = Vec3::Unit(k) - tau_[k] * tau_;
    e1_.normalize();
    e2_ = tau_.cross(e1_);
  }

  const Vec3& a() const { return a_; }
  const Vec3& b() const { return b_; }
  double radius() const { return radius_; }
  double length() const { return length_; }
  const Vec3& tangent() const { return tau_; }
  const Vec3& e1() const { return e1_; }
  const Vec3& e2() const { return e2_; }

  /// Poiseuille well permeability R^2/8.
  double kappa_hat() const { return radius_ * radius_ / 8.0; }

  Vec3 point_at(double s) const { return a_ + s * tau_; }

  /// Signed axial coordinate of x (0 at a, length() at b), unclamped.
  double axial_coord(const Vec3& x) const { return tau_.dot(x - a_); }

  /// Cylindrical decomposition of x about the (infinite) centreline.
  /// rho_dir falls back to e1 on the axis.
  void cylindrical(const Vec3& x, double& rho, double& t, Vec3& rho_dir) const {
    t = axial_coord(x);
    const Vec3 radial = x - a_ - t * tau_;
    rho = radial.norm();
    rho_dir = (rho > 1e-14) ? Vec3(radial / rho) : e1_;
  }

  /// Point on the circle of radius radius() at station s, angle theta.
  Vec3 circle_point(double s, double theta) const {
    return point_at(s) + radius_ * (std::cos(theta) * e1_ + std::sin(theta) * e2_);
  }

 private:
  Vec3 a_, b_;
  double radius_;
  double length_;
  Vec3 tau_, e1_, e2_;
};

/// min over y in [a,b] of |x - y|.
inline double dist_to_segment(const Vec3& x, const WellSegment& seg) {
  const double t = std::clamp(seg.axial_coord(x), 0.0, seg.length());
  return (x - seg.point_at(t)).norm();
}

namespace detail {

/// Uniform background grid over cell bounding boxes; gives O(1) average
/// candidate lookup for point location.
struct CellGrid {
  Vec3 lo, hi;
  int nb[3] = {1, 1, 1};
  std::vector<std::vector<int32_t>> bins;

  int bin_index(int i, int j, int k) const { return (k * nb[1] + j) * nb[0] + i; }

  void coords(const Vec3& x, int& i, int& j, int& k) const {
    for (int d = 0; d < 3; ++d) {
      double f = (x[d] - lo[d]) / (hi[d] - lo[d]);
      int c = static_cast<int>(std::floor(f * nb[d]));
      c = std::clamp(c, 0, nb[d] - 1);
      (d == 0 ? i : d == 1 ? j : k) = c;
    }
  }
};

}  // namespace detail

/// Conforming simplicial mesh of an axis-aligned box. Each cube of the
/// structured grid is split into 6 tetrahedra sharing the main diagonal
/// (Kuhn split), so meshes for different n are deterministic and conforming.
class TetMesh3D {
 public:
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;
  /// Boundary faces with the box-side marker 0..5 = -x,+x,-y,+y,-z,+z.
  struct BoundaryFace {
    std::array<int, 3> v;
    int marker;
  };
  std::vector<BoundaryFace> boundary_faces;
  double h = 0.0;  ///< max cell diameter
  Vec3 box_lo, box_hi;

  double cell_volume(int c) const {
    const auto& t = cells[c];
    return std::abs(signed_volume(t)) ;
  }

  double signed_volume(const std::array<int, 4>& t) const {
    Eigen::Matrix3d m;
    m.col(0) = vertices[t[1]] - vertices[t[0]];
    m.col(1) = vertices[t[2]] - vertices[t[0]];
    m.col(2) = vertices[t[3]] - vertices[t[0]];
    return m.determinant() / 6.0;
  }

  /// Barycentric coordinates of x with respect to cell c.
  Vec4 barycentric(int c, const Vec3& x) const {
    const auto& t = cells[c];
    Eigen::Matrix3d m;
    m.col(0) = vertices[t[1]] - vertices[t[0]];
    m.col(1) = vertices[t[2]] - vertices[t[0]];
    m.col(2) = vertices[t[3]] - vertices[t[0]];
    const Vec3 lam = m.partialPivLu().solve(x - vertices[t[0]]);
    return Vec4(1.0 - lam.sum(), lam[0], lam[1], lam[2]);
  }

  Vec3 point_from_barycentric(int c, const Vec4& lam) const {
    const auto& t = cells[c];
    return lam[0] * vertices[t[0]] + lam[1] * vertices[t[1]] +
           lam[2] * vertices[t[2]] + lam[3] * vertices[t[3]];
  }

  /// Cell containing x (barycentric coordinates all >= -1e-10). Points on
  /// shared faces may return either neighbor.
  int locate_cell(const Vec3& x, double tol = 1e-10) const {
    int i, j, k;
    grid_.coords(x, i, j, k);
    for (int32_t c : grid_.bins[grid_.bin_index(i, j, k)]) {
      const Vec4 lam = barycentric(c, x);
      if (lam.minCoeff() >= -tol) return c;
    }
    throw NotFound("locate_cell: point outside mesh");
  }

  bool inside(const Vec3& x) const {
    for (int d = 0; d < 3; ++d)
      if (x[d] < box_lo[d] - 1e-12 || x[d] > box_hi[d] + 1e-12) return false;
    return true;
  }

  void build_locator() {
    grid_.lo = box_lo;
    grid_.hi = box_hi;
    const int n = std::max(1, static_cast<int>(std::cbrt(cells.size() / 6.0)));
    grid_.nb[0] = grid_.nb[1] = grid_.nb[2] = n;
    grid_.bins.assign(static_cast<size_t>(n) * n * n, {});
    for (size_t c = 0; c < cells.size(); ++c) {
      Vec3 lo = vertices[cells[c][0]], hi = lo;
      for (int v = 1; v < 4; ++v) {
        lo = lo.cwiseMin(vertices[cells[c][v]]);
        hi = hi.cwiseMax(vertices[cells[c][v]]);
      }
      int i0, j0, k0, i1, j1, k1;
      grid_.coords(lo - Vec3::Constant(1e-12), i0, j0, k0);
      grid_.coords(hi + Vec3::Constant(1e-12), i1, j1, k1);
      for (int k = k0; k <= k1; ++k)
        for (int j = j0; j <= j1; ++j)
          for (int i = i0; i <= i1; ++i)
            grid_.bins[grid_.bin_index(i, j, k)].push_back(static_cast<int32_t>(c));
    }
  }

 private:
  detail::CellGrid grid_;
};

/// Uniform mesh of [lo,hi] with n subdivisions per axis, 6 tets per cube.
inline TetMesh3D build_box_mesh(int n, const Vec3& lo = Vec3::Zero(),
                                const Vec3& hi = Vec3::Ones()) {
  if (n < 1) throw InvalidArgument("build_box_mesh: n must be >= 1");
  for (int d = 0; d < 3; ++d)
    if (!(hi[d] > lo[d])) throw InvalidArgument("build_box_mesh: empty box");

  TetMesh3D mesh;
  mesh.box_lo = lo;
  mesh.box_hi = hi;
  const int np = n + 1;
  auto vid = [np](int i, int j, int k) { return (k * np + j) * np + i; };

  mesh.vertices.reserve(static_cast<size_t>(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        mesh.vertices.emplace_back(lo[0] + (hi[0] - lo[0]) * i / n,
                                   lo[1] + (hi[1] - lo[1]) * j / n,
                                   lo[2] + (hi[2] - lo[2]) * k / n);

  // The 6 Kuhn tetrahedra of a cube: monotone vertex paths from corner
  // (0,0,0) to (1,1,1), one per permutation of the axes.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  mesh.cells.reserve(static_cast<size_t>(n) * n * n * 6);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = vid(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[p[step]];
            tet[step + 1] = vid(c[0], c[1], c[2]);
          }
          if (mesh.signed_volume(tet) < 0.0) std::swap(tet[2], tet[3]);
          mesh.cells.push_back(tet);
        }

  // Boundary faces: those on the box planes, marker by side.
  auto on_side = [&](const Vec3& x, int side) {
    const int d = side / 2;
    const double plane = (side % 2 == 0) ? lo[d] : hi[d];
    return std::abs(x[d] - plane) < 1e-12 * (1.0 + std::abs(plane));
  };
  static const int face_verts[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& cell : mesh.cells)
    for (const auto& fv : face_verts) {
      const std::array<int, 3> f = {cell[fv[0]], cell[fv[1]], cell[fv[2]]};
      for (int side = 0; side < 6; ++side) {
        if (on_side(mesh.vertices[f[0]], side) && on_side(mesh.vertices[f[1]], side) &&
            on_side(mesh.vertices[f[2]], side)) {
          mesh.boundary_faces.push_back({f, side});
          break;
        }
      }
    }

  double hmax = 0.0;
  for (const auto& cell : mesh.cells)
    for (int u = 0; u < 4; ++u)
      for (int v = u + 1; v < 4; ++v)
        hmax = std::max(hmax, (mesh.vertices[cell[u]] - mesh.vertices[cell[v]]).norm());
  mesh.h = hmax;

  mesh.build_locator();
  return mesh;
}

/// 1D mesh of a well segment: vertices ordered by increasing arclength.
class LineMesh1D {
 public:
  LineMesh1D(const WellSegment& seg, int m) : seg_(seg) {
    if (m < 1) throw InvalidArgument("build_line_mesh: m must be >= 1");
    const double L = seg.length();
    arc.reserve(m + 1);
    vertices.reserve(m + 1);
    for (int i = 0; i <= m; ++i) {
      const double s = L * i / m;
      arc.push_back(s);
      vertices.push_back(seg.point_at(s));
    }
    cells.reserve(m);
    for (int i = 0; i < m; ++i) cells.push_back({i, i + 1});
    h = L / m;
  }

  const WellSegment& segment() const { return seg_; }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  double cell_length(int c) const { return arc[cells[c][1]] - arc[cells[c][0]]; }
  double length() const { return seg_.length(); }

  /// Cell containing arclength s (clamped to the mesh).
  int locate(double s) const {
    const int m = n_cells();
    const double L = seg_.length();
    int c = static_cast<int>(std::floor(s / L * m));
    return std::clamp(c, 0, m - 1);
  }

  std::vector<double> arc;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 2>> cells;
  double h = 0.0;  ///< max segment length

 private:
  WellSegment seg_;
};

inline LineMesh1D build_line_mesh(const WellSegment& seg, int m) {
  return LineMesh1D(seg, m);
}

}  // namespace wellfem
