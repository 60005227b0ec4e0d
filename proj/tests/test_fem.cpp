#include <catch_amalgamated.hpp>

#include <random>

#include <wellfem/fem.hpp>

using namespace wellfem;

TEST_CASE("3D stiffness matrix basics") {
  const TetMesh3D mesh = build_box_mesh(2);
  const FESpace3D V(mesh);
  const SparseMatrix A = assemble_stiffness_3d(V, [](const Vec3&) { return 1.0; });

  // Partition of unity: constants lie in the kernel.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(V.n_dofs());
  CHECK((A.matrix() * ones).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((A.matrix() - Eigen::SparseMatrix<double>(A.matrix().transpose())).norm() <
        1e-12);

  // Dirichlet energy of a linear interpolant is exact: u = 2x + 3y - z.
  const Eigen::VectorXd u =
      V.interpolate([](const Vec3& x) { return 2 * x[0] + 3 * x[1] - x[2]; });
  CHECK(u.dot(A.matrix() * u) == Catch::Approx(14.0).epsilon(1e-12));

  // Variable coefficient scales the energy: coeff = 1 + x on u = z.
  const SparseMatrix Ax =
      assemble_stiffness_3d(V, [](const Vec3& x) { return 1.0 + x[0]; });
  const Eigen::VectorXd w = V.interpolate([](const Vec3& x) { return x[2]; });
  CHECK(w.dot(Ax.matrix() * w) == Catch::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("1D stiffness and mass stencils") {
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 1e-2);
  const LineMesh1D mesh = build_line_mesh(seg, 4);
  const FESpace1D W(mesh);
  const double h = 0.25;

  const SparseMatrix A = assemble_stiffness_1d(W, [](double) { return 1.0; });
  CHECK(A.coeff(1, 1) == Catch::Approx(2.0 / h));
  CHECK(A.coeff(1, 2) == Catch::Approx(-1.0 / h));
  CHECK(A.coeff(0, 0) == Catch::Approx(1.0 / h));
  CHECK(A.coeff(0, 2) == 0.0);

  const SparseMatrix M = assemble_mass_1d_p1p1(W, [](double) { return 1.0; });
  CHECK(M.coeff(1, 1) == Catch::Approx(2.0 * h / 3.0));
  CHECK(M.coeff(1, 2) == Catch::Approx(h / 6.0));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(W.n_dofs());
  CHECK(ones.dot(M.matrix() * ones) == Catch::Approx(1.0));  // total length

  // Quadratic coefficient integrated exactly by the 3-point rule.
  const SparseMatrix Ms = assemble_mass_1d_p1p1(W, [](double s) { return s * s; });
  CHECK(ones.dot(Ms.matrix() * ones) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("DG0 x P1 pairing recovers cell averages") {
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 1e-2);
  const LineMesh1D mesh = build_line_mesh(seg, 5);
  const FESpace1D W(mesh);
  const DG0Space1D dg(mesh);

  const SparseMatrix N = assemble_mass_1d_dg0p1(dg, W);
  const Eigen::VectorXd f = W.interpolate([](double s) { return 3.0 * s - 1.0; });
  const Eigen::VectorXd avg = N.matrix() * f;
  for (int m = 0; m < mesh.n_cells(); ++m) {
    const double mid = 0.5 * (mesh.arc[m] + mesh.arc[m + 1]);
    CHECK(avg[m] / mesh.cell_length(m) ==
          Catch::Approx(3.0 * mid - 1.0).margin(1e-14));
  }

  const LineMesh1D other = build_line_mesh(seg, 3);
  const DG0Space1D dg_other(other);
  CHECK_THROWS_AS(assemble_mass_1d_dg0p1(dg_other, W), InvalidArgument);
}

TEST_CASE("load vectors integrate the source") {
  const TetMesh3D mesh3 = build_box_mesh(2);
  const FESpace3D V(mesh3);
  const Eigen::VectorXd b3 = assemble_load_3d(V, [](const Vec3&) { return 1.0; });
  CHECK(b3.sum() == Catch::Approx(1.0));  // domain volume
  const Eigen::VectorXd bx = assemble_load_3d(V, [](const Vec3& x) { return x[0]; });
  CHECK(bx.sum() == Catch::Approx(0.5).epsilon(1e-12));

  const WellSegment seg(Vec3(0.5, 0.5, 0.25), Vec3(0.5, 0.5, 0.75), 1e-2);
  const LineMesh1D mesh1 = build_line_mesh(seg, 4);
  const FESpace1D W(mesh1);
  const Eigen::VectorXd b1 = assemble_load_1d(W, [](double) { return 2.0; });
  CHECK(b1.sum() == Catch::Approx(1.0));  // 2 x length
}

TEST_CASE("error norms against callables") {
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  const ScalarField3D lin = [](const Vec3& x) { return 1.0 + x[0] - 2.0 * x[2]; };
  const VectorField3D lin_grad = [](const Vec3&) { return Vec3(1.0, 0.0, -2.0); };
  const Eigen::VectorXd u = V.interpolate(lin);

  const ErrorNorms zero = error_norms_3d(V, u, &lin, &lin_grad);
  CHECK(zero.l2 == Catch::Approx(0.0).margin(1e-13));
  CHECK(zero.h1_semi == Catch::Approx(0.0).margin(1e-13));

  // Plain norms of the field itself: || x ||_{L2} = 1/sqrt(3).
  const Eigen::VectorXd ux = V.interpolate([](const Vec3& x) { return x[0]; });
  const ErrorNorms plain = error_norms_3d(V, ux, nullptr, nullptr);
  CHECK(plain.l2 == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(plain.h1_semi == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("1D error norms") {
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 1e-2);
  const LineMesh1D mesh = build_line_mesh(seg, 8);
  const FESpace1D W(mesh);
  const ScalarField1D lin = [](double s) { return 2.0 * s + 1.0; };
  const ScalarField1D lin_ds = [](double) { return 2.0; };
  const Eigen::VectorXd u = W.interpolate(lin);
  const ErrorNorms zero = error_norms_1d(W, u, &lin, &lin_ds);
  CHECK(zero.l2 == Catch::Approx(0.0).margin(1e-13));
  CHECK(zero.h1_semi == Catch::Approx(0.0).margin(1e-13));

  // Interpolation error of sin(pi s) shrinks at second order in L2.
  const ScalarField1D f = [](double s) { return std::sin(M_PI * s); };
  const LineMesh1D fine = build_line_mesh(seg, 16);
  const FESpace1D Wf(fine);
  const double e8 = error_norms_1d(W, W.interpolate(f), &f, nullptr).l2;
  const double e16 = error_norms_1d(Wf, Wf.interpolate(f), &f, nullptr).l2;
  CHECK(e8 / e16 == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("P1 difference norms are exact") {
  const TetMesh3D mesh = build_box_mesh(2);
  const FESpace3D V(mesh);
  const Eigen::VectorXd a = V.interpolate([](const Vec3& x) { return x[0] + x[1]; });
  const Eigen::VectorXd b = V.interpolate([](const Vec3& x) { return 2.0 * x[0]; });
  // d = y - x: || d ||_{L2}^2 = int (y-x)^2 = 1/6, | d |_{H1}^2 = 2.
  const ErrorNorms d = fe_diff_norms_3d(V, a, b);
  CHECK(d.l2 == Catch::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-12));
  CHECK(d.h1_semi == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 1e-2);
  const LineMesh1D mesh1 = build_line_mesh(seg, 4);
  const FESpace1D W(mesh1);
  const Eigen::VectorXd p = W.interpolate([](double s) { return s; });
  const Eigen::VectorXd q = W.interpolate([](double) { return 0.25; });
  const ErrorNorms d1 = fe_diff_norms_1d(W, p, q);
  // s - 1/4: int_0^1 (s - 1/4)^2 ds = 7/48.
  CHECK(d1.l2 == Catch::Approx(std::sqrt(7.0 / 48.0)).epsilon(1e-12));
  CHECK(d1.h1_semi == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exterior error norms skip the borehole") {
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 0.25);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(V.n_dofs());
  // Reference 1 inside the borehole only: the exterior norm must ignore it.
  const ScalarField3D inside = [&](const Vec3& x) {
    return dist_to_segment(x, seg) < 0.25 ? 1.0 : 0.0;
  };
  const ErrorNorms e = error_norms_exterior(V, zero, &inside, nullptr, seg);
  CHECK(e.l2 == Catch::Approx(0.0).margin(1e-14));
  // Constant reference everywhere: the norm sees vol(exterior) < 1.
  const ScalarField3D one = [](const Vec3&) { return 1.0; };
  const ErrorNorms f = error_norms_exterior(V, zero, &one, nullptr, seg);
  const double vol_ext = 1.0 - M_PI * 0.25 * 0.25;
  CHECK(f.l2 == Catch::Approx(std::sqrt(vol_ext)).epsilon(0.02));
}

TEST_CASE("weighted norm with radial weight") {
  const TetMesh3D mesh = build_box_mesh(16);
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), 1e-3);
  const ScalarField3D one = [](const Vec3&) { return 1.0; };

  CHECK(norm_L2_weighted(mesh, one, seg, 0.0) == Catch::Approx(1.0).epsilon(1e-10));

  // alpha = 1/2 weights by r itself; int_cube r dx has a closed form.
  const double exact = (4.0 / 3.0) * 0.125 * (std::sqrt(2.0) + std::asinh(1.0));
  CHECK(norm_L2_weighted(mesh, one, seg, 0.5) ==
        Catch::Approx(std::sqrt(exact)).epsilon(2e-3));

  CHECK_THROWS_AS(norm_L2_weighted(mesh, one, seg, 1.0), InvalidArgument);
  CHECK_THROWS_AS(norm_L2_weighted(mesh, one, seg, -1.5), InvalidArgument);

  CHECK(norm_L2(mesh, [](const Vec3& x) { return x[0]; }) ==
        Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
}
