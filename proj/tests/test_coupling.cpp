#include <catch_amalgamated.hpp>

#include <wellfem/coupling.hpp>
#include <wellfem/peaceman.hpp>

using namespace wellfem;

namespace {

WellModel make_line_model(const LineMesh1D& mesh, double radius, double beta0) {
  const WellSegment& seg = mesh.segment();
  SingularField G(SingularField::Kind::InfiniteLine, seg, 1.0, 1.0, 0.0, radius);
  return WellModel(G, CutoffFunction::unity(seg),
                   ExtensionOperator(ExtensionOperator::Kind::Axial, mesh),
                   [beta0](double) { return beta0; }, [](double s) { return 1.0 + s; });
}

}  // namespace

TEST_CASE("trace matrix interpolates at the 1D vertices") {
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  // Off-grid centreline so the barycentric weights are nontrivial.
  const WellSegment seg(Vec3(0.3, 0.4, 0.1), Vec3(0.3, 0.4, 0.9), 1e-2);
  const LineMesh1D mesh1d = build_line_mesh(seg, 5);
  const SparseMatrix T = trace_matrix(V, mesh1d);

  const Eigen::VectorXd colsum =
      Eigen::RowVectorXd::Ones(V.n_dofs()) * T.matrix();
  CHECK((colsum.array() - 1.0).abs().maxCoeff() < 1e-12);

  const Eigen::VectorXd u =
      V.interpolate([](const Vec3& x) { return x[0] + 2.0 * x[1] - x[2]; });
  const Eigen::VectorXd tr = T.apply_transpose(u);
  for (int l = 0; l < mesh1d.n_vertices(); ++l) {
    const Vec3& x = mesh1d.vertices[l];
    CHECK(tr[l] == Catch::Approx(x[0] + 2.0 * x[1] - x[2]).margin(1e-13));
  }

  // A vertex outside the box cannot be located.
  const WellSegment bad(Vec3(0.3, 0.4, 0.5), Vec3(0.3, 0.4, 1.5), 1e-2);
  const LineMesh1D bad1d = build_line_mesh(bad, 2);
  CHECK_THROWS_AS(trace_matrix(V, bad1d), NotFound);
}

TEST_CASE("vertex average matrix sees circle centres of affine fields") {
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  const WellSegment seg(Vec3(0.3, 0.4, 0.1), Vec3(0.3, 0.4, 0.9), 0.05);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  const SparseMatrix T = vertex_average_matrix(V, mesh1d);

  const Eigen::VectorXd colsum =
      Eigen::RowVectorXd::Ones(V.n_dofs()) * T.matrix();
  CHECK((colsum.array() - 1.0).abs().maxCoeff() < 1e-12);

  const Eigen::VectorXd u =
      V.interpolate([](const Vec3& x) { return 1.0 + x[0] - 3.0 * x[2]; });
  const Eigen::VectorXd avg = T.apply_transpose(u);
  for (int l = 0; l < mesh1d.n_vertices(); ++l) {
    const Vec3& x = mesh1d.vertices[l];
    CHECK(avg[l] == Catch::Approx(1.0 + x[0] - 3.0 * x[2]).margin(1e-12));
  }
}

TEST_CASE("cylinder averaging matrix") {
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  const WellSegment seg(Vec3(0.3, 0.4, 0.1), Vec3(0.3, 0.4, 0.9), 0.05);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  const SparseMatrix Pi = averaging_matrix(V, mesh1d);

  REQUIRE(Pi.rows() == mesh1d.n_cells());
  const Eigen::VectorXd rowsum = Pi.matrix() * Eigen::VectorXd::Ones(V.n_dofs());
  CHECK((rowsum.array() - 1.0).abs().maxCoeff() < 1e-12);

  // Affine field: surface average over the cylinder above cell m is the
  // value at the cell midpoint on the axis.
  const Eigen::VectorXd u = V.interpolate([](const Vec3& x) { return x[2]; });
  const Eigen::VectorXd avg = Pi.apply(u);
  for (int m = 0; m < mesh1d.n_cells(); ++m) {
    const double smid = 0.5 * (mesh1d.arc[m] + mesh1d.arc[m + 1]);
    CHECK(avg[m] == Catch::Approx(seg.point_at(smid)[2]).margin(1e-12));
  }
}

TEST_CASE("well model corrects the transfer coefficients") {
  const double R = 1e-2;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 8);
  const WellModel model = make_line_model(mesh1d, R, 2.0 * M_PI);

  // Infinite-line kernel with unit cutoff: the borehole average is
  // -ln(R)/(2 pi), constant along the well.
  const double gbar = -std::log(R) / (2.0 * M_PI);
  for (int l = 0; l < mesh1d.n_vertices(); ++l) {
    CHECK(model.gbar(l) == Catch::Approx(gbar).epsilon(1e-12));
    CHECK(model.beta_star(l) ==
          Catch::Approx(2.0 * M_PI / (1.0 - std::log(R))).epsilon(1e-12));
    const double s = mesh1d.arc[l];
    CHECK(model.beta_hat_star(l) ==
          Catch::Approx((1.0 + s) / (1.0 - std::log(R))).epsilon(1e-12));
  }
  CHECK(model.beta_star_at(0.3) == Catch::Approx(model.beta_star(0)).epsilon(1e-12));

  // beta tuned against the average so 1 + beta gbar vanishes.
  CHECK_THROWS_AS(make_line_model(mesh1d, R, -1.0 / gbar), DegenerateCoefficient);
}

TEST_CASE("truncated kernel reproduces the equivalent well coefficient") {
  const double R = 0.05, re = 0.2, S = 0.5;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  SingularField G(SingularField::Kind::Truncated, seg, 1.0, 1.0, re);
  const double beta = 2.0 * M_PI / S;
  const WellModel model(G, CutoffFunction::unity(seg),
                        ExtensionOperator(ExtensionOperator::Kind::Axial, mesh1d),
                        [beta](double) { return beta; }, [](double) { return 1.0; });

  PeacemanParams prm;
  prm.radius = R;
  prm.r_e = re;
  prm.skin = S;
  CHECK(model.beta_star(0) ==
        Catch::Approx(srb_equivalent_coefficient(prm)).epsilon(1e-12));
  CHECK(model.beta_star(0) ==
        Catch::Approx(peaceman_flux_coefficient(prm)).epsilon(1e-12));

  // The truncated kernel is for index calculations only; the split
  // assembly rejects it (the collapsed limit remains available).
  const TetMesh3D mesh = build_box_mesh(2);
  const FESpace3D V(mesh);
  const FESpace1D What(mesh1d);
  CHECK_THROWS_AS(coupling_block(V, model, ModelParams{}), InvalidArgument);
  const BlockSystem sys = assemble_srb_system(V, What, model, ModelParams{}, BcData{},
                                              VbarMode::Trace,
                                              [](const Vec3&) { return 0.0; },
                                              [](double) { return 0.0; },
                                              /*collapsed_cutoff=*/true);
  CHECK(sys.A11.norm() > 0.0);
}

TEST_CASE("coupling block annihilates constant 1D data") {
  // With a unit cutoff and axial extension, the extension of all-ones data
  // is identically 1, so grad(psi E) = 0 and every row sums to zero once
  // the per-node coefficient is constant.
  const double R = 1e-2;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  const WellModel model = make_line_model(mesh1d, R, 2.0 * M_PI);
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);

  const SparseMatrix C = coupling_block(V, model, ModelParams{});
  const Eigen::VectorXd rowsum = C.matrix() * Eigen::VectorXd::Ones(C.cols());
  CHECK(rowsum.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("coupling block against direct sampling") {
  const double R = 0.1;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 2);
  const WellModel model = make_line_model(mesh1d, R, 2.0 * M_PI);
  const TetMesh3D mesh = build_box_mesh(2);
  const FESpace3D V(mesh);
  const ModelParams prm;

  const SparseMatrix C = coupling_block(V, model, prm, 7);

  // Midpoint sampling of the defining integral on a uniform grid.
  const int l = 1;  // middle 1D vertex
  const int N = 96;
  Eigen::VectorXd col = Eigen::VectorXd::Zero(V.n_dofs());
  Eigen::VectorXd w, dw;
  const double dvol = 1.0 / (static_cast<double>(N) * N * N);
  const Vec3 tau = seg.tangent();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const Vec3 x((i + 0.5) / N, (j + 0.5) / N, (k + 0.5) / N);
        const int c = mesh.locate_cell(x);
        const Vec4 lam = mesh.barycentric(c, x);
        const auto bg = V.basis_gradients(c);
        model.extension().cardinal(seg.axial_coord(x), w, dw);
        const double G = model.kernel().value(x);
        const Vec3 gG = model.kernel().gradient(x);
        const Vec3 grad_pe = dw[l] * tau;  // unit cutoff
        const double f2 = grad_pe.dot(gG);
        const double bs = model.beta_star(l);
        for (int a = 0; a < 4; ++a)
          col[mesh.cells[c][a]] +=
              dvol * bs * (G * grad_pe.dot(bg[a]) - f2 * lam[a]);
      }

  Eigen::VectorXd ccol = Eigen::VectorXd::Zero(V.n_dofs());
  for (int i = 0; i < V.n_dofs(); ++i) ccol[i] = C.coeff(i, l);
  CHECK((ccol - col).norm() < 0.03 * col.norm());
}

TEST_CASE("collapsed-cutoff split system uses the lumped exchange block") {
  const double R = 1e-2;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  const WellModel model = make_line_model(mesh1d, R, 2.0 * M_PI);
  const TetMesh3D mesh = build_box_mesh(4);
  const FESpace3D V(mesh);
  const FESpace1D What(mesh1d);

  const BlockSystem sys = assemble_srb_system(V, What, model, ModelParams{}, BcData{},
                                              VbarMode::Trace,
                                              [](const Vec3&) { return 0.0; },
                                              [](double) { return 0.0; },
                                              /*collapsed_cutoff=*/true);
  const SparseMatrix T = trace_matrix(V, mesh1d);
  const SparseMatrix Mstar = assemble_mass_1d_p1p1(
      What, [&](double s) { return model.beta_star_at(s); });
  const Eigen::SparseMatrix<double> expect = -(T.matrix() * Mstar.matrix());
  CHECK((sys.A12 - expect).norm() < 1e-14);

  // 1D block: stiffness plus the corrected mass.
  const SparseMatrix Ahat = assemble_stiffness_1d(What, [](double) { return 1.0; });
  const SparseMatrix Mbh = assemble_mass_1d_p1p1(
      What, [&](double s) { return model.beta_hat_star_at(s); });
  CHECK((sys.A22 - Ahat.matrix() - Mbh.matrix()).norm() < 1e-14);
}

TEST_CASE("assembly rejects mismatched 1D meshes") {
  const double R = 1e-2;
  const WellSegment seg(Vec3(0.5, 0.5, 0.0), Vec3(0.5, 0.5, 1.0), R);
  const LineMesh1D mesh1d = build_line_mesh(seg, 4);
  const LineMesh1D other = build_line_mesh(seg, 4);
  const WellModel model = make_line_model(mesh1d, R, 2.0 * M_PI);
  const TetMesh3D mesh = build_box_mesh(2);
  const FESpace3D V(mesh);
  const FESpace1D Wother(other);
  CHECK_THROWS_AS(
      assemble_srb_system(V, Wother, model, ModelParams{}, BcData{}),
      InvalidArgument);
  CHECK_THROWS_AS(
      assemble_standard_system(V, Wother, model, ModelParams{}, BcData{}),
      InvalidArgument);
}

TEST_CASE("flatten applies Dirichlet data symmetrically") {
  BlockSystem sys;
  sys.n3 = 2;
  sys.n1 = 1;
  Eigen::MatrixXd A11(2, 2), A12(2, 1), A21(1, 2), A22(1, 1);
  A11 << 4.0, 1.0, 1.0, 3.0;
  A12 << 0.5, -0.5;
  A21 << 0.25, 0.75;
  A22 << 2.0;
  sys.A11 = A11.sparseView();
  sys.A12 = A12.sparseView();
  sys.A21 = A21.sparseView();
  sys.A22 = A22.sparseView();
  sys.rhs3 = Eigen::Vector2d(1.0, 2.0);
  sys.rhs1 = Eigen::VectorXd::Constant(1, 3.0);
  sys.bc.dirichlet_3d = {{0, 5.0}};

  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd F;
  sys.flatten(K, F);

  const Eigen::MatrixXd Kd(K);
  CHECK(Kd.row(0).isApprox(Eigen::RowVector3d(1.0, 0.0, 0.0)));
  CHECK(Kd.col(0).isApprox(Eigen::Vector3d(1.0, 0.0, 0.0)));
  CHECK(F[0] == 5.0);
  CHECK(F[1] == Catch::Approx(2.0 - 1.0 * 5.0));   // rhs - A11(1,0) g
  CHECK(F[2] == Catch::Approx(3.0 - 0.25 * 5.0));  // rhs - A21(0,0) g
  CHECK(Kd(1, 1) == 3.0);
  CHECK(Kd(1, 2) == -0.5);
  CHECK(Kd(2, 2) == 2.0);
}
