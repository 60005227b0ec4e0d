#include <catch_amalgamated.hpp>

#include <wellfem/testcases.hpp>

using namespace wellfem;

TEST_CASE("case 1 exact fields") {
  const double R = 1e-2;
  const ManufacturedCase mc = make_case1(R);
  CHECK(mc.id == "case1");
  CHECK(mc.mesh1d_divisor == 1);

  // The smooth remainder at radial distance 1: r^2 (ln r - 1) = -1.
  for (double z : {0.2, 0.7})
    CHECK(mc.v_exact(Vec3(1.5, 0.5, z)) ==
          Catch::Approx(-3.0 * z / (4.0 * M_PI)).epsilon(1e-13));

  // Well pressure at the bottom endpoint.
  CHECK(mc.phat_exact(0.0) == Catch::Approx(0.892077).margin(1e-3));
  CHECK(mc.phat_exact(0.0) ==
        Catch::Approx((1.0 - std::log(R)) / (2.0 * M_PI)).epsilon(1e-13));

  CHECK(mc.beta(0.3) == Catch::Approx(2.0 * M_PI));
  CHECK(mc.beta_hat(0.5) ==
        Catch::Approx(3.0 * (1.0 - std::log(R)) / 1.125).epsilon(1e-13));

  // Unit cutoff: the split unknown is the smooth remainder itself.
  for (const Vec3& x : {Vec3(0.1, 0.2, 0.3), Vec3(0.9, 0.5, 0.8)})
    CHECK(mc.v_split(x) == Catch::Approx(mc.v_exact(x)).margin(1e-15));
}

TEST_CASE("case 1 satisfies the exchange relations exactly") {
  const double R = 1e-2;
  const ManufacturedCase mc = make_case1(R);
  const WellSegment seg = mc.segment();

  for (double s : {0.1, 0.35, 0.6, 0.95}) {
    // Borehole average of the full pressure, quadrature vs closed form.
    const double pbar = circle_average(mc.p_exact, seg, s);
    const double v_at_R =
        3.0 / (4.0 * M_PI) * s * R * R * (std::log(R) - 1.0);
    const double closed =
        -(s * s * s + 1.0) * std::log(R) / (2.0 * M_PI) + v_at_R;
    CHECK(pbar == Catch::Approx(closed).margin(1e-10));

    // The wall exchange beta (phat - pbar) carries exactly the line density
    // z^3 + 1; the R^2 corrections cancel between phat and pbar.
    CHECK(mc.beta(s) * (mc.phat_exact(s) - pbar) ==
          Catch::Approx(s * s * s + 1.0).margin(1e-10));
  }
}

TEST_CASE("case 2 exact fields") {
  const ManufacturedCase mc = make_case2();
  CHECK(mc.id == "case2");
  CHECK(mc.radius == 1e-4);
  CHECK(mc.mesh1d_divisor == 2);
  CHECK(mc.kernel_kind == SingularField::Kind::FiniteSegment);
  CHECK(mc.extension_kind == ExtensionOperator::Kind::Rbf);

  // Odd symmetry about the mid-plane.
  CHECK(mc.v_exact(Vec3(0.9, 0.1, 0.5)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(mc.v_exact(Vec3(0.5, 0.5, 1.0)) ==
        Catch::Approx(-mc.v_exact(Vec3(0.5, 0.5, 0.0))).margin(1e-15));

  // Well pressure at the well midpoint (arclength 1/4, height 1/2).
  CHECK(mc.phat_exact(0.25) == Catch::Approx(std::sin(0.5) + 2.0).epsilon(1e-13));

  for (double s : {0.05, 0.2, 0.45}) {
    const double z = 0.25 + s;
    CHECK(mc.beta_hat(s) ==
          Catch::Approx(-mc.beta(s) * std::sin(z) / z).epsilon(1e-12));
    CHECK(mc.beta(s) > 0.0);
  }

  // Far from the well the Gaussian cutoff is numerically zero, so the split
  // unknown coincides with the full pressure.
  for (const Vec3& x : {Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.2, 0.9)})
    CHECK(mc.v_split(x) == Catch::Approx(mc.p_exact(x)).margin(1e-8));
  // Near the axis the split removes the singular part: the value stays O(1).
  CHECK(std::abs(mc.v_split(Vec3(0.5 + 1e-6, 0.5, 0.5))) < 1.0);
}

TEST_CASE("boundary data picks the formulation") {
  const ManufacturedCase mc = make_case2();
  const TetMesh3D mesh3 = build_box_mesh(4);
  const LineMesh1D mesh1 = build_line_mesh(mc.segment(), 4);
  const FESpace3D V(mesh3);
  const FESpace1D What(mesh1);

  const BcData srb = mc.make_bc(V, What, Formulation::Srb);
  const BcData std_bc = mc.make_bc(V, What, Formulation::Standard);
  REQUIRE(srb.dirichlet_3d.size() == V.boundary_dofs.size());
  REQUIRE(srb.dirichlet_1d.size() == 2);
  for (size_t k = 0; k < srb.dirichlet_3d.size(); ++k) {
    const auto& [dof, val] = srb.dirichlet_3d[k];
    CHECK(val == Catch::Approx(mc.v_split(mesh3.vertices[dof])).margin(1e-15));
    CHECK(std_bc.dirichlet_3d[k].second ==
          Catch::Approx(mc.p_exact(mesh3.vertices[dof])).margin(1e-15));
  }
  CHECK(srb.dirichlet_1d[0].second == Catch::Approx(mc.phat_exact(0.0)));
  CHECK(srb.dirichlet_1d[1].second == Catch::Approx(mc.phat_exact(0.5)));
}

TEST_CASE("manufactured cases pass their self-check") {
  const ValidationReport r1 = validate_manufactured(make_case1(1e-2));
  INFO("case1: v_lap " << r1.v_lap_rel << " p_lap " << r1.p_lap_rel
                       << " res1d " << r1.residual_1d << " strength "
                       << r1.strength_rel);
  CHECK(r1.source_sign == 1);
  CHECK(r1.residual_1d < 1e-5);
  CHECK(r1.ok());

  const ValidationReport r2 = validate_manufactured(make_case2());
  INFO("case2: v_lap " << r2.v_lap_rel << " p_lap " << r2.p_lap_rel
                       << " res1d " << r2.residual_1d << " strength "
                       << r2.strength_rel);
  CHECK(r2.source_sign == 1);
  CHECK(r2.ok());
}

TEST_CASE("radius limits") {
  CHECK_THROWS_AS(make_case1(0.0), InvalidArgument);
  CHECK_THROWS_AS(make_case1(0.6), InvalidArgument);
  CHECK_THROWS_AS(make_case2(0.2), InvalidArgument);
  CHECK_NOTHROW(make_case1(0.1));
  CHECK_NOTHROW(make_case2(1e-3));
}
