// Command-line front end: experiment runner, well-index table, mesh export
// and manufactured-solution self-checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <wellfem/wellfem.hpp>

namespace {

int cmd_run(const std::string& config_path, bool check) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open " << config_path << "\n";
    return 2;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON in " << config_path << ": " << e.what() << "\n";
    return 2;
  }
  const wellfem::RunConfig cfg = wellfem::RunConfig::from_json(j);
  const wellfem::ExperimentResults res = wellfem::run_experiment(cfg);

  bool ok = true;
  for (const auto& [R, rep] : res.by_radius) {
    std::printf("# %s  R = %g\n", cfg.case_id.c_str(), R);
    std::printf("%10s %14s %14s %14s %14s\n", "h", "l2_omega", "h1_omega",
                "l2_lambda", "h1_lambda");
    for (const auto& row : rep.rows)
      std::printf("%10.4e %14.6e %14.6e %14.6e %14.6e\n", row.h, row.l2_omega,
                  row.h1_omega, row.l2_lambda, row.h1_lambda);
    if (rep.rows.size() >= 2) {
      const double rate = rep.fitted_rate(&wellfem::ConvergenceRow::l2_omega);
      std::printf("fitted L2 rate: %.3f\n", rate);
      const double expected =
          cfg.formulation == wellfem::Formulation::Srb ? 1.5 : 0.8;
      if (check && !(rate >= expected)) {
        std::printf("check: L2 rate %.3f below the expected floor %.2f\n", rate,
                    expected);
        ok = false;
      }
    }
  }
  std::printf("results written to %s\n", cfg.output_dir.c_str());
  if (check && !ok) return 1;
  return 0;
}

int cmd_peaceman(const std::string& out_path) {
  const auto rows = wellfem::run_peaceman_table();
  if (out_path.empty()) {
    wellfem::write_peaceman_csv(rows, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return 2;
    }
    wellfem::write_peaceman_csv(rows, out);
  }
  for (const auto& r : rows)
    if (r.rel_diff > 1e-12) {
      std::cerr << "error: well-index identity violated (rel " << r.rel_diff << ")\n";
      return 1;
    }
  return 0;
}

int cmd_mesh(int n, const std::string& case_id, const std::string& out_path) {
  const wellfem::TetMesh3D mesh = wellfem::build_box_mesh(n);
  std::vector<std::pair<std::string, Eigen::VectorXd>> fields;
  if (!case_id.empty()) {
    const wellfem::ManufacturedCase mc =
        case_id == "case1" ? wellfem::make_case1(0.01) : wellfem::make_case2();
    const wellfem::WellSegment seg = mc.segment();
    Eigen::VectorXd d(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
      d[i] = wellfem::dist_to_segment(mesh.vertices[i], seg);
    fields.emplace_back("well_distance", d);
  }
  wellfem::write_vtk(mesh, fields, out_path);
  std::printf("wrote %s: %zu vertices, %zu cells, h = %.4e\n", out_path.c_str(),
              mesh.vertices.size(), mesh.cells.size(), mesh.h);
  return 0;
}

int cmd_validate(const std::string& case_id, double radius, bool check) {
  const wellfem::ManufacturedCase mc =
      case_id == "case1" ? wellfem::make_case1(radius)
                         : wellfem::make_case2(radius);
  const wellfem::ValidationReport rep = wellfem::validate_manufactured(mc);
  std::printf("case:              %s (R = %g)\n", mc.id.c_str(), radius);
  std::printf("source sign:       %+d\n", rep.source_sign);
  std::printf("v Laplacian (rel): %.3e\n", rep.v_lap_rel);
  std::printf("p Laplacian (rel): %.3e\n", rep.p_lap_rel);
  std::printf("well residual:     %.3e\n", rep.residual_1d);
  std::printf("source strength:   %.3e (tol %.3e)\n", rep.strength_rel, rep.strength_tol);
  std::printf("status:            %s\n", rep.ok() ? "ok" : "FAILED");
  return (check && !rep.ok()) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled 1D-3D well-flow solver"};
  app.require_subcommand(1);

  std::string config_path;
  bool run_check = false;
  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("config", config_path, "JSON configuration file")->required();
  run->add_flag("--check", run_check, "exit nonzero if convergence rates degrade");

  std::string peaceman_out;
  CLI::App* pm = app.add_subcommand("peaceman", "well-index coefficient table");
  pm->add_option("-o,--output", peaceman_out, "CSV output path (default: stdout)");

  int mesh_n = 8;
  std::string mesh_case, mesh_out = "mesh.vtk";
  CLI::App* mesh = app.add_subcommand("mesh", "export a box mesh as legacy VTK");
  mesh->add_option("-n", mesh_n, "subdivisions per axis")->check(CLI::PositiveNumber);
  mesh->add_option("--case", mesh_case, "attach well-distance field (case1|case2)")
      ->check(CLI::IsMember({"case1", "case2"}));
  mesh->add_option("-o,--output", mesh_out, "output path");

  std::string val_case = "case1";
  double val_radius = 1e-2;
  bool val_check = false;
  CLI::App* val = app.add_subcommand("validate", "manufactured-solution self-check");
  val->add_option("case", val_case, "case1 or case2")
      ->check(CLI::IsMember({"case1", "case2"}));
  val->add_option("--radius", val_radius, "borehole radius");
  val->add_flag("--check", val_check, "exit nonzero on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, run_check);
    if (pm->parsed()) return cmd_peaceman(peaceman_out);
    if (mesh->parsed()) return cmd_mesh(mesh_n, mesh_case, mesh_out);
    if (val->parsed()) return cmd_validate(val_case, val_radius, val_check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
