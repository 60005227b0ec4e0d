#pragma once

// Linear solve of the flattened block system: sparse LU by default, or
// restarted GMRES with an incomplete-LU preconditioner.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "wellfem/coupling.hpp"
#include "wellfem/errors.hpp"

namespace wellfem {

struct SolverConfig {
  enum class Method { DirectLU, GmresIlu };
  Method method = Method::DirectLU;
  double rel_tol = 1e-10;
  int max_iter = 2000;
};

struct Solution {
  Eigen::VectorXd v3;       ///< 3D field (v for the split system, p otherwise)
  Eigen::VectorXd v1;       ///< 1D well pressure
  double residual = 0.0;    ///< relative residual ||F - K x|| / ||F||
  int iterations = 0;       ///< 0 for the direct solver
};

inline Solution solve(const BlockSystem& sys, const SolverConfig& cfg = {}) {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd F;
  sys.flatten(K, F);

  Eigen::VectorXd x;
  int iters = 0;
  if (cfg.method == SolverConfig::Method::DirectLU) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
    if (lu.info() != Eigen::Success)
      throw SolveFailure("solve: sparse LU factorization failed");
    x = lu.solve(F);
  } else {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.setTolerance(cfg.rel_tol);
    gmres.setMaxIterations(cfg.max_iter);
    gmres.set_restart(100);
    gmres.compute(K);
    if (gmres.info() != Eigen::Success)
      throw SolveFailure("solve: ILU preconditioner setup failed");
    x = gmres.solve(F);
    iters = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success)
      throw SolveFailure("solve: GMRES did not converge within max_iter");
  }

  Solution sol;
  sol.v3 = x.head(sys.n3);
  sol.v1 = x.tail(sys.n1);
  sol.iterations = iters;
  const double fn = F.norm();
  sol.residual = (fn > 0.0) ? (F - K * x).norm() / fn : (F - K * x).norm();
  const double limit = (cfg.method == SolverConfig::Method::DirectLU) ? 1e-10 : cfg.rel_tol * 10;
  if (!(sol.residual <= limit))
    throw SolveFailure("solve: residual check failed");
  return sol;
}

}  // namespace wellfem
