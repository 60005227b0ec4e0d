#pragma once

// Thin triplet-accumulation wrapper around Eigen's compressed sparse storage.

#include <Eigen/Sparse>

#include <vector>

#include "wellfem/errors.hpp"

namespace wellfem {

class SparseMatrix {
 public:
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidArgument("SparseMatrix: negative dimension");
  }

  void add(int i, int j, double v) {
    triplets_.emplace_back(i, j, v);
  }

  /// Compress; duplicate (i,j) entries are summed.
  void finalize() {
    mat_.resize(rows_, cols_);
    mat_.setFromTriplets(triplets_.begin(), triplets_.end());
    mat_.makeCompressed();
    triplets_.clear();
    triplets_.shrink_to_fit();
    finalized_ = true;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nonzeros() const { return static_cast<int>(mat_.nonZeros()); }
  bool finalized() const { return finalized_; }

  double coeff(int i, int j) const { return mat_.coeff(i, j); }

  const Eigen::SparseMatrix<double>& matrix() const {
    if (!finalized_) throw InvalidArgument("SparseMatrix: not finalized");
    return mat_;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix() * x; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const {
    return matrix().transpose() * x;
  }

 private:
  int rows_, cols_;
  bool finalized_ = false;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseMatrix<double> mat_;
};

}  // namespace wellfem
