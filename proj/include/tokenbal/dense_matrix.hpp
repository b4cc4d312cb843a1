#pragma once

#include <vector>

#include "tokenbal/matching.hpp"

namespace tokenbal {

// Small row-major dense matrix. Matching application is done by row/column
// averaging, which keeps interval products exact up to one rounding per step.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n, double fill = 0.0) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}

  static DenseMatrix identity(int n);

  int n() const { return n_; }
  double* row(int r) { return a_.data() + static_cast<std::size_t>(r) * n_; }
  const double* row(int r) const { return a_.data() + static_cast<std::size_t>(r) * n_; }
  double& at(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
  double at(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

  // A <- M * A, i.e. rows u and v are replaced by their average for each pair.
  void left_apply_matching(const Matching& m);
  // A <- A * M, i.e. columns u and v are replaced by their average.
  void right_apply_matching(const Matching& m);

  double max_row_sum_error() const;   // max_r |sum(row r) - 1|
  double max_symmetry_error() const;  // max |A - A^T|
  double min_entry() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

}  // namespace tokenbal
