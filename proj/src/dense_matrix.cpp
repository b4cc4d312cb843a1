#include "tokenbal/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace tokenbal {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

void DenseMatrix::left_apply_matching(const Matching& m) {
  for (auto [u, v] : m.pairs()) {
    double* ru = row(u);
    double* rv = row(v);
    for (int c = 0; c < n_; ++c) {
      double avg = 0.5 * (ru[c] + rv[c]);
      ru[c] = avg;
      rv[c] = avg;
    }
  }
}

void DenseMatrix::right_apply_matching(const Matching& m) {
  for (auto [u, v] : m.pairs()) {
    for (int r = 0; r < n_; ++r) {
      double* rr = row(r);
      double avg = 0.5 * (rr[u] + rr[v]);
      rr[u] = avg;
      rr[v] = avg;
    }
  }
}

double DenseMatrix::max_row_sum_error() const {
  double worst = 0.0;
  for (int r = 0; r < n_; ++r) {
    double s = 0.0;
    const double* rr = row(r);
    for (int c = 0; c < n_; ++c) s += rr[c];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double DenseMatrix::max_symmetry_error() const {
  double worst = 0.0;
  for (int r = 0; r < n_; ++r)
    for (int c = r + 1; c < n_; ++c) worst = std::max(worst, std::abs(at(r, c) - at(c, r)));
  return worst;
}

double DenseMatrix::min_entry() const {
  return a_.empty() ? 0.0 : *std::min_element(a_.begin(), a_.end());
}

}  // namespace tokenbal
