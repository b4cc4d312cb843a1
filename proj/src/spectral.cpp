#include "tokenbal/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tokenbal/rng.hpp"

namespace tokenbal {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  int n = m.n();
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = m.at(r, c);
  return a;
}

void require_stochastic(const DenseMatrix& m) {
  if (m.max_row_sum_error() > 1e-9 || m.min_entry() < -1e-12)
    throw std::invalid_argument("matrix is not row-stochastic");
}

// Sorted descending eigenvalues of a symmetric matrix.
Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  Eigen::VectorXd ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
  return ev;
}

double clamp_magnitude(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

DenseMatrix round_matrix(const EdgeColoring& coloring, int n) {
  DenseMatrix m = DenseMatrix::identity(n);
  for (const auto& color : coloring.colors) m.right_apply_matching(color);
  return m;
}

DenseMatrix diffusion_dense(const Graph& g, double gamma) {
  if (gamma < 1.0) throw std::invalid_argument("diffusion needs gamma >= 1");
  int n = g.n();
  double off = 1.0 / (gamma * g.max_degree());
  DenseMatrix p(n);
  for (int u = 0; u < n; ++u) {
    p.at(u, u) = 1.0 - g.degree(u) * off;
    for (int v : g.neighbors(u)) p.at(u, v) = off;
  }
  return p;
}

double conductance_lower_bound(const Graph& g, double lambda2) {
  int n = g.n();
  double floor_bound = 1.0 / (static_cast<double>(n) * n);
  double spectral_bound = std::isnan(lambda2) ? 0.0 : (1.0 - lambda2) / 2.0;
  if (n > 16) return std::max(floor_bound, spectral_bound);

  // Exact: min over nonempty S with |S| <= n/2 of cut(S) / (2 * Delta * |S|).
  double best = 1.0;
  const auto& edges = g.edge_list();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    int size = __builtin_popcount(mask);
    if (2 * size > n) continue;
    int cut = 0;
    for (auto [u, v] : edges)
      cut += (((mask >> u) ^ (mask >> v)) & 1u) != 0;
    best = std::min(best, static_cast<double>(cut) / (2.0 * g.max_degree() * size));
  }
  return best;
}

SpectralReport spectral(const Graph& g, const DenseMatrix& round, int dense_cap) {
  if (round.n() != g.n()) throw std::invalid_argument("round matrix size mismatch");
  if (round.n() > dense_cap) throw std::invalid_argument("round matrix above dense eigensolve cap");
  require_stochastic(round);

  int n = round.n();
  Eigen::MatrixXd a = to_eigen(round);
  SpectralReport report;
  if (round.max_symmetry_error() <= 1e-12) {
    Eigen::VectorXd ev = sym_eigenvalues(a);
    report.lambda_M = clamp_magnitude(std::max(std::abs(ev(1)), std::abs(ev(n - 1))));
  } else {
    // Circuit products need not be symmetric; the contraction factor on
    // zero-sum vectors is the top singular value off the all-ones direction.
    Eigen::MatrixXd centered = a - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::VectorXd sv = sym_eigenvalues(centered.transpose() * centered);
    report.lambda_M = clamp_magnitude(std::sqrt(std::max(0.0, sv(0))));
  }
  report.spectral_gap = 1.0 - report.lambda_M;
  return report;
}

SpectralReport spectral(const Graph& g, double gamma, int dense_cap) {
  SpectralReport report;
  int n = g.n();
  if (n <= dense_cap) {
    DenseMatrix p = diffusion_dense(g, gamma);
    Eigen::VectorXd ev = sym_eigenvalues(to_eigen(p));
    report.lambda2_P = ev(1);
    report.lambda_P = clamp_magnitude(std::max(std::abs(ev(1)), std::abs(ev(n - 1))));
  } else {
    // Power iteration on P - J/n with sparse application.
    if (gamma < 1.0) throw std::invalid_argument("diffusion needs gamma >= 1");
    double off = 1.0 / (gamma * g.max_degree());
    std::vector<double> x(n), y(n);
    RngStream rng(0x5eedu, 0, StreamPurpose::init);
    for (auto& v : x) v = rng.next_unit() - 0.5;
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
      double mean = 0.0;
      for (double v : x) mean += v;
      mean /= n;
      for (auto& v : x) v -= mean;
      double norm = 0.0;
      for (double v : x) norm += v * v;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      for (auto& v : x) v /= norm;
      for (int u = 0; u < n; ++u) {
        double acc = (1.0 - g.degree(u) * off) * x[u];
        for (int v : g.neighbors(u)) acc += off * x[v];
        y[u] = acc;
      }
      double next = 0.0;
      for (double v : y) next += v * v;
      next = std::sqrt(next);
      std::swap(x, y);
      if (std::abs(next - lambda) < 1e-12) { lambda = next; break; }
      lambda = next;
    }
    report.lambda_P = clamp_magnitude(lambda);
  }
  report.spectral_gap = 1.0 - report.lambda_P;
  report.conductance = conductance_lower_bound(g, report.lambda2_P);
  return report;
}

}  // namespace tokenbal
