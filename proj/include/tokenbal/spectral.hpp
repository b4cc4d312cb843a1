#pragma once

#include <limits>

#include "tokenbal/dense_matrix.hpp"
#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/graph.hpp"

namespace tokenbal {

struct SpectralReport {
  static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  double lambda_M = unset;    // contraction factor of a circuit round matrix
  double lambda2_P = unset;   // second largest (signed) eigenvalue of the diffusion matrix
  double lambda_P = unset;    // max{|lambda_2|, |lambda_n|} of the diffusion matrix
  double spectral_gap = unset;
  double conductance = unset;  // lower bound, used in the Cheeger sanity check
};

// Round matrix of a circuit: product of the coloring's matching matrices.
DenseMatrix round_matrix(const EdgeColoring& coloring, int n);

// Dense diffusion matrix with off-diagonal 1/(gamma*Delta).
DenseMatrix diffusion_dense(const Graph& g, double gamma);

// Spectral quantities of a circuit round matrix. Round matrices are products
// of symmetric matrices and need not themselves be symmetric; lambda_M is the
// second largest singular value, which equals max{|lambda_2|,|lambda_n|}
// whenever the product happens to be symmetric and is the factor by which one
// application contracts any zero-sum vector in the 2-norm.
SpectralReport spectral(const Graph& g, const DenseMatrix& round, int dense_cap = 4096);

// Spectral quantities of the diffusion matrix P(gamma).
SpectralReport spectral(const Graph& g, double gamma, int dense_cap = 4096);

// Exact by subset enumeration for n <= 16, otherwise the larger of the
// connectivity floor 1/n^2 and the spectral bound (1 - lambda_2)/2.
double conductance_lower_bound(const Graph& g, double lambda2);

}  // namespace tokenbal
