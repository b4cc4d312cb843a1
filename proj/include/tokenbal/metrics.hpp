#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tokenbal/dense_matrix.hpp"
#include "tokenbal/graph.hpp"
#include "tokenbal/load_state.hpp"

namespace tokenbal {

// max - min; throws on an empty vector.
double discrepancy(const LoadState& state);
double discrepancy(std::span<const double> loads);
double discrepancy(std::span<const std::int64_t> loads);

struct PotentialReport {
  double quadratic = 0.0;    // sum (x_u - mean)^2
  double polynomial = 0.0;   // sum over x_u >= 11 of x_u^8
  double exponential = 0.0;  // sum over x_u >= 2 of exp(coeff * x_u)
  double exp_coefficient = 0.0;
  double lambda_epsilon = 0.25;
};

// The exponential coefficient is (1/8) * (log n)^(1 - lambda_epsilon).
PotentialReport potentials(const LoadState& state, double lambda_epsilon = 0.25);

struct DiagnosticsParams {
  double eps_t = 0.5;                 // window-expansion exponent
  double eps = 0.25;                  // ball budget exponent
  int radius = 1;                     // ball radius r
  int high_load_threshold = 11;       // membership bar for S1
  double expected_load_threshold = 4; // bar for S3
};

struct DiagnosticsReport {
  std::vector<int> s1, s2, s3;   // node sets for the three conditions
  std::vector<int> bad;          // s2 intersect s3
  std::vector<std::int64_t> ball_load;  // per node, sum over B_r(u)
  bool ball_event = false;          // all balls hold <= 16 (log n)^eps tokens
  bool neighborhood_event = false;  // all open neighborhoods hold <= Delta/2
  double row_norm_threshold = 0.0;  // (log n)^(-eps_t/7), the S2 bar
};

// window = interval product over the inspected rounds. S1: high load.
// S2: ||window_{u,.}||_2^2 below the expansion bar. S3: the expected load at
// the window-smeared position of u is at least the configured bar.
DiagnosticsReport diagnostics(const LoadState& state, const Graph& g,
                              const DenseMatrix& window, const DiagnosticsParams& params);

// Membership in the token-excess family: total excess above
// 8*ell*ceil((log n)^eps) + ell is at most 4n * exp(-(1/4)(log n)^(ell*eps)).
// Requires the mean normalized into [0, 1).
bool e_ell_membership(const LoadState& state, int ell, double eps);

// The two load events on their own, without the window-dependent sets.
struct EventFlags {
  bool ball_event = false;
  bool neighborhood_event = false;
};

EventFlags load_events(const LoadState& state, const Graph& g, int radius, double eps);

}  // namespace tokenbal
