#pragma once

#include <cstdint>
#include <vector>

#include "tokenbal/graph.hpp"
#include "tokenbal/load_state.hpp"
#include "tokenbal/rng.hpp"

namespace tokenbal {

// P(gamma): off-diagonal 1/(gamma*Delta) on edges, diagonal 1 - deg(u)/(gamma*Delta).
struct DiffusionMatrix {
  double gamma = 2.0;
  int delta = 0;

  double off_diagonal() const { return 1.0 / (gamma * delta); }
};

DiffusionMatrix make_diffusion(const Graph& g, double gamma);

// xi_u += sum_{v in N(u)} (xi_v - xi_u) / (gamma * Delta), simultaneously.
void diffusion_continuous_round(LoadState& state, const Graph& g, const DiffusionMatrix& dm);

// d-regular graphs only: every node sends floor(x/(d+1)) to each neighbor,
// keeps the same, and scatters the remainder uniformly without replacement
// over itself and its neighbors. Requires non-negative loads.
void apply_vertex_based_round(LoadState& state, const Graph& g, RngStream& rng);

// Per-edge rounding errors of one edge-based round, aligned with g.edge_list().
struct EdgeFlowError {
  std::vector<double> per_edge;  // e_{u,v} for [u:v], antisymmetric by convention

  double max_abs() const;
};

// Each edge computes the continuous-rule flow from the current discrete vector
// and rounds it up with probability equal to its fractional part; flows are
// applied antisymmetrically and x' = x P + e holds entrywise.
EdgeFlowError apply_edge_based_round(LoadState& state, const Graph& g,
                                     const DiffusionMatrix& dm, RngStream& rng);

enum class DiffusionVariant { vertex_based, edge_based };

// Lockstep discrete/continuous run; the edge-based variant can re-derive the
// deviation from logged errors and powers of P and report the max difference
// between the two routes over the checked rounds.
struct DiffusionDeviationSeries {
  std::vector<double> max_abs;
  double cross_check_error = 0.0;
  double identity_error = 0.0;  // max entrywise |x' - (xP + e)| over rounds
};

DiffusionDeviationSeries diffusion_deviation_series(const Graph& g, double gamma,
                                                    DiffusionVariant variant,
                                                    std::vector<std::int64_t> x0,
                                                    std::uint64_t seed, int t_max,
                                                    int check_stride = 0);

}  // namespace tokenbal
