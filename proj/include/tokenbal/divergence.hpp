#pragma once

#include <optional>
#include <span>

#include "tokenbal/graph.hpp"
#include "tokenbal/matching.hpp"

namespace tokenbal {

enum class DivergenceModel { matching, diffusion };

struct DivergenceReport {
  double psi_p = 0.0;
  int p = 2;
  DivergenceModel model = DivergenceModel::matching;
  double upsilon_p = 0.0;  // diffusion only

  int witness_node = -1;   // node attaining the max
  int achieving_t = 0;     // matching: prefix length attaining the sup
  int truncation = 0;      // horizon actually examined
  bool converged = true;   // diffusion: tail bound reached tolerance before the cap
  double tail_certificate = 0.0;
};

// Local p-divergence of a finite matching sequence: for every prefix length t
// up to the horizon, a backward pass over the interval products accumulates
// sum_s sum_{[u:v] in M^(s)} |M^{[s+1,t]}_{w,u} - M^{[s+1,t]}_{w,v}|^p per
// node w; the report carries the sup over t, the t attaining it, and the
// quadratic tail certificate 2*sum_u (M^{[t*+1,T]}_{w,u} - 1/n)^2.
DivergenceReport psi_p_matching(std::span<const Matching> schedule, int n, int p = 2,
                                std::optional<int> node = std::nullopt);

// Verifies, at the full horizon, that each round's pair contribution equals
// the drop of the row potential sum_u (M^{[s+1,T]}_{w,u} - 1/n)^2, for every
// node; returns the largest absolute defect.
double telescoping_identity_error(std::span<const Matching> schedule, int n);

// Prefix divergence sums never exceed twice the row potential of the
// remaining window; returns the worst violation (negative means slack).
double prefix_tail_bound_violation(std::span<const Matching> schedule, int n, int t1);

// Local 2-divergence and refined local 2-divergence of the diffusion matrix,
// by iterating rows of P^t. Truncates once lambda^(2t) <= tol (that bounds the
// remaining row potential) or at t_cap rounds, whichever comes first; a capped
// run is flagged as a lower bound.
DivergenceReport psi2_upsilon2_diffusion(const Graph& g, double gamma, int t_cap = 2048,
                                         double tol = 1e-12);

}  // namespace tokenbal
