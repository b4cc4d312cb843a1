#pragma once

#include <cstdint>

#include "tokenbal/graph.hpp"
#include "tokenbal/schedule.hpp"

namespace tokenbal {

// Smoothing-time measurement for the continuous process.
//
// tau is the first t at which every start vector with discrepancy at most K
// is certified to reach discrepancy eps: since the worst final discrepancy
// over that family equals (K/2) * max_{u,u'} ||col_u - col_{u'}||_1 of the
// interval product, the test K * max_u ||col_u - 1/n||_1 <= eps is sufficient.
// probe_tau is the first t at which all single-spike probes are smoothed; it
// lower-bounds the true smoothing time, tau upper-bounds it.
struct SmoothingEstimate {
  double K = 0.0;
  double eps = 0.0;
  int tau = -1;
  int probe_tau = -1;
  double bound_tau = 0.0;  // circuit: d * 4/(1-lambda) * log(K n / eps)
  bool capped = false;
  int replicas = 1;  // random mode: sample size behind the quantile
};

// Circuit mode is deterministic. Random mode draws `replicas` independent
// schedules and reports the empirical (1 - 1/n)-quantile of their taus.
SmoothingEstimate smoothing_time(const Graph& g, const MatchingSchedule& schedule, double K,
                                 double eps, int t_cap = 100000, int replicas = 24);

}  // namespace tokenbal
