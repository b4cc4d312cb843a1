#include "tokenbal/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tokenbal/dense_matrix.hpp"
#include "tokenbal/spectral.hpp"

namespace tokenbal {

namespace {

struct SinglePass {
  int tau = -1;
  int probe_tau = -1;
  bool capped = false;
};

// Tracks the forward interval product and stops once both the certified test
// and the spike probes are satisfied. The certified statistic is
// K * max_u ||column_u - 1/n||_1, which dominates the worst final discrepancy
// over every start vector of discrepancy at most K; the probe statistic is the
// worst spike discrepancy K * max_v (max - min of row v). Both are
// non-increasing along the product, so first crossings are well defined.
SinglePass measure_single(const Graph& g, const MatchingSchedule& schedule, double K, double eps,
                          int t_cap) {
  const int n = g.n();
  DenseMatrix a = DenseMatrix::identity(n);
  SinglePass out;
  std::vector<double> col_l1(n);
  for (int t = 1; t <= t_cap; ++t) {
    a.right_apply_matching(schedule.matching_for_round(g, t));
    std::fill(col_l1.begin(), col_l1.end(), 0.0);
    double probe_worst = 0.0;
    for (int r = 0; r < n; ++r) {
      const double* row = a.row(r);
      double lo = row[0], hi = row[0];
      for (int c = 0; c < n; ++c) {
        col_l1[c] += std::abs(row[c] - 1.0 / n);
        lo = std::min(lo, row[c]);
        hi = std::max(hi, row[c]);
      }
      probe_worst = std::max(probe_worst, K * (hi - lo));
    }
    if (out.probe_tau < 0 && probe_worst <= eps) out.probe_tau = t;
    double cert_worst = K * *std::max_element(col_l1.begin(), col_l1.end());
    if (out.tau < 0 && cert_worst <= eps) out.tau = t;
    if (out.tau >= 0 && out.probe_tau >= 0) return out;
  }
  out.capped = true;
  return out;
}

}  // namespace

SmoothingEstimate smoothing_time(const Graph& g, const MatchingSchedule& schedule, double K,
                                 double eps, int t_cap, int replicas) {
  if (K < eps || eps < 0) throw std::invalid_argument("smoothing needs K >= eps >= 0");
  SmoothingEstimate estimate;
  estimate.K = K;
  estimate.eps = eps;

  if (schedule.mode() == ScheduleMode::balancing_circuit) {
    SinglePass pass = measure_single(g, schedule, K, eps, t_cap);
    estimate.tau = pass.tau;
    estimate.probe_tau = pass.probe_tau;
    estimate.capped = pass.capped;
    estimate.replicas = 1;
    double lambda = spectral(g, round_matrix(schedule.coloring(), g.n())).lambda_M;
    if (eps > 0 && lambda < 1.0) {
      estimate.bound_tau = schedule.period() * (4.0 / (1.0 - lambda)) *
                           std::log(K * g.n() / eps);
    } else {
      estimate.bound_tau = std::numeric_limits<double>::infinity();
    }
    return estimate;
  }

  // Random matching mode: sample independent schedules and report the
  // (1 - 1/n)-quantile of their smoothing times.
  if (replicas < 1) throw std::invalid_argument("random mode needs replicas >= 1");
  std::vector<int> taus, probe_taus;
  bool capped = false;
  for (int r = 0; r < replicas; ++r) {
    MatchingSchedule replica =
        MatchingSchedule::random(derive_replica_seed(schedule.seed(), static_cast<std::uint64_t>(r)));
    SinglePass pass = measure_single(g, replica, K, eps, t_cap);
    if (pass.tau < 0 || pass.probe_tau < 0) {
      capped = true;
      continue;
    }
    taus.push_back(pass.tau);
    probe_taus.push_back(pass.probe_tau);
  }
  estimate.replicas = replicas;
  estimate.capped = capped || taus.empty();
  if (!taus.empty()) {
    std::sort(taus.begin(), taus.end());
    std::sort(probe_taus.begin(), probe_taus.end());
    double q = 1.0 - 1.0 / g.n();
    auto pick = [&](const std::vector<int>& v) {
      int idx = static_cast<int>(std::ceil(q * v.size())) - 1;
      idx = std::clamp(idx, 0, static_cast<int>(v.size()) - 1);
      return v[idx];
    };
    estimate.tau = pick(taus);
    estimate.probe_tau = pick(probe_taus);
  }
  estimate.bound_tau = std::numeric_limits<double>::quiet_NaN();
  return estimate;
}

}  // namespace tokenbal
