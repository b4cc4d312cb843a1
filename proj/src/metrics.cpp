#include "tokenbal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tokenbal {

double discrepancy(std::span<const double> loads) {
  if (loads.empty()) throw std::invalid_argument("discrepancy of an empty vector");
  auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
  return *hi - *lo;
}

double discrepancy(std::span<const std::int64_t> loads) {
  if (loads.empty()) throw std::invalid_argument("discrepancy of an empty vector");
  auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
  return static_cast<double>(*hi - *lo);
}

double discrepancy(const LoadState& state) {
  return state.is_discrete() ? discrepancy(state.ints()) : discrepancy(state.reals());
}

PotentialReport potentials(const LoadState& state, double lambda_epsilon) {
  PotentialReport report;
  report.lambda_epsilon = lambda_epsilon;
  const int n = state.n();
  const double mean = state.mean();
  report.exp_coefficient = 0.125 * std::pow(std::log(static_cast<double>(n)), 1.0 - lambda_epsilon);
  if (state.is_discrete()) {
    double quad = 0.0, poly = 0.0, expo = 0.0;
    for (std::int64_t x : state.ints()) {
      double dev = static_cast<double>(x) - mean;
      quad += dev * dev;
      if (x >= 11) poly += std::pow(static_cast<double>(x), 8.0);
      if (x >= 2) expo += std::exp(report.exp_coefficient * static_cast<double>(x));
    }
    report.quadratic = quad;
    report.polynomial = poly;
    report.exponential = expo;
  } else {
    double quad = 0.0;
    for (double x : state.reals()) quad += (x - mean) * (x - mean);
    report.quadratic = quad;
    report.polynomial = std::numeric_limits<double>::quiet_NaN();
    report.exponential = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

DiagnosticsReport diagnostics(const LoadState& state, const Graph& g, const DenseMatrix& window,
                              const DiagnosticsParams& params) {
  if (!state.is_discrete()) throw std::invalid_argument("diagnostics need discrete loads");
  if (window.n() != g.n()) throw std::invalid_argument("window size mismatch");
  const int n = g.n();
  auto x = state.ints();
  const double logn = std::log(static_cast<double>(n));

  DiagnosticsReport report;
  report.row_norm_threshold = std::pow(logn, -params.eps_t / 7.0);

  // Expected load at each node after pushing the vector through the window.
  std::vector<double> smeared(n, 0.0);
  for (int w = 0; w < n; ++w) {
    const double* rw = window.row(w);
    double acc = 0.0;
    for (int v = 0; v < n; ++v) acc += static_cast<double>(x[v]) * rw[v];
    smeared[w] = acc;
  }

  for (int u = 0; u < n; ++u) {
    if (x[u] >= params.high_load_threshold) report.s1.push_back(u);
    const double* ru = window.row(u);
    double norm2 = 0.0;
    double expected = 0.0;
    for (int w = 0; w < n; ++w) {
      norm2 += ru[w] * ru[w];
      expected += ru[w] * smeared[w];
    }
    bool in_s2 = norm2 <= report.row_norm_threshold;
    bool in_s3 = expected >= params.expected_load_threshold;
    if (in_s2) report.s2.push_back(u);
    if (in_s3) report.s3.push_back(u);
    if (in_s2 && in_s3) report.bad.push_back(u);
  }

  // Ball loads via truncated BFS.
  report.ball_load.assign(n, 0);
  std::vector<int> dist(n);
  for (int u = 0; u < n; ++u) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    q.push(u);
    dist[u] = 0;
    std::int64_t acc = x[u];
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      if (dist[a] >= params.radius) continue;
      for (int b : g.neighbors(a)) {
        if (dist[b] >= 0) continue;
        dist[b] = dist[a] + 1;
        acc += x[b];
        q.push(b);
      }
    }
    report.ball_load[u] = acc;
  }

  const double ball_budget = 16.0 * std::pow(logn, params.eps);
  report.ball_event = std::all_of(report.ball_load.begin(), report.ball_load.end(),
                                  [&](std::int64_t b) { return b <= ball_budget; });
  report.neighborhood_event = true;
  for (int u = 0; u < n; ++u) {
    std::int64_t acc = 0;
    for (int v : g.neighbors(u)) acc += x[v];
    if (acc > g.degree(u) / 2.0) report.neighborhood_event = false;
  }
  return report;
}

EventFlags load_events(const LoadState& state, const Graph& g, int radius, double eps) {
  if (!state.is_discrete()) throw std::invalid_argument("load events need discrete loads");
  const int n = g.n();
  auto x = state.ints();
  EventFlags flags;
  const double ball_budget = 16.0 * std::pow(std::log(static_cast<double>(n)), eps);
  flags.ball_event = true;
  std::vector<int> dist(n);
  for (int u = 0; u < n && flags.ball_event; ++u) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    q.push(u);
    dist[u] = 0;
    std::int64_t acc = x[u];
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      if (dist[a] >= radius) continue;
      for (int b : g.neighbors(a)) {
        if (dist[b] >= 0) continue;
        dist[b] = dist[a] + 1;
        acc += x[b];
        q.push(b);
      }
    }
    if (acc > ball_budget) flags.ball_event = false;
  }
  flags.neighborhood_event = true;
  for (int u = 0; u < n; ++u) {
    std::int64_t acc = 0;
    for (int v : g.neighbors(u)) acc += x[v];
    if (acc > g.degree(u) / 2.0) flags.neighborhood_event = false;
  }
  return flags;
}

bool e_ell_membership(const LoadState& state, int ell, double eps) {
  if (!state.is_discrete()) throw std::invalid_argument("membership needs discrete loads");
  if (ell < 1) throw std::invalid_argument("membership needs ell >= 1");
  const double mean = state.mean();
  if (mean < 0.0 || mean >= 1.0)
    throw std::invalid_argument("membership expects the mean normalized into [0,1)");
  const int n = state.n();
  const double logn = std::log(static_cast<double>(n));
  const double threshold =
      8.0 * ell * std::ceil(std::pow(logn, eps)) + static_cast<double>(ell);
  double excess = 0.0;
  for (std::int64_t x : state.ints())
    excess += std::max(0.0, static_cast<double>(x) - threshold);
  const double budget = 4.0 * n * std::exp(-0.25 * std::pow(logn, ell * eps));
  return excess <= budget;
}

}  // namespace tokenbal
