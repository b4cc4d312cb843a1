#include "tokenbal/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tokenbal/dense_matrix.hpp"
#include "tokenbal/spectral.hpp"

namespace tokenbal {

namespace {

inline double power_term(double diff, int p) {
  double a = std::abs(diff);
  if (p == 1) return a;
  if (p == 2) return a * a;
  return std::pow(a, p);
}

// D_p(w, t) for all w at one prefix length t: backward pass over the interval
// products starting from the identity.
void prefix_divergence(std::span<const Matching> schedule, int n, int p, int t,
                       std::vector<double>& acc) {
  acc.assign(n, 0.0);
  DenseMatrix window = DenseMatrix::identity(n);
  for (int s = t; s >= 1; --s) {
    const Matching& m = schedule[s - 1];
    for (auto [u, v] : m.pairs()) {
      for (int w = 0; w < n; ++w) {
        double diff = window.at(w, u) - window.at(w, v);
        acc[w] += power_term(diff, p);
      }
    }
    window.left_apply_matching(m);
  }
}

}  // namespace

DivergenceReport psi_p_matching(std::span<const Matching> schedule, int n, int p,
                                std::optional<int> node) {
  if (n < 1) throw std::invalid_argument("divergence needs n >= 1");
  if (p < 1) throw std::invalid_argument("divergence needs p >= 1");
  const int horizon = static_cast<int>(schedule.size());

  DivergenceReport report;
  report.p = p;
  report.model = DivergenceModel::matching;
  report.truncation = horizon;

  std::vector<double> best(n, 0.0);
  std::vector<int> best_t(n, 0);
  std::vector<double> acc;
  for (int t = 1; t <= horizon; ++t) {
    prefix_divergence(schedule, n, p, t, acc);
    for (int w = 0; w < n; ++w) {
      if (acc[w] > best[w]) {
        best[w] = acc[w];
        best_t[w] = t;
      }
    }
  }

  int w_lo = node ? *node : 0;
  int w_hi = node ? *node + 1 : n;
  double top = 0.0;
  int witness = w_lo;
  for (int w = w_lo; w < w_hi; ++w) {
    if (best[w] >= top) {
      top = best[w];
      witness = w;
    }
  }
  report.psi_p = std::pow(top, 1.0 / p);
  report.witness_node = witness;
  report.achieving_t = best_t[witness];

  // Quadratic certificate for the rounds after the attained prefix: twice the
  // remaining window's row potential bounds any further contribution of
  // rounds 1..t* at larger horizons.
  std::vector<Matching> tail(schedule.begin() + report.achieving_t, schedule.end());
  DenseMatrix rest = DenseMatrix::identity(n);
  for (const auto& m : tail) rest.left_apply_matching(m);
  double cert = 0.0;
  for (int u = 0; u < n; ++u) {
    double d = rest.at(witness, u) - 1.0 / n;
    cert += d * d;
  }
  report.tail_certificate = 2.0 * cert;
  return report;
}

double telescoping_identity_error(std::span<const Matching> schedule, int n) {
  const int horizon = static_cast<int>(schedule.size());
  DenseMatrix window = DenseMatrix::identity(n);
  std::vector<double> pot_cur(n), pot_next(n), contribution(n);
  auto row_potential = [&](std::vector<double>& out) {
    for (int w = 0; w < n; ++w) {
      double acc = 0.0;
      const double* rw = window.row(w);
      for (int u = 0; u < n; ++u) {
        double d = rw[u] - 1.0 / n;
        acc += d * d;
      }
      out[w] = acc;
    }
  };

  double worst = 0.0;
  row_potential(pot_cur);
  for (int s = horizon; s >= 1; --s) {
    const Matching& m = schedule[s - 1];
    std::fill(contribution.begin(), contribution.end(), 0.0);
    for (auto [u, v] : m.pairs()) {
      for (int w = 0; w < n; ++w) {
        double diff = window.at(w, u) - window.at(w, v);
        contribution[w] += 0.5 * diff * diff;
      }
    }
    window.left_apply_matching(m);
    row_potential(pot_next);
    for (int w = 0; w < n; ++w)
      worst = std::max(worst, std::abs(contribution[w] - (pot_cur[w] - pot_next[w])));
    std::swap(pot_cur, pot_next);
  }
  return worst;
}

double prefix_tail_bound_violation(std::span<const Matching> schedule, int n, int t1) {
  const int horizon = static_cast<int>(schedule.size());
  if (t1 < 0 || t1 > horizon) throw std::invalid_argument("prefix cut out of range");
  DenseMatrix window = DenseMatrix::identity(n);
  std::vector<double> lhs(n, 0.0), rhs(n, 0.0);
  for (int s = horizon; s >= 1; --s) {
    if (s == t1) {
      for (int w = 0; w < n; ++w) {
        double acc = 0.0;
        const double* rw = window.row(w);
        for (int u = 0; u < n; ++u) {
          double d = rw[u] - 1.0 / n;
          acc += d * d;
        }
        rhs[w] = 2.0 * acc;
      }
    }
    const Matching& m = schedule[s - 1];
    if (s <= t1) {
      for (auto [u, v] : m.pairs()) {
        for (int w = 0; w < n; ++w) {
          double diff = window.at(w, u) - window.at(w, v);
          lhs[w] += diff * diff;
        }
      }
    }
    window.left_apply_matching(m);
  }
  double worst = -1.0;
  for (int w = 0; w < n; ++w) worst = std::max(worst, lhs[w] - rhs[w]);
  return worst;
}

DivergenceReport psi2_upsilon2_diffusion(const Graph& g, double gamma, int t_cap, double tol) {
  if (gamma <= 0) throw std::invalid_argument("diffusion divergence needs gamma > 0");
  const int n = g.n();
  const double off = 1.0 / (gamma * g.max_degree());

  DivergenceReport report;
  report.p = 2;
  report.model = DivergenceModel::diffusion;

  double lambda = 1.0;
  if (gamma >= 1.0) {
    lambda = spectral(g, gamma).lambda_P;
  }
  int horizon = t_cap;
  bool converged = false;
  if (lambda <= 0.0) {
    horizon = 1;
    converged = true;
  } else if (lambda < 1.0) {
    double t_needed = std::log(tol) / (2.0 * std::log(lambda));
    if (t_needed <= static_cast<double>(t_cap)) {
      horizon = std::max(1, static_cast<int>(std::ceil(t_needed)));
      converged = true;
    }
  }
  report.truncation = horizon;
  report.converged = converged;

  const auto& edges = g.edge_list();
  DenseMatrix power = DenseMatrix::identity(n);
  std::vector<double> psi_acc(n, 0.0), ups_acc(n, 0.0), buf(n);
  for (int t = 0; t <= horizon; ++t) {
    for (int w = 0; w < n; ++w) {
      const double* rw = power.row(w);
      double acc = 0.0;
      for (auto [u, v] : edges) {
        double d = rw[u] - rw[v];
        acc += d * d;
      }
      psi_acc[w] += acc;
      double uacc = 0.0;
      for (int u = 0; u < n; ++u) {
        double worst = 0.0;
        for (int v : g.neighbors(u)) {
          double d = rw[u] - rw[v];
          worst = std::max(worst, d * d);
        }
        uacc += worst;
      }
      ups_acc[w] += uacc;
    }
    if (t == horizon) break;
    // power <- power * P, one row at a time.
    for (int w = 0; w < n; ++w) {
      double* rw = power.row(w);
      for (int u = 0; u < n; ++u) {
        double acc = rw[u] * (1.0 - g.degree(u) * off);
        for (int v : g.neighbors(u)) acc += rw[v] * off;
        buf[u] = acc;
      }
      std::copy(buf.begin(), buf.end(), rw);
    }
  }

  int witness = 0;
  for (int w = 1; w < n; ++w)
    if (psi_acc[w] > psi_acc[witness]) witness = w;
  report.witness_node = witness;
  report.psi_p = std::sqrt(psi_acc[witness]);
  report.upsilon_p = std::sqrt(0.5 * *std::max_element(ups_acc.begin(), ups_acc.end()));
  if (gamma > 1.0 && lambda < 1.0) {
    report.tail_certificate =
        gamma * g.max_degree() / (2.0 - 2.0 / gamma) * std::pow(lambda, 2.0 * (horizon + 1));
  } else {
    report.tail_certificate = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace tokenbal
