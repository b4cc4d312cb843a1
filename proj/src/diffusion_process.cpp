#include "tokenbal/diffusion_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tokenbal/dense_matrix.hpp"

namespace tokenbal {

DiffusionMatrix make_diffusion(const Graph& g, double gamma) {
  if (gamma < 1.0) throw std::invalid_argument("diffusion needs gamma >= 1");
  return DiffusionMatrix{gamma, g.max_degree()};
}

void diffusion_continuous_round(LoadState& state, const Graph& g, const DiffusionMatrix& dm) {
  if (state.is_discrete())
    throw std::invalid_argument("diffusion_continuous_round needs continuous loads");
  const double off = dm.off_diagonal();
  auto& x = state.mutable_reals();
  std::vector<double> next(x.size());
  for (int u = 0; u < g.n(); ++u) {
    double acc = x[u];
    for (int v : g.neighbors(u)) acc += (x[v] - x[u]) * off;
    next[u] = acc;
  }
  x = std::move(next);
  ++state.round;
}

void apply_vertex_based_round(LoadState& state, const Graph& g, RngStream& rng) {
  if (!state.is_discrete()) throw std::invalid_argument("vertex-based round needs integer loads");
  if (!g.is_regular()) throw std::invalid_argument("vertex-based protocol needs a regular graph");
  const int d = g.max_degree();
  auto& x = state.mutable_ints();
  std::vector<std::int64_t> next(x.size(), 0);
  std::vector<int> slots(d + 1);
  for (int u = 0; u < g.n(); ++u) {
    std::int64_t load = x[u];
    if (load < 0) throw std::invalid_argument("vertex-based protocol needs non-negative loads");
    std::int64_t share = load / (d + 1);
    std::int64_t leftover = load - (d + 1) * share;
    next[u] += share;
    for (int v : g.neighbors(u)) next[v] += share;
    // Leftover tokens go to a uniform subset of {u} + N(u), without replacement.
    slots[0] = u;
    std::copy(g.neighbors(u).begin(), g.neighbors(u).end(), slots.begin() + 1);
    for (std::int64_t k = 0; k < leftover; ++k) {
      std::size_t j = static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(rng.next_below(slots.size() - k));
      std::swap(slots[k], slots[j]);
      next[slots[k]] += 1;
    }
  }
  x = std::move(next);
  ++state.round;
}

double EdgeFlowError::max_abs() const {
  double worst = 0.0;
  for (double e : per_edge) worst = std::max(worst, std::abs(e));
  return worst;
}

EdgeFlowError apply_edge_based_round(LoadState& state, const Graph& g, const DiffusionMatrix& dm,
                                     RngStream& rng) {
  if (!state.is_discrete()) throw std::invalid_argument("edge-based round needs integer loads");
  const double off = dm.off_diagonal();
  auto& x = state.mutable_ints();
  const auto& edges = g.edge_list();
  EdgeFlowError record;
  record.per_edge.resize(edges.size());
  std::vector<std::int64_t> delta(x.size(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    // Flow into u along [u:v] under the continuous rule, rounded up with
    // probability equal to its fractional part; integral flows stay exact.
    double flow = (static_cast<double>(x[v]) - static_cast<double>(x[u])) * off;
    double lo = std::floor(flow);
    double frac = flow - lo;
    std::int64_t sent = static_cast<std::int64_t>(lo);
    if (frac != 0.0 && rng.next_unit() < frac) sent += 1;
    record.per_edge[i] = static_cast<double>(sent) - flow;
    delta[u] += sent;
    delta[v] -= sent;
  }
  for (std::size_t u = 0; u < x.size(); ++u) x[u] += delta[u];
  ++state.round;
  return record;
}

DiffusionDeviationSeries diffusion_deviation_series(const Graph& g, double gamma,
                                                    DiffusionVariant variant,
                                                    std::vector<std::int64_t> x0,
                                                    std::uint64_t seed, int t_max,
                                                    int check_stride) {
  if (variant == DiffusionVariant::vertex_based) gamma = 1.0 + 1.0 / g.max_degree();
  DiffusionMatrix dm = make_diffusion(g, gamma);
  std::vector<double> xi0(x0.begin(), x0.end());
  LoadState disc = LoadState::discrete(std::move(x0));
  LoadState cont = LoadState::continuous(std::move(xi0));
  const double off = dm.off_diagonal();
  const auto& edges = g.edge_list();
  const int n = g.n();
  const bool logging = check_stride > 0 && variant == DiffusionVariant::edge_based;

  DiffusionDeviationSeries series;
  series.max_abs.reserve(t_max);
  std::vector<std::vector<double>> error_history;          // per round, per edge
  std::vector<std::pair<int, std::vector<double>>> checks;  // (t, x(t) - xi(t))

  for (int t = 1; t <= t_max; ++t) {
    std::vector<std::int64_t> before(disc.ints().begin(), disc.ints().end());
    EdgeFlowError err;
    if (variant == DiffusionVariant::edge_based) {
      RngStream rng(seed, static_cast<std::uint64_t>(t), StreamPurpose::flow);
      err = apply_edge_based_round(disc, g, dm, rng);
    } else {
      RngStream rng(seed, static_cast<std::uint64_t>(t), StreamPurpose::scatter);
      apply_vertex_based_round(disc, g, rng);
    }
    diffusion_continuous_round(cont, g, dm);

    if (variant == DiffusionVariant::edge_based) {
      // Round identity x' = x P + e, entrywise.
      std::vector<double> e_node(n, 0.0);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        e_node[edges[i].first] += err.per_edge[i];
        e_node[edges[i].second] -= err.per_edge[i];
      }
      auto x = disc.ints();
      for (int u = 0; u < n; ++u) {
        double xp = before[u];
        for (int v : g.neighbors(u)) xp += (before[v] - before[u]) * off;
        series.identity_error =
            std::max(series.identity_error, std::abs(x[u] - (xp + e_node[u])));
      }
    }

    double dev = 0.0;
    auto x = disc.ints();
    auto xi = cont.reals();
    std::vector<double> deviation(n);
    for (int u = 0; u < n; ++u) {
      deviation[u] = x[u] - xi[u];
      dev = std::max(dev, std::abs(deviation[u]));
    }
    series.max_abs.push_back(dev);

    if (logging) {
      error_history.push_back(std::move(err.per_edge));
      if (t % check_stride == 0 || t == t_max) checks.emplace_back(t, std::move(deviation));
    }
  }

  // Cross-check: x(t) - xi(t) equals the error history pushed through the
  // powers of P, evaluated per node at every checked round.
  for (const auto& [t, deviation] : checks) {
    std::vector<double> acc(n, 0.0);
    DenseMatrix power = DenseMatrix::identity(n);  // holds P^(t-s) while s descends
    for (int s = t; s >= 1; --s) {
      const auto& errs = error_history[s - 1];
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (errs[i] == 0.0) continue;
        auto [u, v] = edges[i];
        const double* ru = power.row(u);
        const double* rv = power.row(v);
        for (int w = 0; w < n; ++w) acc[w] += errs[i] * (ru[w] - rv[w]);
      }
      if (s > 1) {
        DenseMatrix next(n);
        for (int u = 0; u < n; ++u) {
          const double diag = 1.0 - g.degree(u) * off;
          double* out = next.row(u);
          const double* self = power.row(u);
          for (int w = 0; w < n; ++w) out[w] = diag * self[w];
          for (int v : g.neighbors(u)) {
            const double* rv = power.row(v);
            for (int w = 0; w < n; ++w) out[w] += off * rv[w];
          }
        }
        power = std::move(next);
      }
    }
    for (int w = 0; w < n; ++w)
      series.cross_check_error =
          std::max(series.cross_check_error, std::abs(deviation[w] - acc[w]));
  }
  return series;
}

}  // namespace tokenbal
