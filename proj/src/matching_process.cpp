#include "tokenbal/matching_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tokenbal/dense_matrix.hpp"

namespace tokenbal {

namespace {

inline int parity(std::int64_t s) { return static_cast<int>(((s % 2) + 2) % 2); }

void require_discrete(const LoadState& state) {
  if (!state.is_discrete()) throw std::invalid_argument("operation needs discrete loads");
}

}  // namespace

double RoundingErrorRecord::node_l1() const {
  double acc = 0.0;
  for (auto e2 : node_e2) acc += std::abs(e2) * 0.5;
  return acc;
}

void continuous_round(LoadState& state, const Matching& m) {
  if (state.is_discrete()) throw std::invalid_argument("continuous_round needs continuous loads");
  auto& x = state.mutable_reals();
  for (auto [u, v] : m.pairs()) {
    double avg = 0.5 * (x[u] + x[v]);
    x[u] = avg;
    x[v] = avg;
  }
  ++state.round;
}

OrientationSample draw_orientations(const LoadState& state, const Matching& m,
                                    OrientationStrategy strategy, RngStream& rng) {
  require_discrete(state);
  auto x = state.ints();
  OrientationSample sample;
  sample.phi.reserve(m.size());
  for (auto [u, v] : m.pairs()) {
    std::int8_t phi;
    if (strategy == OrientationStrategy::deterministic)
      phi = (x[u] >= x[v]) ? std::int8_t{1} : std::int8_t{-1};
    else
      phi = rng.next_bool() ? std::int8_t{1} : std::int8_t{-1};
    sample.phi.push_back(phi);
  }
  return sample;
}

RoundingErrorRecord apply_discrete_round(LoadState& state, const Matching& m,
                                         const OrientationSample& phi) {
  require_discrete(state);
  if (phi.phi.size() != m.size()) throw std::invalid_argument("orientation/matching size mismatch");
  auto& x = state.mutable_ints();
  RoundingErrorRecord record;
  record.pair_e2.reserve(m.size());
  record.node_e2.assign(state.n(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto [u, v] = m.pairs()[i];
    std::int64_t s = x[u] + x[v];
    int odd = parity(s);
    std::int8_t e2 = static_cast<std::int8_t>(odd * phi.phi[i]);
    x[u] = floor_div(s + e2, 2);
    x[v] = s - x[u];
    record.pair_e2.push_back(e2);
    record.node_e2[u] += e2;
    record.node_e2[v] -= e2;
  }
  ++state.round;
  return record;
}

TokenState tokens_from_state(const LoadState& state) {
  require_discrete(state);
  TokenState tokens;
  for (int u = 0; u < state.n(); ++u) {
    std::int64_t load = state.ints()[u];
    if (load < 0) throw std::invalid_argument("token tracking needs non-negative loads");
    for (std::int64_t k = 0; k < load; ++k) tokens.location.push_back(u);
  }
  return tokens;
}

void check_token_consistency(const LoadState& state, const TokenState& tokens) {
  std::vector<std::int64_t> counts(state.n(), 0);
  for (int node : tokens.location) {
    if (node < 0 || node >= state.n()) throw std::runtime_error("token at invalid node");
    ++counts[node];
  }
  for (int u = 0; u < state.n(); ++u)
    if (counts[u] != state.ints()[u])
      throw std::runtime_error("token multiset does not match the load vector");
}

void apply_token_round(LoadState& state, TokenState& tokens, const Matching& m,
                       const OrientationSample& phi, RngStream& urn_rng) {
  require_discrete(state);
  if (phi.phi.size() != m.size()) throw std::invalid_argument("orientation/matching size mismatch");
  auto& x = state.mutable_ints();
  std::vector<std::vector<int>> at_node(state.n());
  for (std::size_t i = 0; i < tokens.location.size(); ++i) {
    int node = tokens.location[i];
    if (x[node] < 0) throw std::invalid_argument("token round needs non-negative loads");
    at_node[node].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto [u, v] = m.pairs()[i];
    std::vector<int> pool = at_node[u];
    pool.insert(pool.end(), at_node[v].begin(), at_node[v].end());
    std::int64_t s = x[u] + x[v];
    if (s != static_cast<std::int64_t>(pool.size()))
      throw std::runtime_error("token pool does not match pair load");
    std::int64_t take = floor_div(s + parity(s) * phi.phi[i], 2);
    // Uniform subset of size `take` via a partial shuffle.
    for (std::int64_t k = 0; k < take; ++k) {
      std::size_t j = static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(urn_rng.next_below(pool.size() - k));
      std::swap(pool[k], pool[j]);
    }
    for (std::int64_t k = 0; k < s; ++k) tokens.location[pool[k]] = (k < take) ? u : v;
    x[u] = take;
    x[v] = s - take;
  }
  ++state.round;
}

void canonical_step(CanonicalPathTrace& trace, const LoadState& before, const Matching& m,
                    const OrientationSample& phi) {
  int here = trace.current();
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto [u, v] = m.pairs()[i];
    if (u != here && v != here) continue;
    int other = (u == here) ? v : u;
    int phi_here = (here < other) ? phi.phi[i] : -phi.phi[i];
    auto x = before.ints();
    bool moves = (x[here] >= x[other]) ? (phi_here == -1) : (phi_here == +1);
    trace.position.push_back(moves ? other : here);
    return;
  }
  trace.position.push_back(here);
}

MatchingRun::MatchingRun(const Graph& g, MatchingSchedule schedule, LoadState x0,
                         std::uint64_t seed, MatchingRunOptions options)
    : g_(&g), schedule_(std::move(schedule)), state_(std::move(x0)), seed_(seed),
      options_(options) {
  if (!state_.is_discrete()) throw std::invalid_argument("MatchingRun drives discrete loads");
  if (state_.n() != g.n()) throw std::invalid_argument("load vector size mismatch");
  if (options_.track_tokens) tokens_ = tokens_from_state(state_);
}

void MatchingRun::step() {
  std::int64_t t = state_.round + 1;
  Matching m = schedule_.matching_for_round(*g_, t);
  RngStream rng(seed_, static_cast<std::uint64_t>(t), StreamPurpose::orientation);
  OrientationSample phi = draw_orientations(state_, m, options_.strategy, rng);
  last_matching_ = std::move(m);
  apply(last_matching_, phi);
  last_phi_ = std::move(phi);
}

void MatchingRun::step_with_orientation(const OrientationSample& phi) {
  std::int64_t t = state_.round + 1;
  last_matching_ = schedule_.matching_for_round(*g_, t);
  apply(last_matching_, phi);
  last_phi_ = phi;
}

void MatchingRun::apply(const Matching& m, const OrientationSample& phi) {
  std::int64_t total_before = 0;
  std::vector<std::int64_t> before;
  if (options_.check_invariants) {
    total_before = state_.int_total();
    auto x = state_.ints();
    max_before_ = *std::max_element(x.begin(), x.end());
    min_before_ = *std::min_element(x.begin(), x.end());
    before.assign(x.begin(), x.end());
  }
  if (tokens_) {
    // One arithmetic source of truth: parities decide the error record, the
    // urn partition realizes the same split on individual tokens.
    last_err_.pair_e2.clear();
    last_err_.node_e2.assign(state_.n(), 0);
    auto x = state_.ints();
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto [u, v] = m.pairs()[i];
      std::int8_t e2 = static_cast<std::int8_t>(parity(x[u] + x[v]) * phi.phi[i]);
      last_err_.pair_e2.push_back(e2);
      last_err_.node_e2[u] += e2;
      last_err_.node_e2[v] -= e2;
    }
    RngStream urn(seed_, static_cast<std::uint64_t>(state_.round + 1), StreamPurpose::urn);
    apply_token_round(state_, *tokens_, m, phi, urn);
    if (options_.check_invariants) check_token_consistency(state_, *tokens_);
  } else {
    last_err_ = apply_discrete_round(state_, m, phi);
  }
  if (options_.check_invariants) {
    auto x = state_.ints();
    if (state_.int_total() != total_before) throw std::runtime_error("load sum not conserved");
    if (*std::max_element(x.begin(), x.end()) > max_before_)
      throw std::runtime_error("maximum load increased");
    if (*std::min_element(x.begin(), x.end()) < min_before_)
      throw std::runtime_error("minimum load decreased");
    std::vector<char> matched(state_.n(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto [u, v] = m.pairs()[i];
      matched[u] = matched[v] = 1;
      std::int64_t s = before[u] + before[v];
      if (2 * x[u] != s + last_err_.pair_e2[i] || 2 * x[v] != s - last_err_.pair_e2[i])
        throw std::runtime_error("rounding-error identity violated");
    }
    for (int u = 0; u < state_.n(); ++u)
      if (!matched[u] && x[u] != before[u])
        throw std::runtime_error("unmatched node changed load");
  }
}

MirrorCouplingResult mirror_coupling_run(const Graph& g, const MatchingSchedule& schedule,
                                         std::vector<std::int64_t> x0, std::uint64_t seed,
                                         int rounds, OrientationStrategy strategy) {
  LoadState state = LoadState::discrete(x0);
  std::int64_t alpha = floor_div(state.int_total(), state.n());
  std::vector<std::int64_t> mirror0(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) mirror0[i] = 2 * alpha - x0[i];

  MatchingRunOptions options;
  options.strategy = strategy;
  MatchingRun run(g, schedule, std::move(state), seed, options);
  MatchingRun mirror(g, schedule, LoadState::discrete(std::move(mirror0)), seed, options);

  MirrorCouplingResult result;
  result.rounds = rounds;
  result.identity_held = true;
  for (int t = 0; t < rounds; ++t) {
    run.step();
    OrientationSample negated = run.last_orientation();
    for (auto& p : negated.phi) p = static_cast<std::int8_t>(-p);
    mirror.step_with_orientation(negated);
    auto x = run.state().ints();
    auto y = mirror.state().ints();
    for (int u = 0; u < g.n(); ++u)
      if (y[u] != 2 * alpha - x[u]) result.identity_held = false;
    if (!result.identity_held) break;
  }
  result.final_x.assign(run.state().ints().begin(), run.state().ints().end());
  result.final_mirror.assign(mirror.state().ints().begin(), mirror.state().ints().end());
  return result;
}

DeviationSeries deviation_series(const Graph& g, const MatchingSchedule& schedule,
                                 std::vector<std::int64_t> x0, OrientationStrategy strategy,
                                 std::uint64_t seed, int t_max, bool cross_check) {
  std::vector<double> xi0(x0.begin(), x0.end());
  MatchingRunOptions options;
  options.strategy = strategy;
  MatchingRun run(g, schedule, LoadState::discrete(std::move(x0)), seed, options);
  LoadState cont = LoadState::continuous(std::move(xi0));

  DeviationSeries series;
  series.max_abs.reserve(t_max);
  std::vector<Matching> matchings;
  std::vector<std::vector<std::int8_t>> errors;
  for (int t = 1; t <= t_max; ++t) {
    run.step();
    continuous_round(cont, run.last_matching());
    if (cross_check) {
      matchings.push_back(run.last_matching());
      errors.push_back(run.last_errors().pair_e2);
    }
    double dev = 0.0;
    auto x = run.state().ints();
    auto xi = cont.reals();
    for (int u = 0; u < g.n(); ++u) dev = std::max(dev, std::abs(x[u] - xi[u]));
    series.max_abs.push_back(dev);
  }

  if (cross_check && t_max > 0) {
    // Re-derive x - xi at the final round from the logged per-pair errors and
    // the backward interval products.
    int n = g.n();
    std::vector<double> acc(n, 0.0);
    DenseMatrix window = DenseMatrix::identity(n);
    for (int s = t_max; s >= 1; --s) {
      const Matching& m = matchings[s - 1];
      const auto& e2 = errors[s - 1];
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (e2[i] == 0) continue;
        auto [u, v] = m.pairs()[i];
        double e = 0.5 * e2[i];
        const double* ru = window.row(u);
        const double* rv = window.row(v);
        for (int w = 0; w < n; ++w) acc[w] += e * (ru[w] - rv[w]);
      }
      window.left_apply_matching(m);
    }
    auto x = run.state().ints();
    auto xi = cont.reals();
    double worst = 0.0;
    for (int w = 0; w < n; ++w)
      worst = std::max(worst, std::abs((x[w] - xi[w]) - acc[w]));
    series.cross_check_error = worst;
  }
  return series;
}

}  // namespace tokenbal
