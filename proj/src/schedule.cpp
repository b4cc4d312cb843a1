#include "tokenbal/schedule.hpp"

#include <sstream>
#include <stdexcept>

namespace tokenbal {

MatchingSchedule MatchingSchedule::circuit(EdgeColoring coloring) {
  if (coloring.colors.empty()) throw std::invalid_argument("circuit needs at least one matching");
  MatchingSchedule s;
  s.mode_ = ScheduleMode::balancing_circuit;
  s.coloring_ = std::move(coloring);
  return s;
}

MatchingSchedule MatchingSchedule::random(std::uint64_t seed) {
  MatchingSchedule s;
  s.mode_ = ScheduleMode::random_matching;
  s.seed_ = seed;
  return s;
}

Matching MatchingSchedule::matching_for_round(const Graph& g, std::int64_t t) const {
  if (t < 1) throw std::invalid_argument("rounds are numbered from 1");
  if (mode_ == ScheduleMode::balancing_circuit) {
    return coloring_.colors[static_cast<std::size_t>((t - 1) % period())];
  }
  // Stage 1: every edge independently with probability 1/(2*Delta).
  // Stage 2: keep the picked edges that touch no other picked edge.
  RngStream rng(seed_, static_cast<std::uint64_t>(t), StreamPurpose::matching);
  const double pick = 1.0 / (2.0 * g.max_degree());
  const auto& edges = g.edge_list();
  std::vector<char> picked(edges.size(), 0);
  std::vector<int> picked_deg(g.n(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (rng.next_unit() < pick) {
      picked[i] = 1;
      ++picked_deg[edges[i].first];
      ++picked_deg[edges[i].second];
    }
  }
  std::vector<std::pair<int, int>> kept;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (picked[i] && picked_deg[u] == 1 && picked_deg[v] == 1) kept.emplace_back(u, v);
  }
  return Matching(std::move(kept));
}

Matching MatchingSchedule::next_matching(const Graph& g) {
  ++round_;
  return matching_for_round(g, round_);
}

std::string MatchingSchedule::descriptor() const {
  std::ostringstream out;
  if (mode_ == ScheduleMode::balancing_circuit)
    out << "circuit(d=" << period() << ")";
  else
    out << "random(seed=" << seed_ << ")";
  return out.str();
}

ScheduleParams measure_pmin(const MatchingSchedule& s, const Graph& g, int rounds) {
  if (s.mode() != ScheduleMode::random_matching)
    throw std::invalid_argument("measure_pmin applies to the random matching mode");
  if (rounds <= 0) throw std::invalid_argument("measure_pmin needs rounds > 0");
  std::vector<std::int64_t> hits(g.edge_list().size(), 0);
  std::vector<int> partner(g.n());
  for (int t = 1; t <= rounds; ++t) {
    Matching m = s.matching_for_round(g, t);
    std::fill(partner.begin(), partner.end(), -1);
    for (auto [u, v] : m.pairs()) {
      partner[u] = v;
      partner[v] = u;
    }
    const auto& edges = g.edge_list();
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (partner[edges[i].first] == edges[i].second) ++hits[i];
  }
  ScheduleParams params;
  params.d = 0;
  double lowest = 1.0;
  for (auto h : hits) lowest = std::min(lowest, static_cast<double>(h) / rounds);
  params.p_min = lowest;
  return params;
}

IntervalMatrix interval_matrix(std::span<const Matching> matchings, int n, std::int64_t t1) {
  IntervalMatrix im;
  im.m = DenseMatrix::identity(n);
  im.t1 = t1;
  im.t2 = t1 + static_cast<std::int64_t>(matchings.size()) - 1;
  for (const auto& m : matchings) im.m.right_apply_matching(m);
  return im;
}

}  // namespace tokenbal
