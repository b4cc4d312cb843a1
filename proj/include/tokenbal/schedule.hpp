#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "tokenbal/dense_matrix.hpp"
#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/graph.hpp"
#include "tokenbal/matching.hpp"
#include "tokenbal/rng.hpp"

namespace tokenbal {

enum class ScheduleMode { balancing_circuit, random_matching };

// Source of the per-round matching. Circuit mode applies the coloring's
// classes periodically; random mode runs the two-stage protocol where every
// edge is picked with probability 1/(2*Delta) and survives if no other picked
// edge touches it. Randomness for round t comes from the (seed, t) substream,
// so single rounds replay independently.
class MatchingSchedule {
 public:
  static MatchingSchedule circuit(EdgeColoring coloring);
  static MatchingSchedule random(std::uint64_t seed);

  ScheduleMode mode() const { return mode_; }
  int period() const { return static_cast<int>(coloring_.colors.size()); }
  std::uint64_t seed() const { return seed_; }
  const EdgeColoring& coloring() const { return coloring_; }

  // Pure lookup; rounds are numbered from 1.
  Matching matching_for_round(const Graph& g, std::int64_t t) const;

  // Stateful convenience wrapper around matching_for_round.
  Matching next_matching(const Graph& g);
  std::int64_t round() const { return round_; }
  void reset(std::int64_t round = 0) { round_ = round; }

  std::string descriptor() const;

 private:
  MatchingSchedule() = default;
  ScheduleMode mode_ = ScheduleMode::balancing_circuit;
  EdgeColoring coloring_;
  std::uint64_t seed_ = 0;
  std::int64_t round_ = 0;
};

struct ScheduleParams {
  double p_min = 0.0;  // measured minimum per-edge inclusion frequency
  int d = 0;           // circuit length (0 for random mode)
};

// Empirical per-edge inclusion frequencies over `rounds` samples; random mode only.
ScheduleParams measure_pmin(const MatchingSchedule& s, const Graph& g, int rounds);

struct IntervalMatrix {
  DenseMatrix m;
  std::int64_t t1 = 1;
  std::int64_t t2 = 0;  // t1 > t2 means the identity
};

// Product of the matching matrices in order; empty input gives the identity.
IntervalMatrix interval_matrix(std::span<const Matching> matchings, int n, std::int64_t t1 = 1);

}  // namespace tokenbal
