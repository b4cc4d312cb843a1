#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tokenbal/graph.hpp"
#include "tokenbal/load_state.hpp"
#include "tokenbal/matching.hpp"
#include "tokenbal/rng.hpp"
#include "tokenbal/schedule.hpp"

namespace tokenbal {

enum class OrientationStrategy { random, deterministic };

// One +/-1 sign per matched pair, aligned with Matching::pairs() order.
// phi = +1 sends the excess token (if any) to the smaller-indexed endpoint.
struct OrientationSample {
  std::vector<std::int8_t> phi;
};

// Per-pair and per-node rounding errors, stored doubled so they stay integral.
struct RoundingErrorRecord {
  std::vector<std::int8_t> pair_e2;   // 2*e_{u,v} in {-1, 0, +1}, pair order
  std::vector<std::int32_t> node_e2;  // 2*e_u, size n

  double node_l1() const;
};

// Matched pairs average perfectly; everyone else keeps their load.
void continuous_round(LoadState& state, const Matching& m);

// Draws the orientation for each pair in sorted pair order. The deterministic
// strategy points the excess toward the larger load and consumes no randomness.
OrientationSample draw_orientations(const LoadState& state, const Matching& m,
                                    OrientationStrategy strategy, RngStream& rng);

// Matched pair (u,v): u receives ceil((x_u+x_v)/2) when phi=+1, floor when
// phi=-1, v the rest. Advances the round counter and returns the error record;
// the identity x' = x M + e holds entrywise exactly.
RoundingErrorRecord apply_discrete_round(LoadState& state, const Matching& m,
                                         const OrientationSample& phi);

// Opt-in token tracking for the urn formulation; requires non-negative loads.
struct TokenState {
  std::vector<std::int32_t> location;  // node of token i
};

TokenState tokens_from_state(const LoadState& state);
// Throws if the token multiset does not match the load vector.
void check_token_consistency(const LoadState& state, const TokenState& tokens);

// Matched pairs pool their tokens and redraw them uniformly without
// replacement with ceil/floor shares decided by phi. The induced load vector
// has the same law as apply_discrete_round.
void apply_token_round(LoadState& state, TokenState& tokens, const Matching& m,
                       const OrientationSample& phi, RngStream& urn_rng);

// Per-node trajectory driven by loads and orientations; moves only across
// matching edges, by the rule that minimizes the load change along the path.
struct CanonicalPathTrace {
  int origin = 0;
  std::vector<int> position;  // position[k] = node after k rounds

  int current() const { return position.empty() ? origin : position.back(); }
};

void canonical_step(CanonicalPathTrace& trace, const LoadState& before,
                    const Matching& m, const OrientationSample& phi);

// Single-run driver: schedule round t feeds substream (seed, t, ...) so runs
// replay bit-exactly from (seed, schedule descriptor, x0).
struct MatchingRunOptions {
  OrientationStrategy strategy = OrientationStrategy::random;
  bool track_tokens = false;
  bool check_invariants = false;
};

class MatchingRun {
 public:
  MatchingRun(const Graph& g, MatchingSchedule schedule, LoadState x0,
              std::uint64_t seed, MatchingRunOptions options = {});

  void step();
  // Applies a caller-supplied orientation (coupling runs, exhaustive checks).
  void step_with_orientation(const OrientationSample& phi);

  const LoadState& state() const { return state_; }
  const Graph& graph() const { return *g_; }
  const Matching& last_matching() const { return last_matching_; }
  const OrientationSample& last_orientation() const { return last_phi_; }
  const RoundingErrorRecord& last_errors() const { return last_err_; }
  const TokenState* tokens() const { return tokens_ ? &*tokens_ : nullptr; }
  std::uint64_t seed() const { return seed_; }

 private:
  void apply(const Matching& m, const OrientationSample& phi);

  const Graph* g_;
  MatchingSchedule schedule_;
  LoadState state_;
  std::optional<TokenState> tokens_;
  std::uint64_t seed_;
  MatchingRunOptions options_;
  Matching last_matching_;
  OrientationSample last_phi_;
  RoundingErrorRecord last_err_;
  std::int64_t max_before_ = 0;
  std::int64_t min_before_ = 0;
};

// Runs x from x0 and the reflected vector 2*floor(mean) - x0 with identical
// matchings and negated orientations; verifies the reflection identity holds
// after every round.
struct MirrorCouplingResult {
  bool identity_held = false;
  int rounds = 0;
  std::vector<std::int64_t> final_x;
  std::vector<std::int64_t> final_mirror;
};

MirrorCouplingResult mirror_coupling_run(const Graph& g, const MatchingSchedule& schedule,
                                         std::vector<std::int64_t> x0, std::uint64_t seed,
                                         int rounds,
                                         OrientationStrategy strategy = OrientationStrategy::random);

// Discrete and continuous processes advanced in lockstep on one matching
// sequence; reports per-round max_w |x_w - xi_w|. When cross_check is set the
// final deviation is re-derived from the logged rounding errors and interval
// products, and the max discrepancy between the two routes is reported.
struct DeviationSeries {
  std::vector<double> max_abs;  // index t-1
  double cross_check_error = 0.0;
};

DeviationSeries deviation_series(const Graph& g, const MatchingSchedule& schedule,
                                 std::vector<std::int64_t> x0, OrientationStrategy strategy,
                                 std::uint64_t seed, int t_max, bool cross_check = false);

}  // namespace tokenbal
