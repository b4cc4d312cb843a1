#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tokenbal/matching.hpp"

namespace tokenbal::oracle {

// Exact ground truth by enumerating all protocol randomness on tiny
// instances. Probabilities are exact rationals, so equality and dominance
// between near-equal masses never rest on float rounding.
using Rational = mpq_class;

struct Instance {
  std::string name;
  int n = 0;
  std::vector<std::int64_t> x0;
  std::vector<Matching> rounds;
};

// State-space guard: n <= 5, rounds <= 4, total |load| <= 6. Token checks
// additionally require non-negative loads.
void check_guards(const Instance& inst, bool token_mode);

using LoadVec = std::vector<std::int64_t>;

struct OutcomeDistribution {
  std::map<LoadVec, Rational> mass;

  Rational total() const;
};

enum class EnumMode { rounding_error, token_urn };

// Exact distribution over final load vectors. rounding_error branches on the
// orientation coins; token_urn enumerates every without-replacement partition
// of each pooled pair and projects the placements down to load vectors.
OutcomeDistribution enumerate_protocol(const Instance& inst, EnumMode mode);

Rational total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b);

// Full distribution over token placements (token i -> node), with tokens
// numbered by node order of the start vector.
struct PlacementDistribution {
  int token_count = 0;
  std::vector<int> start;
  std::map<std::vector<int>, Rational> mass;
};

PlacementDistribution enumerate_token_placements(const Instance& inst);

struct NegativeCorrelationResult {
  Rational joint;
  Rational product;
  bool ok = false;  // joint <= product, exact comparison
};

NegativeCorrelationResult check_negative_correlation(const Instance& inst,
                                                     const std::vector<int>& token_set,
                                                     const std::vector<int>& node_set);
// Sweep-friendly variant over a precomputed placement distribution.
NegativeCorrelationResult check_negative_correlation(const PlacementDistribution& placements,
                                                     const Instance& inst,
                                                     const std::vector<int>& token_set,
                                                     const std::vector<int>& node_set);

struct MarginalLawResult {
  Rational enumerated;
  Rational matrix_entry;
  bool equal = false;
};

// P[token ends at node] from enumeration vs. the interval-product entry.
MarginalLawResult check_marginal_law(const Instance& inst, int token, int node);

// Runs both the original and the reflected execution for every assignment of
// orientation bits and verifies the reflection identity at every round.
bool check_mirror_coupling(const Instance& inst);

// Interval product of matching matrices in exact arithmetic.
std::vector<std::vector<Rational>> rational_interval_matrix(std::span<const Matching> matchings,
                                                            int n);

std::vector<Instance> load_manifest(const std::filesystem::path& path);

}  // namespace tokenbal::oracle
