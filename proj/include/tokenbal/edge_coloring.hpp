#pragma once

#include "tokenbal/graph.hpp"
#include "tokenbal/matching.hpp"

namespace tokenbal {

// A proper edge coloring: every edge in exactly one class, each class a matching.
struct EdgeColoring {
  std::vector<Matching> colors;

  int color_count() const { return static_cast<int>(colors.size()); }
};

// Structured families get canonical colorings (hypercube dimension matchings in
// index order, torus/cycle axis-parity classes, round-robin for complete graphs).
// Everything else goes through a Misra-Gries coloring with at most Delta+1 classes.
EdgeColoring edge_coloring(const Graph& g);

// The general-purpose path; exposed for tests.
EdgeColoring edge_coloring_general(const Graph& g);

}  // namespace tokenbal
