#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tokenbal {

enum class GraphFamily { general, cycle, torus, hypercube, random_regular, complete, path };

struct FamilySpec {
  GraphFamily family = GraphFamily::general;
  int n = 0;       // cycle, complete, path, random_regular
  int dim = 0;     // hypercube dimension, torus dimension r
  int side = 0;    // torus side length
  int degree = 0;  // random_regular degree

  std::string to_string() const;
  static FamilySpec parse(const std::string& name, int n, int dim, int side, int degree);
};

class Graph {
 public:
  Graph() = default;

  static Graph from_edges(int n, std::vector<std::pair<int, int>> edges,
                          GraphFamily family = GraphFamily::general);

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<int>& neighbors(int u) const { return adj_[u]; }
  int degree(int u) const { return static_cast<int>(adj_[u].size()); }
  int max_degree() const { return max_degree_; }
  bool is_regular() const { return is_regular_; }
  bool has_edge(int u, int v) const;

  // Edges as (u, v) with u < v, sorted.
  const std::vector<std::pair<int, int>>& edge_list() const { return edges_; }

  // Computed on first use.
  int diameter() const;

  GraphFamily family() const { return family_; }
  const FamilySpec& family_spec() const { return spec_; }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<std::pair<int, int>> edges_;
  int max_degree_ = 0;
  bool is_regular_ = true;
  GraphFamily family_ = GraphFamily::general;
  FamilySpec spec_;
  mutable std::optional<int> diameter_;

  friend Graph build_family(const FamilySpec&, std::uint64_t);
};

// Deterministic given the seed; the seed matters only for random_regular.
Graph build_family(const FamilySpec& spec, std::uint64_t seed = 0);

// Edge-list text format: first line "n m", then m lines "u v" (0-based).
Graph read_edge_list(std::istream& in);
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list_file(const std::string& path);

}  // namespace tokenbal
