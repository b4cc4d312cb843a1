#include <doctest.h>

#include <queue>
#include <set>
#include <sstream>

#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/graph.hpp"
#include "tokenbal/spectral.hpp"

using namespace tokenbal;

namespace {

bool bfs_reaches_all(const Graph& g) {
  std::vector<char> seen(g.n(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == g.n();
}

void check_proper_coloring(const Graph& g, const EdgeColoring& coloring) {
  std::set<std::pair<int, int>> covered;
  for (const auto& color : coloring.colors) {
    std::set<int> touched;
    for (auto [u, v] : color.pairs()) {
      CHECK(g.has_edge(u, v));
      CHECK(touched.insert(u).second);
      CHECK(touched.insert(v).second);
      CHECK(covered.insert({u, v}).second);
    }
  }
  CHECK(static_cast<int>(covered.size()) == g.m());
  CHECK(coloring.color_count() <= g.max_degree() + 1);
}

// Smallest proper color count by brute force, for tiny graphs.
int brute_force_chromatic_index(const Graph& g) {
  const auto& edges = g.edge_list();
  int m = g.m();
  for (int colors = 1; colors <= m; ++colors) {
    std::vector<int> assign(m, -1);
    auto conflict = [&](int e, int c) {
      for (int other = 0; other < e; ++other) {
        if (assign[other] != c) continue;
        auto [a, b] = edges[other];
        auto [u, v] = edges[e];
        if (a == u || a == v || b == u || b == v) return true;
      }
      return false;
    };
    std::function<bool(int)> place = [&](int e) {
      if (e == m) return true;
      for (int c = 0; c < colors; ++c) {
        if (conflict(e, c)) continue;
        assign[e] = c;
        if (place(e + 1)) return true;
        assign[e] = -1;
      }
      return false;
    };
    if (place(0)) return colors;
  }
  return m;
}

}  // namespace

TEST_CASE("hypercube(3) structure") {
  Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
  CHECK(g.n() == 8);
  CHECK(g.is_regular());
  CHECK(g.max_degree() == 3);
  CHECK(g.diameter() == 3);
  CHECK(bfs_reaches_all(g));
}

TEST_CASE("torus(2,4) structure") {
  Graph g = build_family({GraphFamily::torus, 0, 2, 4, 0});
  CHECK(g.n() == 16);
  CHECK(g.is_regular());
  CHECK(g.max_degree() == 4);
}

TEST_CASE("path(3) degrees") {
  Graph g = build_family({GraphFamily::path, 3, 0, 0, 0});
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.max_degree() == 2);
  CHECK_FALSE(g.is_regular());
}

TEST_CASE("every family is connected from node 0") {
  std::vector<Graph> graphs;
  graphs.push_back(build_family({GraphFamily::cycle, 7, 0, 0, 0}));
  graphs.push_back(build_family({GraphFamily::torus, 0, 3, 3, 0}));
  graphs.push_back(build_family({GraphFamily::hypercube, 0, 4, 0, 0}));
  graphs.push_back(build_family({GraphFamily::random_regular, 20, 0, 0, 3}, 7));
  graphs.push_back(build_family({GraphFamily::complete, 6, 0, 0, 0}));
  graphs.push_back(build_family({GraphFamily::path, 9, 0, 0, 0}));
  for (const auto& g : graphs) CHECK(bfs_reaches_all(g));
}

TEST_CASE("random_regular rejects infeasible parameters") {
  CHECK_THROWS_AS(build_family({GraphFamily::random_regular, 5, 0, 0, 3}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_family({GraphFamily::random_regular, 4, 0, 0, 4}, 1),
                  std::invalid_argument);
}

TEST_CASE("random_regular is deterministic in the seed") {
  Graph a = build_family({GraphFamily::random_regular, 16, 0, 0, 3}, 42);
  Graph b = build_family({GraphFamily::random_regular, 16, 0, 0, 3}, 42);
  CHECK(a.edge_list() == b.edge_list());
}

TEST_CASE("hypercube coloring is the dimension matchings in index order") {
  Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
  EdgeColoring coloring = edge_coloring(g);
  REQUIRE(coloring.color_count() == 3);
  for (int b = 0; b < 3; ++b) {
    CHECK(coloring.colors[b].size() == 4);  // perfect matchings
    for (auto [u, v] : coloring.colors[b].pairs()) CHECK((u ^ v) == (1 << b));
  }
  check_proper_coloring(g, coloring);
}

TEST_CASE("path(3) coloring uses 2 singleton colors") {
  Graph g = build_family({GraphFamily::path, 3, 0, 0, 0});
  EdgeColoring coloring = edge_coloring(g);
  REQUIRE(coloring.color_count() == 2);
  CHECK(coloring.colors[0].size() == 1);
  CHECK(coloring.colors[1].size() == 1);
  check_proper_coloring(g, coloring);
}

TEST_CASE("cycle(4) coloring matches the brute-force optimum") {
  Graph g = build_family({GraphFamily::cycle, 4, 0, 0, 0});
  EdgeColoring coloring = edge_coloring(g);
  CHECK(coloring.color_count() == brute_force_chromatic_index(g));  // = 2
  CHECK(coloring.color_count() == 2);
  CHECK(coloring.colors[0].size() == 2);
  CHECK(coloring.colors[1].size() == 2);
  check_proper_coloring(g, coloring);
}

TEST_CASE("canonical colorings are proper on assorted families") {
  check_proper_coloring(build_family({GraphFamily::cycle, 9, 0, 0, 0}),
                        edge_coloring(build_family({GraphFamily::cycle, 9, 0, 0, 0})));
  Graph torus = build_family({GraphFamily::torus, 0, 2, 5, 0});
  check_proper_coloring(torus, edge_coloring(torus));
  Graph torus3 = build_family({GraphFamily::torus, 0, 3, 4, 0});
  check_proper_coloring(torus3, edge_coloring(torus3));
  Graph complete_even = build_family({GraphFamily::complete, 8, 0, 0, 0});
  check_proper_coloring(complete_even, edge_coloring(complete_even));
  Graph complete_odd = build_family({GraphFamily::complete, 7, 0, 0, 0});
  check_proper_coloring(complete_odd, edge_coloring(complete_odd));
}

TEST_CASE("general coloring stays within Delta+1 on random regular graphs") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    Graph g = build_family({GraphFamily::random_regular, 24, 0, 0, 5}, seed);
    check_proper_coloring(g, edge_coloring(g));
  }
  for (std::uint64_t seed : {11, 12, 13}) {
    Graph g = build_family({GraphFamily::random_regular, 30, 0, 0, 4}, seed);
    check_proper_coloring(g, edge_coloring_general(g));
  }
}

TEST_CASE("edge list round trip") {
  Graph g = build_family({GraphFamily::torus, 0, 2, 3, 0});
  std::stringstream buffer;
  write_edge_list(g, buffer);
  Graph back = read_edge_list(buffer);
  CHECK(back.n() == g.n());
  CHECK(back.edge_list() == g.edge_list());
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), std::invalid_argument);  // disconnected
}

TEST_CASE("spectral report of tiny round matrices") {
  // Single matched pair: eigenvalues {1, 0}.
  Graph k2 = build_family({GraphFamily::path, 2, 0, 0, 0});
  DenseMatrix round = round_matrix(edge_coloring(k2), 2);
  CHECK(round.at(0, 0) == doctest::Approx(0.5));
  SpectralReport report = spectral(k2, round);
  CHECK(report.lambda_M == doctest::Approx(0.0).epsilon(1e-12));

  // Two alternating matchings on the 4-cycle average everything in one sweep.
  Graph c4 = build_family({GraphFamily::cycle, 4, 0, 0, 0});
  DenseMatrix round4 = round_matrix(edge_coloring(c4), 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(round4.at(r, c) == doctest::Approx(0.25));
  CHECK(spectral(c4, round4).lambda_M == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("hypercube diffusion spectrum") {
  Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
  SpectralReport report = spectral(g, 2.0);
  CHECK(report.lambda2_P == doctest::Approx(1.0 - 1.0 / 3.0).epsilon(1e-12));
  CHECK(report.lambda_P <= 1.0);
  CHECK(report.conductance > 0.0);
  // Cheeger: lambda_2 <= 1 - conductance^2 / 2 for any valid lower bound.
  CHECK(report.lambda2_P <= 1.0 - report.conductance * report.conductance / 2.0 + 1e-9);
}

TEST_CASE("round matrices stay row-stochastic") {
  for (auto spec : {FamilySpec{GraphFamily::cycle, 8, 0, 0, 0},
                    FamilySpec{GraphFamily::torus, 0, 2, 4, 0},
                    FamilySpec{GraphFamily::hypercube, 0, 4, 0, 0}}) {
    Graph g = build_family(spec);
    DenseMatrix round = round_matrix(edge_coloring(g), g.n());
    CHECK(round.max_row_sum_error() <= 1e-12);
    SpectralReport report = spectral(g, round);
    CHECK(report.lambda_M < 1.0);
  }
}

TEST_CASE("non-stochastic input is rejected") {
  Graph k2 = build_family({GraphFamily::path, 2, 0, 0, 0});
  DenseMatrix bad(2);
  bad.at(0, 0) = 0.7;
  bad.at(0, 1) = 0.7;
  bad.at(1, 0) = 0.5;
  bad.at(1, 1) = 0.5;
  CHECK_THROWS_AS(spectral(k2, bad), std::invalid_argument);
}
