#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tokenbal/diffusion_process.hpp"
#include "tokenbal/graph.hpp"

using namespace tokenbal;

TEST_CASE("continuous diffusion round") {
  SUBCASE("two nodes, gamma 2") {
    Graph g = build_family({GraphFamily::path, 2, 0, 0, 0});
    LoadState s = LoadState::continuous({4.0, 0.0});
    diffusion_continuous_round(s, g, make_diffusion(g, 2.0));
    CHECK(s.reals()[0] == 3.0);
    CHECK(s.reals()[1] == 1.0);
  }
  SUBCASE("constant vectors are fixed points") {
    Graph g = build_family({GraphFamily::cycle, 5, 0, 0, 0});
    LoadState s = LoadState::continuous(std::vector<double>(5, 2.5));
    diffusion_continuous_round(s, g, make_diffusion(g, 2.0));
    for (double v : s.reals()) CHECK(v == 2.5);
  }
  SUBCASE("spike on the 4-cycle") {
    Graph g = build_family({GraphFamily::cycle, 4, 0, 0, 0});
    LoadState s = LoadState::continuous({4.0, 0.0, 0.0, 0.0});
    diffusion_continuous_round(s, g, make_diffusion(g, 2.0));
    CHECK(s.reals()[0] == 2.0);
    CHECK(s.reals()[1] == 1.0);
    CHECK(s.reals()[2] == 0.0);
    CHECK(s.reals()[3] == 1.0);
  }
}

TEST_CASE("vertex-based round") {
  Graph cycle = build_family({GraphFamily::cycle, 6, 0, 0, 0});
  SUBCASE("divisible loads are deterministic") {
    LoadState s = LoadState::discrete({3, 0, 0, 0, 0, 0});
    RngStream rng(1, 1, StreamPurpose::scatter);
    apply_vertex_based_round(s, cycle, rng);
    CHECK(s.ints()[0] == 1);
    CHECK(s.ints()[1] == 1);
    CHECK(s.ints()[5] == 1);
  }
  SUBCASE("leftover goes to exactly one of the d+1 slots") {
    int self = 0, left = 0, right = 0;
    const int reps = 30000;
    for (int r = 0; r < reps; ++r) {
      LoadState s = LoadState::discrete({7, 0, 0, 0, 0, 0});
      RngStream rng(2, r, StreamPurpose::scatter);
      apply_vertex_based_round(s, cycle, rng);
      CHECK(s.int_total() == 7);
      // Two tokens to each slot, one leftover.
      if (s.ints()[0] == 3) ++self;
      if (s.ints()[1] == 3) ++right;
      if (s.ints()[5] == 3) ++left;
      CHECK(s.ints()[0] >= 2);
    }
    CHECK(self + left + right == reps);
    for (int count : {self, left, right})
      CHECK(static_cast<double>(count) / reps == doctest::Approx(1.0 / 3).epsilon(0.05));
  }
  SUBCASE("zero load sends nothing") {
    LoadState s = LoadState::discrete({0, 0, 5, 0, 0, 0});
    RngStream rng(3, 1, StreamPurpose::scatter);
    apply_vertex_based_round(s, cycle, rng);
    CHECK(s.int_total() == 5);
    CHECK(s.ints()[0] + s.ints()[1] >= 0);
  }
  SUBCASE("irregular graphs are rejected") {
    Graph path = build_family({GraphFamily::path, 3, 0, 0, 0});
    LoadState s = LoadState::discrete({1, 1, 1});
    RngStream rng(4, 1, StreamPurpose::scatter);
    CHECK_THROWS_AS(apply_vertex_based_round(s, path, rng), std::invalid_argument);
  }
  SUBCASE("no node goes negative") {
    LoadState s = LoadState::discrete({13, 0, 7, 1, 0, 2});
    for (int t = 1; t <= 50; ++t) {
      RngStream rng(5, t, StreamPurpose::scatter);
      apply_vertex_based_round(s, cycle, rng);
      for (auto v : s.ints()) CHECK(v >= 0);
      CHECK(s.int_total() == 23);
    }
  }
}

TEST_CASE("edge-based rounding errors") {
  Graph g = build_family({GraphFamily::path, 2, 0, 0, 0});
  DiffusionMatrix dm = make_diffusion(g, 2.0);
  SUBCASE("fractional flows round both ways with zero mean") {
    // Loads (1,0): flow into node 0 is -1/2, so node 0 ends at 0 or 1.
    int up = 0;
    const int reps = 40000;
    double mean_err = 0.0;
    for (int r = 0; r < reps; ++r) {
      LoadState s = LoadState::discrete({1, 0});
      RngStream rng(6, r, StreamPurpose::flow);
      EdgeFlowError rec = apply_edge_based_round(s, g, dm, rng);
      CHECK(std::abs(rec.per_edge[0]) < 1.0);
      mean_err += rec.per_edge[0];
      up += (s.ints()[0] == 1);
      CHECK(s.int_total() == 1);
    }
    CHECK(static_cast<double>(up) / reps == doctest::Approx(0.5).epsilon(0.03));
    CHECK(std::abs(mean_err / reps) < 0.01);
  }
  SUBCASE("integral flows carry no randomness") {
    // Loads (4,0): flow into 0 is -2 exactly.
    LoadState s = LoadState::discrete({4, 0});
    RngStream rng(7, 1, StreamPurpose::flow);
    EdgeFlowError rec = apply_edge_based_round(s, g, dm, rng);
    CHECK(rec.per_edge[0] == 0.0);
    CHECK(s.ints()[0] == 2);
    CHECK(s.ints()[1] == 2);
  }
}

TEST_CASE("edge-based single-round mean matches the continuous update") {
  Graph g = build_family({GraphFamily::cycle, 4, 0, 0, 0});
  DiffusionMatrix dm = make_diffusion(g, 2.0);
  std::vector<std::int64_t> x0{5, 1, 0, 2};
  // Continuous target x0 * P.
  LoadState cont = LoadState::continuous({5, 1, 0, 2});
  diffusion_continuous_round(cont, g, dm);
  const int reps = 200000;
  std::vector<double> mean(4, 0.0);
  for (int r = 0; r < reps; ++r) {
    LoadState s = LoadState::discrete(x0);
    RngStream rng(8, r, StreamPurpose::flow);
    apply_edge_based_round(s, g, dm, rng);
    for (int u = 0; u < 4; ++u) mean[u] += static_cast<double>(s.ints()[u]);
  }
  for (int u = 0; u < 4; ++u) {
    mean[u] /= reps;
    // Each node aggregates at most two +/-1 roundings: sd below 2.
    double sigma = 2.0 / std::sqrt(static_cast<double>(reps));
    CHECK(std::abs(mean[u] - cont.reals()[u]) <= 3.5 * sigma);
  }
}

TEST_CASE("diffusion deviation series") {
  SUBCASE("balanced start never deviates") {
    Graph g = build_family({GraphFamily::cycle, 4, 0, 0, 0});
    auto series = diffusion_deviation_series(g, 2.0, DiffusionVariant::edge_based,
                                             {3, 3, 3, 3}, 1, 10);
    for (double d : series.max_abs) CHECK(d == 0.0);
    CHECK(series.identity_error == 0.0);
  }
  SUBCASE("forced half-token deviation on two nodes") {
    Graph g = build_family({GraphFamily::path, 2, 0, 0, 0});
    auto series =
        diffusion_deviation_series(g, 2.0, DiffusionVariant::edge_based, {1, 0}, 3, 1);
    CHECK(series.max_abs[0] == 0.5);
  }
  SUBCASE("error-sum route agrees and round identity is exact") {
    Graph g = build_family({GraphFamily::torus, 0, 2, 3, 0});
    std::vector<std::int64_t> x0{17, 0, 4, 2, 9, 0, 5, 1, 7};
    auto series = diffusion_deviation_series(g, 2.0, DiffusionVariant::edge_based, x0, 21,
                                             60, 20);
    CHECK(series.identity_error <= 1e-12);
    CHECK(series.cross_check_error <= 1e-9);
  }
  SUBCASE("vertex-based runs conserve load and track gamma = 1 + 1/d") {
    Graph g = build_family({GraphFamily::cycle, 8, 0, 0, 0});
    std::vector<std::int64_t> x0{11, 0, 0, 3, 0, 6, 0, 0};
    auto series =
        diffusion_deviation_series(g, -1.0, DiffusionVariant::vertex_based, x0, 9, 40);
    CHECK(series.max_abs.size() == 40);
  }
}
