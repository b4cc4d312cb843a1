#include <doctest.h>

#include <set>

#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/schedule.hpp"

using namespace tokenbal;

namespace {

Graph k2() { return build_family({GraphFamily::path, 2, 0, 0, 0}); }
Graph path3() { return build_family({GraphFamily::path, 3, 0, 0, 0}); }

void check_valid_matching(const Graph& g, const Matching& m) {
  std::set<int> touched;
  for (auto [u, v] : m.pairs()) {
    CHECK(g.has_edge(u, v));
    CHECK(touched.insert(u).second);
    CHECK(touched.insert(v).second);
  }
}

}  // namespace

TEST_CASE("circuit periodicity on the hypercube") {
  Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
  MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
  CHECK(s.period() == 3);
  // Round 4 wraps to the first dimension matching.
  Matching round4 = s.matching_for_round(g, 4);
  Matching round1 = s.matching_for_round(g, 1);
  CHECK(round4.pairs() == round1.pairs());
  for (auto [u, v] : round4.pairs()) CHECK((u ^ v) == 1);
}

TEST_CASE("random matching on a single edge keeps it half the time") {
  Graph g = k2();
  MatchingSchedule s = MatchingSchedule::random(123);
  ScheduleParams params = measure_pmin(s, g, 10000);
  CHECK(params.p_min == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("random matching stage-1 conflicts on path(3)") {
  // Either edge survives only when picked alone: p = (1/4) * (3/4) = 3/16.
  Graph g = path3();
  MatchingSchedule s = MatchingSchedule::random(99);
  const int rounds = 100000;
  ScheduleParams params = measure_pmin(s, g, rounds);
  double expect = 3.0 / 16.0;
  double sigma = std::sqrt(expect * (1 - expect) / rounds);
  CHECK(params.p_min >= expect - 4 * sigma);
  CHECK(params.p_min <= expect + 4 * sigma);
}

TEST_CASE("cycle(4) random matchings treat all edges alike") {
  Graph g = build_family({GraphFamily::cycle, 4, 0, 0, 0});
  MatchingSchedule s = MatchingSchedule::random(5);
  const int rounds = 50000;
  std::vector<int> hits(g.m(), 0);
  for (int t = 1; t <= rounds; ++t) {
    Matching m = s.matching_for_round(g, t);
    check_valid_matching(g, m);
    for (auto [u, v] : m.pairs())
      for (int i = 0; i < g.m(); ++i)
        if (g.edge_list()[i] == std::make_pair(u, v)) ++hits[i];
  }
  double lo = *std::min_element(hits.begin(), hits.end());
  double hi = *std::max_element(hits.begin(), hits.end());
  CHECK((hi - lo) / rounds < 0.02);
}

TEST_CASE("measure_pmin rejects circuit schedules") {
  Graph g = k2();
  MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
  CHECK_THROWS_AS(measure_pmin(s, g, 10), std::invalid_argument);
}

TEST_CASE("single rounds replay independently of consumption order") {
  Graph g = build_family({GraphFamily::random_regular, 16, 0, 0, 4}, 3);
  MatchingSchedule s = MatchingSchedule::random(777);
  std::vector<Matching> forward;
  for (int t = 1; t <= 10; ++t) forward.push_back(s.matching_for_round(g, t));
  // Replaying round 7 in isolation reproduces it.
  CHECK(s.matching_for_round(g, 7).pairs() == forward[6].pairs());
  // A stateful walk agrees with the pure lookups.
  MatchingSchedule walker = MatchingSchedule::random(777);
  for (int t = 1; t <= 10; ++t)
    CHECK(walker.next_matching(g).pairs() == forward[t - 1].pairs());
}

TEST_CASE("interval matrix basics") {
  SUBCASE("empty product is the identity") {
    IntervalMatrix im = interval_matrix({}, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(im.m.at(r, c) == (r == c ? 1.0 : 0.0));
    CHECK(im.t1 > im.t2);
  }
  SUBCASE("one matched round on two nodes averages them") {
    std::vector<Matching> ms{Matching({{0, 1}})};
    IntervalMatrix im = interval_matrix(ms, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK(im.m.at(r, c) == 0.5);
  }
  SUBCASE("repeating the averaging is idempotent") {
    std::vector<Matching> ms{Matching({{0, 1}}), Matching({{0, 1}})};
    IntervalMatrix im = interval_matrix(ms, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK(im.m.at(r, c) == 0.5);
  }
}

TEST_CASE("interval matrices are doubly stochastic") {
  Graph g = build_family({GraphFamily::random_regular, 12, 0, 0, 3}, 9);
  MatchingSchedule s = MatchingSchedule::random(31);
  std::vector<Matching> ms;
  for (int t = 1; t <= 24; ++t) {
    Matching m = s.matching_for_round(g, t);
    check_valid_matching(g, m);
    ms.push_back(m);
  }
  IntervalMatrix im = interval_matrix(ms, g.n());
  CHECK(im.m.max_row_sum_error() <= 1e-12);
  // Column sums via the transpose trick: interval products of matching
  // matrices are doubly stochastic.
  for (int c = 0; c < g.n(); ++c) {
    double s_col = 0.0;
    for (int r = 0; r < g.n(); ++r) s_col += im.m.at(r, c);
    CHECK(s_col == doctest::Approx(1.0).epsilon(1e-12));
  }
}
