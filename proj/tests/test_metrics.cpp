#include <doctest.h>

#include <cmath>

#include "tokenbal/divergence.hpp"
#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/metrics.hpp"
#include "tokenbal/matching_process.hpp"
#include "tokenbal/schedule.hpp"
#include "tokenbal/smoothing.hpp"
#include "tokenbal/spectral.hpp"

using namespace tokenbal;

namespace {

std::vector<Matching> circuit_prefix(const Graph& g, int horizon) {
  MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
  std::vector<Matching> out;
  for (int t = 1; t <= horizon; ++t) out.push_back(s.matching_for_round(g, t));
  return out;
}

}  // namespace

TEST_CASE("discrepancy") {
  CHECK(discrepancy(LoadState::discrete({3, 1, 2})) == 2.0);
  CHECK(discrepancy(LoadState::discrete({5, 5, 5})) == 0.0);
  CHECK(discrepancy(LoadState::discrete({-1, 0, 1})) == 2.0);
  CHECK(discrepancy(LoadState::continuous({0.25, -0.5})) == 0.75);
  CHECK_THROWS_AS(discrepancy(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("matching divergence basics") {
  SUBCASE("empty schedule gives zero") {
    DivergenceReport r = psi_p_matching({}, 4, 2);
    CHECK(r.psi_p == 0.0);
  }
  SUBCASE("a single matched round gives exactly one") {
    std::vector<Matching> ms{Matching({{0, 1}})};
    DivergenceReport r = psi_p_matching(ms, 2, 2);
    CHECK(r.psi_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.achieving_t == 1);
  }
  SUBCASE("hypercube circuit stays within the closed-form bounds") {
    Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
    DivergenceReport r = psi_p_matching(circuit_prefix(g, 30), g.n(), 2);
    CHECK(r.psi_p >= 1.0 - 1e-9);
    CHECK(r.psi_p <= std::sqrt(2.0 - 2.0 / 8.0) + 1e-9);
  }
}

TEST_CASE("telescoping identity and tail bound") {
  Graph g = build_family({GraphFamily::torus, 0, 2, 3, 0});
  auto prefix = circuit_prefix(g, 24);
  CHECK(telescoping_identity_error(prefix, g.n()) <= 1e-12);
  for (int t1 : {1, 5, 12, 23})
    CHECK(prefix_tail_bound_violation(prefix, g.n(), t1) <= 1e-12);
}

TEST_CASE("diffusion divergence bounds") {
  SUBCASE("star graph center gives the degree lower bound") {
    // K_{1,4}: node 0 is the center.
    Graph star = Graph::from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    DivergenceReport r = psi2_upsilon2_diffusion(star, 2.0, 512);
    CHECK(r.psi_p >= std::sqrt(4.0) - 1e-9);
    CHECK(r.psi_p <= std::sqrt(2.0 * 4.0) + 1e-9);
    CHECK(r.upsilon_p >= std::sqrt(5.0 / 2.0) - 1e-9);
    CHECK(r.upsilon_p <= r.psi_p + 1e-12);
  }
  SUBCASE("two nodes, gamma 2, closed form") {
    Graph k2 = build_family({GraphFamily::path, 2, 0, 0, 0});
    DivergenceReport r = psi2_upsilon2_diffusion(k2, 2.0, 512);
    // P is the perfect average: only the t=0 term contributes.
    CHECK(r.psi_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.upsilon_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.converged);
  }
  SUBCASE("cap hit is flagged as a lower bound") {
    Graph cycle = build_family({GraphFamily::cycle, 64, 0, 0, 0});
    DivergenceReport r = psi2_upsilon2_diffusion(cycle, 2.0, 8);
    CHECK_FALSE(r.converged);
    CHECK(r.psi_p >= std::sqrt(2.0) - 1e-9);  // t=0 term alone gives sqrt(Delta)
  }
}

TEST_CASE("smoothing time") {
  SUBCASE("two nodes smooth in one round") {
    Graph g = build_family({GraphFamily::path, 2, 0, 0, 0});
    MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
    SmoothingEstimate est = smoothing_time(g, s, 100.0, 0.5, 100);
    CHECK(est.tau == 1);
    CHECK(est.probe_tau == 1);
  }
  SUBCASE("hypercube reaches exact uniformity after d rounds") {
    Graph g = build_family({GraphFamily::hypercube, 0, 3, 0, 0});
    MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
    SmoothingEstimate est = smoothing_time(g, s, 8.0, 0.0, 100);
    CHECK(est.tau == 3);
    CHECK(est.probe_tau == 3);
  }
  SUBCASE("analytic circuit bound holds") {
    Graph g = build_family({GraphFamily::torus, 0, 2, 4, 0});
    MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
    SmoothingEstimate est = smoothing_time(g, s, g.n(), 1.0, 100000);
    CHECK(est.tau >= 1);
    CHECK(est.probe_tau <= est.tau);
    CHECK(static_cast<double>(est.tau) <= est.bound_tau);
  }
  SUBCASE("random mode reports a quantile") {
    Graph g = build_family({GraphFamily::cycle, 8, 0, 0, 0});
    MatchingSchedule s = MatchingSchedule::random(17);
    SmoothingEstimate est = smoothing_time(g, s, 8.0, 1.0, 20000, 12);
    CHECK(est.tau >= 1);
    CHECK(est.replicas == 12);
  }
}

TEST_CASE("potentials") {
  SUBCASE("below the polynomial threshold") {
    PotentialReport r = potentials(LoadState::discrete({10, 10, 3}));
    CHECK(r.polynomial == 0.0);
  }
  SUBCASE("one node at the threshold") {
    PotentialReport r = potentials(LoadState::discrete({11, 0, 0}));
    CHECK(r.polynomial == doctest::Approx(214358881.0));
  }
  SUBCASE("constant vectors have zero quadratic potential") {
    PotentialReport r = potentials(LoadState::discrete({4, 4, 4, 4}));
    CHECK(r.quadratic == 0.0);
  }
  SUBCASE("exponential potential counts loads of at least two") {
    PotentialReport r = potentials(LoadState::discrete({2, 1, 0, 0}));
    CHECK(r.exponential == doctest::Approx(std::exp(2.0 * r.exp_coefficient)));
  }
}

TEST_CASE("polynomial potential is non-increasing along discrete trajectories") {
  Graph g = build_family({GraphFamily::cycle, 10, 0, 0, 0});
  MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
  MatchingRunOptions options;
  std::vector<std::int64_t> x0(10, 0);
  x0[0] = 40;
  x0[5] = 25;
  MatchingRun run(g, s, LoadState::discrete(x0), 3, options);
  double prev = potentials(run.state()).polynomial;
  for (int t = 0; t < 120; ++t) {
    run.step();
    double cur = potentials(run.state()).polynomial;
    CHECK(cur <= prev + 1e-9);
    prev = cur;
  }
}

TEST_CASE("exponential potential is non-increasing once the coefficient justifies convexity") {
  // Needs exp(coeff) >= 2, i.e. large n under the default parameter.
  Graph g = build_family({GraphFamily::hypercube, 0, 15, 0, 0});
  PotentialReport probe = potentials(LoadState::discrete(std::vector<std::int64_t>(g.n(), 0)));
  REQUIRE(std::exp(probe.exp_coefficient) >= 2.0);
  MatchingSchedule s = MatchingSchedule::circuit(edge_coloring(g));
  std::vector<std::int64_t> x0(g.n(), 0);
  for (int i = 0; i < 64; ++i) x0[i * 97 % g.n()] = (i % 13) + 2;
  MatchingRun run(g, s, LoadState::discrete(x0), 6, {});
  double prev = potentials(run.state()).exponential;
  for (int t = 0; t < 45; ++t) {
    run.step();
    double cur = potentials(run.state()).exponential;
    CHECK(cur <= prev * (1 + 1e-12) + 1e-9);
    prev = cur;
  }
}

TEST_CASE("diagnostics sets") {
  Graph g = build_family({GraphFamily::path, 3, 0, 0, 0});
  DiagnosticsParams params;
  SUBCASE("uniform zero load") {
    IntervalMatrix window = interval_matrix(circuit_prefix(g, 2), 3);
    DiagnosticsReport r =
        diagnostics(LoadState::discrete({0, 0, 0}), g, window.m, params);
    CHECK(r.s1.empty());
    CHECK(r.s3.empty());
    CHECK(r.bad.empty());
  }
  SUBCASE("identity window fails the expansion bar") {
    DenseMatrix window = DenseMatrix::identity(3);
    DiagnosticsReport r =
        diagnostics(LoadState::discrete({0, 0, 0}), g, window, params);
    CHECK(r.s2.empty());  // row norm 1 > (log n)^(-eps_t/7)
  }
  SUBCASE("high-load membership") {
    DenseMatrix window = DenseMatrix::identity(3);
    DiagnosticsReport r =
        diagnostics(LoadState::discrete({12, 0, 0}), g, window, params);
    REQUIRE(r.s1.size() == 1);
    CHECK(r.s1[0] == 0);
  }
  SUBCASE("bad nodes sit inside both parent sets") {
    Graph h = build_family({GraphFamily::cycle, 5, 0, 0, 0});
    IntervalMatrix window = interval_matrix(circuit_prefix(h, 6), 5);
    DiagnosticsReport r =
        diagnostics(LoadState::discrete({30, 0, 0, 0, 0}), h, window.m, params);
    for (int u : r.bad) {
      CHECK(std::find(r.s2.begin(), r.s2.end(), u) != r.s2.end());
      CHECK(std::find(r.s3.begin(), r.s3.end(), u) != r.s3.end());
    }
  }
}

TEST_CASE("excess family membership") {
  SUBCASE("zero vector belongs to every family") {
    LoadState s = LoadState::discrete(std::vector<std::int64_t>(16, 0));
    for (int ell = 1; ell <= 4; ++ell) CHECK(e_ell_membership(s, ell, 1.0));
  }
  SUBCASE("boundary vector with zero excess") {
    // n = 16, eps = 1: threshold is 8*ceil(log 16) + 1 = 25.
    std::vector<std::int64_t> x(16, 0);
    x[3] = 25;
    x[0] = -9;  // keep the mean in [0,1)
    LoadState s = LoadState::discrete(x);
    CHECK(e_ell_membership(s, 1, 1.0));
  }
  SUBCASE("massive excess fails") {
    std::vector<std::int64_t> x(16, 0);
    x[0] = 26 * 16;
    x[1] = -26 * 16 + 1;
    LoadState s = LoadState::discrete(x);
    CHECK_FALSE(e_ell_membership(s, 1, 1.0));
  }
  SUBCASE("requires a normalized mean") {
    LoadState s = LoadState::discrete(std::vector<std::int64_t>(4, 3));
    CHECK_THROWS_AS(e_ell_membership(s, 1, 0.5), std::invalid_argument);
  }
}
