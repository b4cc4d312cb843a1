#include <doctest.h>

#include <sstream>

#include "tokenbal/config.hpp"
#include "tokenbal/harness.hpp"

using namespace tokenbal;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.id = "cycle8-smoke";
  sc.graph_spec = FamilySpec::parse("cycle", 8, 0, 0, 0);
  sc.init.kind = InitKind::two_level;
  sc.init.K = 16;
  sc.rounds = 40;
  sc.replicas = 4;
  sc.seed = 2024;
  sc.stride = 10;
  sc.track_deviation = true;
  return sc;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "schema = 1\n"
      "id = \"demo run\"\n"
      "K = 12.5\n"
      "flag = true\n"
      "[alpha]\n"
      "x = 3\n"
      "[beta]\n"
      "x = 4  # trailing comment\n");
  Config cfg = Config::parse(in);
  CHECK(cfg.get_int("schema") == 1);
  CHECK(cfg.get_string("id") == "demo run");
  CHECK(cfg.get_double("K") == 12.5);
  CHECK(cfg.get_bool("flag"));
  CHECK(cfg.get_int("alpha.x") == 3);
  CHECK(cfg.get_int("beta.x") == 4);
  REQUIRE(cfg.sections().size() == 2);
  CHECK(cfg.sections()[0] == "alpha");
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get_string("missing"), std::invalid_argument);
}

TEST_CASE("scenario from config") {
  std::istringstream in(
      "schema = 1\n"
      "id = hc3\n"
      "graph = hypercube\n"
      "dim = 3\n"
      "model = matching\n"
      "schedule = circuit\n"
      "orientation = random\n"
      "init = spike\n"
      "K = 64\n"
      "rounds = 30\n"
      "replicas = 3\n"
      "seed = 99\n"
      "stride = 5\n"
      "deviation = true\n"
      "threshold.final_disc = 10\n"
      "threshold.final_disc_frac = 0.9\n");
  Scenario sc = Scenario::from_config(Config::parse(in));
  CHECK(sc.id == "hc3");
  CHECK(sc.graph_spec.family == GraphFamily::hypercube);
  CHECK(sc.rounds == 30);
  CHECK(sc.track_deviation);
  CHECK(sc.thresholds.at("final_disc") == 10.0);
  RunArtifacts artifacts = run_scenario(sc, 2);
  CHECK(artifacts.summary.thresholds.size() == 1);
}

TEST_CASE("reruns are byte-identical") {
  Scenario sc = small_scenario();
  RunArtifacts a = run_scenario(sc, 3);
  RunArtifacts b = run_scenario(sc, 1);  // thread count must not matter
  CHECK(a.csv == b.csv);
  CHECK(a.report_json == b.report_json);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) CHECK(a.traces[i] == b.traces[i]);
}

TEST_CASE("zero rounds reports the initial metrics") {
  Scenario sc = small_scenario();
  sc.rounds = 0;
  sc.replicas = 1;
  sc.init.kind = InitKind::spike;
  sc.init.K = 9;
  RunArtifacts artifacts = run_scenario(sc, 1);
  CHECK(artifacts.summary.aggregates.at("final_disc_max") == 9.0);
  // Exactly the header plus the round-0 row.
  int lines = 0;
  for (char c : artifacts.csv) lines += (c == '\n');
  CHECK(lines == 2);
}

TEST_CASE("thresholds gate the exit status") {
  Scenario sc = small_scenario();
  sc.thresholds["final_disc"] = 1000.0;
  sc.thresholds["final_disc_frac"] = 1.0;
  RunArtifacts pass = run_scenario(sc, 2);
  CHECK(pass.summary.pass);

  sc.thresholds["final_disc"] = -1.0;  // impossible
  RunArtifacts fail = run_scenario(sc, 2);
  CHECK_FALSE(fail.summary.pass);
}

TEST_CASE("initial vector generators") {
  Graph g = build_family({GraphFamily::cycle, 16, 0, 0, 0});
  SUBCASE("spike") {
    auto x = make_initial_vector(g, {InitKind::spike, 12, 0.5, true}, 1);
    CHECK(x[0] == 12);
    CHECK(std::count(x.begin(), x.end(), 0) == 15);
  }
  SUBCASE("two_level") {
    auto x = make_initial_vector(g, {InitKind::two_level, 6, 0.5, true}, 1);
    CHECK(std::count(x.begin(), x.end(), 6) == 8);
  }
  SUBCASE("uniform stays in range") {
    auto x = make_initial_vector(g, {InitKind::uniform_random, 9, 0.5, true}, 3);
    for (auto v : x) {
      CHECK(v >= 0);
      CHECK(v <= 9);
    }
  }
  SUBCASE("sparse scatters about n^(1-eps) tokens") {
    auto x = make_initial_vector(g, {InitKind::sparse_random, 0, 0.5, true}, 4);
    std::int64_t total = 0;
    for (auto v : x) total += v;
    CHECK(total == 4);  // floor(16^0.5)
  }
}

TEST_CASE("diffusion scenarios run end to end") {
  Scenario sc;
  sc.id = "torus-diffusion";
  sc.graph_spec = FamilySpec::parse("torus", 0, 2, 3, 0);
  sc.model = ModelKind::diffusion;
  sc.variant = DiffusionVariant::edge_based;
  sc.gamma = 2.0;
  sc.init.kind = InitKind::uniform_random;
  sc.init.K = 20;
  sc.rounds = 25;
  sc.replicas = 2;
  sc.track_deviation = true;
  RunArtifacts artifacts = run_scenario(sc, 1);
  CHECK(artifacts.summary.pass);
  CHECK(artifacts.summary.aggregates.count("max_deviation_max") == 1);
}
