#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tokenbal/divergence.hpp"
#include "tokenbal/edge_coloring.hpp"
#include "tokenbal/harness.hpp"
#include "tokenbal/metrics.hpp"
#include "tokenbal/oracle.hpp"
#include "tokenbal/smoothing.hpp"
#include "tokenbal/spectral.hpp"

namespace {

using nlohmann::json;
using namespace tokenbal;

struct GraphArgs {
  std::string family = "hypercube";
  int n = 0;
  int dim = 3;
  int side = 0;
  int degree = 0;
  std::uint64_t graph_seed = 0;
  std::string graph_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "cycle|torus|hypercube|random_regular|complete|path");
    cmd->add_option("--n", n, "node count (cycle, complete, path, random_regular)");
    cmd->add_option("--dim", dim, "hypercube dimension / torus dimension");
    cmd->add_option("--side", side, "torus side length");
    cmd->add_option("--degree", degree, "random_regular degree");
    cmd->add_option("--graph-seed", graph_seed, "seed for random graph generation");
    cmd->add_option("--graph-file", graph_file, "edge-list file: 'n m' then 'u v' lines");
  }

  Graph build() const {
    if (!graph_file.empty()) return read_edge_list_file(graph_file);
    return build_family(FamilySpec::parse(family, n, dim, side, degree), graph_seed);
  }
};

std::vector<Matching> schedule_prefix(const Graph& g, const std::string& mode,
                                      std::uint64_t seed, int horizon) {
  MatchingSchedule schedule = (mode == "random")
                                  ? MatchingSchedule::random(seed)
                                  : MatchingSchedule::circuit(edge_coloring(g));
  std::vector<Matching> out;
  out.reserve(horizon);
  for (int t = 1; t <= horizon; ++t) out.push_back(schedule.matching_for_round(g, t));
  return out;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, int threads) {
  Scenario scenario = Scenario::from_config(Config::parse_file(scenario_path));
  RunArtifacts artifacts = run_scenario(scenario, threads);
  write_artifacts(artifacts, out_dir);
  std::cout << artifacts.report_json;
  return artifacts.summary.pass ? 0 : 1;
}

int cmd_oracle(const std::string& manifest, const std::string& out_path) {
  auto instances = oracle::load_manifest(manifest);
  json checks = json::array();
  bool all_pass = true;
  for (const auto& inst : instances) {
    json row;
    row["instance"] = inst.name;
    try {
      auto by_errors = oracle::enumerate_protocol(inst, oracle::EnumMode::rounding_error);
      auto by_tokens = oracle::enumerate_protocol(inst, oracle::EnumMode::token_urn);
      bool tv_zero = oracle::total_variation(by_errors, by_tokens) == 0;
      bool sums_one = by_errors.total() == 1 && by_tokens.total() == 1;
      bool mirror = oracle::check_mirror_coupling(inst);

      auto placements = oracle::enumerate_token_placements(inst);
      bool negcorr = true;
      bool marginal_equal = true;
      std::vector<int> all_tokens(placements.token_count);
      for (int i = 0; i < placements.token_count; ++i) all_tokens[i] = i;
      for (unsigned dmask = 0; dmask < (1u << inst.n); ++dmask) {
        std::vector<int> nodes;
        for (int v = 0; v < inst.n; ++v)
          if ((dmask >> v) & 1u) nodes.push_back(v);
        for (unsigned bmask = 0; bmask < (1u << placements.token_count); ++bmask) {
          std::vector<int> tokens;
          for (int i = 0; i < placements.token_count; ++i)
            if ((bmask >> i) & 1u) tokens.push_back(i);
          auto res = oracle::check_negative_correlation(placements, inst, tokens, nodes);
          if (!res.ok) negcorr = false;
          if (tokens.size() == 1 && res.joint != res.product) marginal_equal = false;
        }
      }
      row["distribution_match"] = tv_zero;
      row["mass_sums_to_one"] = sums_one;
      row["mirror_coupling"] = mirror;
      row["negative_correlation"] = negcorr;
      row["single_token_equality"] = marginal_equal;
      bool pass = tv_zero && sums_one && mirror && negcorr && marginal_equal;
      row["pass"] = pass;
      all_pass = all_pass && pass;
    } catch (const std::exception& e) {
      row["pass"] = false;
      row["error"] = e.what();
      all_pass = false;
    }
    checks.push_back(row);
  }
  json report;
  report["manifest"] = manifest;
  report["instances"] = checks.size();
  report["pass"] = all_pass;
  report["checks"] = checks;
  std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
  }
  std::cout << text;
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and analysis toolkit for discrete load balancing"};
  app.require_subcommand(1);

  // run
  std::string scenario_path, out_dir = "out";
  int threads = 0;
  auto* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("scenario", scenario_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  // sim
  GraphArgs sim_graph;
  std::string sim_model = "matching", sim_schedule = "circuit", sim_orientation = "random";
  std::string sim_variant = "edge", sim_gamma = "2.0", sim_init = "spike", sim_tokens = "off";
  double sim_K = 16;
  std::int64_t sim_rounds = 100;
  int sim_stride = 1, sim_replicas = 1;
  std::uint64_t sim_seed = 1;
  bool sim_deviation = false, sim_log_loads = false;
  std::string sim_out = "out";
  auto* sim = app.add_subcommand("sim", "run an ad-hoc simulation");
  sim_graph.attach(sim);
  sim->add_option("--model", sim_model, "matching|diffusion");
  sim->add_option("--schedule", sim_schedule, "circuit|random");
  sim->add_option("--orientation", sim_orientation, "random|deterministic");
  sim->add_option("--variant", sim_variant, "vertex|edge");
  sim->add_option("--gamma", sim_gamma, "loop parameter or 'auto'");
  sim->add_option("--init", sim_init, "spike|uniform|two_level|sparse|zeros");
  sim->add_option("--K", sim_K, "initial discrepancy scale");
  sim->add_option("--rounds", sim_rounds, "rounds to run");
  sim->add_option("--log-stride", sim_stride, "log every k-th round");
  sim->add_option("--replicas", sim_replicas, "replica count");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--tokens", sim_tokens, "on|off: track the token urn");
  sim->add_flag("--deviation", sim_deviation, "track deviation from the continuous run");
  sim->add_flag("--log-loads", sim_log_loads, "full load vectors in traces");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--threads", threads, "worker threads");

  // metrics psi2
  GraphArgs psi_graph;
  std::string psi_model = "matching", psi_schedule = "circuit";
  int psi_horizon = 64, psi_p = 2, psi_cap = 2048;
  double psi_gamma = 2.0;
  std::uint64_t psi_seed = 1;
  auto* metrics = app.add_subcommand("metrics", "analytic quantities");
  metrics->require_subcommand(1);
  auto* psi = metrics->add_subcommand("psi2", "local p-divergence");
  psi_graph.attach(psi);
  psi->add_option("--model", psi_model, "matching|diffusion");
  psi->add_option("--schedule", psi_schedule, "circuit|random (matching model)");
  psi->add_option("--horizon", psi_horizon, "matching horizon T");
  psi->add_option("--p", psi_p, "norm order (matching model)");
  psi->add_option("--gamma", psi_gamma, "diffusion loop parameter");
  psi->add_option("--cap", psi_cap, "diffusion truncation cap");
  psi->add_option("--seed", psi_seed, "schedule seed");

  // metrics smoothing
  GraphArgs smooth_graph;
  std::string smooth_schedule = "circuit";
  double smooth_K = 0, smooth_eps = 1.0;
  int smooth_cap = 100000, smooth_replicas = 24;
  std::uint64_t smooth_seed = 1;
  auto* smooth = metrics->add_subcommand("smoothing", "smoothing time");
  smooth_graph.attach(smooth);
  smooth->add_option("--schedule", smooth_schedule, "circuit|random");
  smooth->add_option("--K", smooth_K, "initial discrepancy (0 = n)");
  smooth->add_option("--eps", smooth_eps, "target discrepancy");
  smooth->add_option("--cap", smooth_cap, "round cap");
  smooth->add_option("--replicas", smooth_replicas, "replicas (random mode)");
  smooth->add_option("--seed", smooth_seed, "schedule seed");

  // metrics potentials
  std::string pot_loads;
  double pot_eps = 0.25;
  auto* pot = metrics->add_subcommand("potentials", "potential functions of a load vector");
  pot->add_option("--loads", pot_loads, "space-separated integer loads")->required();
  pot->add_option("--eps", pot_eps, "exponential potential parameter");

  // oracle run
  std::string manifest, oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact enumeration checks");
  auto* oracle_run = oracle_cmd->add_subcommand("run", "run the manifest battery");
  oracle_run->add_option("--manifest", manifest, "instance manifest")->required();
  oracle_run->add_option("--out", oracle_out, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario_path, out_dir, threads);

    if (*sim) {
      Scenario sc;
      sc.id = "sim";
      if (!sim_graph.graph_file.empty()) sc.graph_file = sim_graph.graph_file;
      else
        sc.graph_spec = FamilySpec::parse(sim_graph.family, sim_graph.n, sim_graph.dim,
                                          sim_graph.side, sim_graph.degree);
      sc.graph_seed = sim_graph.graph_seed;
      sc.model = (sim_model == "diffusion") ? ModelKind::diffusion : ModelKind::matching;
      sc.schedule = (sim_schedule == "random") ? ScheduleMode::random_matching
                                               : ScheduleMode::balancing_circuit;
      sc.orientation = (sim_orientation == "deterministic") ? OrientationStrategy::deterministic
                                                            : OrientationStrategy::random;
      sc.variant = (sim_variant == "vertex") ? DiffusionVariant::vertex_based
                                             : DiffusionVariant::edge_based;
      sc.gamma = (sim_gamma == "auto") ? -1.0 : std::stod(sim_gamma);
      if (sim_init == "uniform") sc.init.kind = InitKind::uniform_random;
      else if (sim_init == "two_level") sc.init.kind = InitKind::two_level;
      else if (sim_init == "sparse") sc.init.kind = InitKind::sparse_random;
      else if (sim_init == "zeros") sc.init.kind = InitKind::zeros;
      sc.init.K = sim_K;
      sc.rounds = sim_rounds;
      sc.stride = sim_stride;
      sc.replicas = sim_replicas;
      sc.seed = sim_seed;
      sc.track_tokens = (sim_tokens == "on");
      sc.track_deviation = sim_deviation;
      sc.log_loads = sim_log_loads;
      RunArtifacts artifacts = run_scenario(sc, threads);
      write_artifacts(artifacts, sim_out);
      std::cout << artifacts.report_json;
      return artifacts.summary.pass ? 0 : 1;
    }

    if (*psi) {
      json out;
      if (psi_model == "diffusion") {
        Graph g = psi_graph.build();
        DivergenceReport r = psi2_upsilon2_diffusion(g, psi_gamma, psi_cap);
        out["model"] = "diffusion";
        out["gamma"] = psi_gamma;
        out["psi2"] = r.psi_p;
        out["upsilon2"] = r.upsilon_p;
        out["truncation"] = r.truncation;
        out["converged"] = r.converged;
        out["tail_certificate"] = r.tail_certificate;
        out["witness_node"] = r.witness_node;
      } else {
        Graph g = psi_graph.build();
        auto prefix = schedule_prefix(g, psi_schedule, psi_seed, psi_horizon);
        DivergenceReport r = psi_p_matching(prefix, g.n(), psi_p);
        out["model"] = "matching";
        out["p"] = psi_p;
        out["psi_p"] = r.psi_p;
        out["achieving_t"] = r.achieving_t;
        out["horizon"] = r.truncation;
        out["tail_certificate"] = r.tail_certificate;
        out["witness_node"] = r.witness_node;
        out["hard_cap"] = std::sqrt(2.0 - 2.0 / g.n());
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*smooth) {
      Graph g = smooth_graph.build();
      MatchingSchedule schedule = (smooth_schedule == "random")
                                      ? MatchingSchedule::random(smooth_seed)
                                      : MatchingSchedule::circuit(edge_coloring(g));
      double K = smooth_K > 0 ? smooth_K : g.n();
      SmoothingEstimate est = smoothing_time(g, schedule, K, smooth_eps, smooth_cap,
                                             smooth_replicas);
      json out;
      out["K"] = est.K;
      out["eps"] = est.eps;
      out["tau"] = est.tau;
      out["probe_tau"] = est.probe_tau;
      out["bound_tau"] = est.bound_tau;
      out["capped"] = est.capped;
      out["replicas"] = est.replicas;
      std::cout << out.dump(2) << '\n';
      return est.capped ? 1 : 0;
    }

    if (*pot) {
      std::vector<std::int64_t> loads;
      std::istringstream in(pot_loads);
      std::int64_t x;
      while (in >> x) loads.push_back(x);
      PotentialReport r = potentials(LoadState::discrete(std::move(loads)), pot_eps);
      json out;
      out["quadratic"] = r.quadratic;
      out["polynomial"] = r.polynomial;
      out["exponential"] = r.exponential;
      out["exp_coefficient"] = r.exp_coefficient;
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*oracle_run) return cmd_oracle(manifest, oracle_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
