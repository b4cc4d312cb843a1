#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tokenbal/config.hpp"
#include "tokenbal/diffusion_process.hpp"
#include "tokenbal/graph.hpp"
#include "tokenbal/matching_process.hpp"

namespace tokenbal {

enum class InitKind { spike, uniform_random, two_level, sparse_random, zeros };

struct InitSpec {
  InitKind kind = InitKind::spike;
  double K = 1.0;
  double sparse_eps = 0.5;  // sparse_random places floor(n^(1-eps)) tokens
  bool per_replica = true;  // false: one fixed vector drawn from the master seed
};

std::vector<std::int64_t> make_initial_vector(const Graph& g, const InitSpec& init,
                                              std::uint64_t seed);

enum class ModelKind { matching, diffusion };

// A scenario fully determines a reproducible experiment: identical
// (config, seed, build) reruns emit byte-identical artifacts.
struct Scenario {
  int schema = 1;
  std::string id = "scenario";
  FamilySpec graph_spec;
  std::string graph_file;  // wins over graph_spec when set
  std::uint64_t graph_seed = 0;

  ModelKind model = ModelKind::matching;
  ScheduleMode schedule = ScheduleMode::balancing_circuit;
  OrientationStrategy orientation = OrientationStrategy::random;
  DiffusionVariant variant = DiffusionVariant::edge_based;
  double gamma = 2.0;  // <= 0 means auto: 1 + 1/d

  InitSpec init;
  std::int64_t rounds = 0;
  double stop_disc = -1.0;  // > 0: stop early once disc <= stop_disc
  int replicas = 1;
  std::uint64_t seed = 1;
  int stride = 1;
  bool track_tokens = false;
  bool track_deviation = false;
  bool check_invariants = true;
  bool log_loads = false;
  bool events = false;  // per-logged-round ball/neighborhood flags
  int events_radius = 1;
  double events_eps = 0.25;

  // Regression thresholds, all data-driven: "<metric>" paired with
  // "<metric>_frac" (minimum fraction of replicas meeting the bound).
  std::map<std::string, double> thresholds;

  static Scenario from_config(const Config& cfg);
  Graph build_graph() const;
};

struct ThresholdResult {
  std::string name;
  double bound = 0.0;
  double fraction_required = 1.0;
  double fraction_observed = 0.0;
  bool pass = true;
};

struct SummaryRow {
  std::string scenario_id;
  std::map<std::string, double> aggregates;
  std::vector<ThresholdResult> thresholds;
  bool pass = true;
};

struct RunArtifacts {
  SummaryRow summary;
  std::string csv;
  std::vector<std::string> traces;  // one JSONL document per replica
  std::string report_json;
};

// threads <= 0 picks hardware concurrency; replicas run in parallel with
// isolated streams and are merged in replica order.
RunArtifacts run_scenario(const Scenario& scenario, int threads = 0);

// summary.csv, trace-<replica>.jsonl, report.json under out_dir.
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

struct ExperimentReport {
  std::string name;
  bool pass = false;
  std::string details_json;
};

// Sparse start (about n^(1-eps) tokens), smoothed for the measured
// tau(1, 1/n) rounds; final discrepancy compared against 9/eps.
ExperimentReport experiment_sparse_discrepancy(const Graph& g, double eps, std::uint64_t seed,
                                               int replicas = 100, double pass_fraction = 0.95);

struct CascadeParams {
  double eps = 0.25;       // excess-family exponent
  int phases = 0;          // 0: ceil(2/eps)
  double threshold_c = 4.0;  // final disc <= c * log log n
  double pass_fraction = 0.9;
  int replicas = 20;
};

// Phase ladder: one coarse smoothing phase, then excess-family phases; logs
// per-phase family membership and the final discrepancy regression check.
ExperimentReport experiment_loglog_cascade(const Graph& g, double K, std::uint64_t seed,
                                           const CascadeParams& params = {});

struct MainConstantParams {
  double C = 8.0;              // round budget multiplier
  double disc_threshold = 8.0;  // versioned regression anchor
  double pass_fraction = 0.95;
  int replicas = 50;
  ScheduleMode schedule = ScheduleMode::balancing_circuit;
  std::int64_t round_cap = 200000;
};

// Runs ceil(C * log(K n) / (1 - lambda)) rounds and checks the final
// discrepancy distribution against the configured anchor.
ExperimentReport experiment_main_constant(const Graph& g, double K, std::uint64_t seed,
                                          const MainConstantParams& params = {});

}  // namespace tokenbal
