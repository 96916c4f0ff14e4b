#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csg/curriculum.hpp"
#include "csg/cycle_census.hpp"
#include "csg/metrics.hpp"
#include "csg/sgnn.hpp"
#include "csg/signed_graph.hpp"

namespace csg {

// ---------------------------------------------------------------------------
// Dataset splitting.
// ---------------------------------------------------------------------------
struct SplitSpec {
  double train_fraction = 0.85;
  double val_fraction = 0.05;
  double test_fraction = 0.10;
  std::uint64_t seed = 0;

  void validate() const;  // fractions >= 0 and summing to 1
};

struct EdgeSplit {
  std::vector<SignedEdge> train;
  std::vector<SignedEdge> val;
  std::vector<SignedEdge> test;
};

// Uniform random partition of the edge set, deterministic in spec.seed.
// Split sizes use largest-remainder rounding (remainder ties broken by split
// order train, val, test), so they always sum to |E|.
EdgeSplit split_edges(const SignedGraph& g, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Easy/hard breakdown: an edge is hard when it sits in at least one
// unbalanced triangle (difficulty score > 0), easy otherwise. The scores map
// must cover every queried edge (callers score the full graph for a
// post-hoc breakdown of held-out edges).
// ---------------------------------------------------------------------------
struct EasyHard {
  std::vector<SignedEdge> easy;
  std::vector<SignedEdge> hard;
};

EasyHard easy_hard_split(std::span<const SignedEdge> edges,
                         const DifficultyMap& scores);

// ---------------------------------------------------------------------------
// Synthetic benchmark: planted partition over `communities` equal contiguous
// blocks. Each intra-community pair draws a positive edge with probability
// p_in, each inter-community pair a negative edge with probability p_out,
// and every realized sign flips independently with probability `noise`.
// With two communities and zero noise every cycle is balanced; flips plant
// unbalanced triangles.
// ---------------------------------------------------------------------------
SignedGraph synth_benchmark(std::size_t n, int communities, double p_in,
                            double p_out, double noise, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment runner.
// ---------------------------------------------------------------------------
struct ExperimentConfig {
  // Data source: a serialized graph file, or (when empty) the synthetic
  // benchmark below.
  std::string graph_path;
  std::size_t synth_n = 500;
  int synth_communities = 2;
  double synth_p_in = 0.05;
  double synth_p_out = 0.02;
  double synth_noise = 0.1;
  std::uint64_t synth_seed = 1;

  double train_fraction = 0.85;
  double val_fraction = 0.05;
  double test_fraction = 0.10;

  PacingParams pacing;  // linear, lambda0 = 0.25, horizon = 20
  TrainOptions train;   // per-run seed is overwritten by the runner

  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
};

// Canonical key=value rendering (also the digest input and the config
// snapshot format). parse_config_file accepts the same keys plus '#'
// comments; unknown keys raise ParseError.
std::string config_to_text(const ExperimentConfig& config);
ExperimentConfig parse_config_file(std::istream& in,
                                   const ExperimentConfig& defaults);
std::string config_digest(const ExperimentConfig& config);  // FNV-1a, hex

struct MetricsRecord {
  std::string method;  // "csg" (curriculum) or "random" (baseline)
  std::uint64_t seed = 0;
  double auc_value = 0.0;
  double f1_value = 0.0;
  // Absent when the easy or hard bucket of the test split lacks one class.
  std::optional<double> auc_easy;
  std::optional<double> auc_hard;
  std::string config;  // digest of the producing configuration
};

struct MetricSummary {
  std::string method;
  std::string metric;  // auc | f1 | auc_easy | auc_hard
  double mean = 0.0;
  double stddev = 0.0;      // sample (n-1) standard deviation; 0 when n < 2
  std::size_t count = 0;    // records that carried this metric
};

// One seed end to end: split, score the training subgraph, build the
// curriculum, train both methods, and evaluate on the held-out test edges.
// `full_scores` must be the difficulty map of the full graph (used only for
// the post-hoc easy/hard breakdown).
struct SeedRun {
  std::uint64_t seed = 0;
  EdgeSplit split;
  CurriculumSchedule schedule;
  TrainResult csg;
  TrainResult random;
  MetricsRecord csg_metrics;
  MetricsRecord random_metrics;
};

SeedRun run_single(const SignedGraph& g, const DifficultyMap& full_scores,
                   const ExperimentConfig& config, std::uint64_t seed);

struct ExperimentResult {
  std::vector<MetricsRecord> records;  // two per seed, csg then random
  std::vector<MetricSummary> summary;
  std::string digest;
};

// Loads or generates the graph, runs every configured seed, and aggregates.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<MetricSummary> summarize(std::span<const MetricsRecord> records);

// Line-delimited JSON records (one per line) and the human-readable summary
// block. read_metrics_jsonl inverts write_metrics_jsonl.
void write_metrics_jsonl(std::span<const MetricsRecord> records,
                         std::ostream& out);
std::vector<MetricsRecord> read_metrics_jsonl(std::istream& in);
void write_summary_text(std::span<const MetricSummary> summary,
                        std::ostream& out);

}  // namespace csg
