// csg — signed-graph curriculum toolkit.
//
// Subcommands:
//   ingest         canonicalize a raw edge list into a graph file
//   census         count short simple cycles, split by balance
//   score          per-edge difficulty table from triangle membership
//   train          curriculum + baseline training runs over several seeds
//   eval           summarize a finished run directory
//   verify-theory  mechanically check the local-view theory on fixtures
//   synth          generate a planted-partition benchmark graph

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csg/curriculum.hpp"
#include "csg/cycle_census.hpp"
#include "csg/eval.hpp"
#include "csg/sgnn.hpp"
#include "csg/signed_graph.hpp"
#include "csg/text.hpp"
#include "csg/wl_check.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// ------------------------------- ingest -------------------------------------

int cmd_ingest(const std::string& input, const std::string& output) {
  const csg::IngestResult res = csg::ingest_file(input);
  {
    std::ofstream out = open_out(output);
    res.graph.serialize(out);
  }
  {
    std::ofstream out = open_out(output + ".idmap");
    for (std::size_t v = 0; v < res.original_ids.size(); ++v) {
      out << v << ' ' << res.original_ids[v] << '\n';
    }
  }
  const std::string report = res.report.to_text();
  open_out(output + ".report") << report;
  std::cout << report;
  return 0;
}

// ------------------------------- census -------------------------------------

int cmd_census(const std::string& input, int max_n, unsigned threads,
               const std::string& output) {
  const csg::SignedGraph g = csg::load_graph(input);
  const csg::CycleCensus c = csg::census(g, max_n, threads);
  for (int len = 3; len <= max_n; ++len) {
    const auto& row = c.at(len);
    std::cout << "n=" << len << " total=" << row.total
              << " balanced=" << row.balanced
              << " unbalanced=" << row.unbalanced << '\n';
  }
  if (!output.empty()) {
    open_out(output) << csg::census_to_json(c) << '\n';
  }
  return 0;
}

// -------------------------------- score -------------------------------------

int cmd_score(const std::string& input, const std::string& output) {
  const csg::SignedGraph g = csg::load_graph(input);
  const csg::DifficultyMap scores = csg::difficulty_scores(g);
  std::ofstream out = open_out(output);
  csg::write_scores_csv(scores, out);
  std::uint64_t hard = 0;
  for (const csg::EdgeDifficulty& d : scores.entries()) {
    if (d.balanced_triangles < d.total_triangles) ++hard;
  }
  std::cout << "scored " << scores.size() << " edges (" << hard
            << " touch an unbalanced triangle)\n";
  return 0;
}

// -------------------------------- train -------------------------------------

void write_epochs_log(std::ostream& out, const csg::ExperimentResult&,
                      const std::vector<csg::SeedRun>& runs) {
  for (const csg::SeedRun& run : runs) {
    const struct {
      const char* name;
      const csg::TrainResult* result;
    } methods[] = {{"csg", &run.csg}, {"random", &run.random}};
    for (const auto& m : methods) {
      for (const csg::EpochRecord& rec : m.result->history) {
        out << "seed=" << run.seed << " method=" << m.name
            << " epoch=" << rec.epoch << " g=" << csg::format_double(rec.g_value)
            << " subset=" << rec.subset_size
            << " loss=" << csg::format_double(rec.loss)
            << " val_auc=" << csg::format_double(rec.val_auc) << '\n';
      }
    }
  }
}

int cmd_train(const csg::ExperimentConfig& config, const std::string& input,
              const std::string& rundir) {
  const csg::SignedGraph g = csg::load_graph(input);
  const csg::DifficultyMap full_scores = csg::difficulty_scores(g);

  std::vector<csg::SeedRun> runs;
  csg::ExperimentResult result;
  result.digest = csg::config_digest(config);
  for (const std::uint64_t seed : config.seeds) {
    runs.push_back(csg::run_single(g, full_scores, config, seed));
    result.records.push_back(runs.back().csg_metrics);
    result.records.push_back(runs.back().random_metrics);
  }
  result.summary = csg::summarize(result.records);

  fs::create_directories(rundir);
  const fs::path dir(rundir);
  open_out(dir / "config.snapshot") << csg::config_to_text(config);
  {
    std::ofstream out = open_out(dir / "schedule.csv");
    csg::write_schedule_csv(runs.front().schedule, out);
  }
  {
    std::ofstream out = open_out(dir / "epochs.log");
    write_epochs_log(out, result, runs);
  }
  {
    std::ofstream out = open_out(dir / "metrics.jsonl");
    csg::write_metrics_jsonl(result.records, out);
  }
  {
    std::ofstream out = open_out(dir / "summary.txt");
    csg::write_summary_text(result.summary, out);
  }
  {
    std::ofstream out = open_out(dir / "model.ckpt");
    csg::save_checkpoint(runs.front().csg.model, config.seeds.front(), out);
  }

  std::cout << "run " << result.digest << ": " << config.seeds.size()
            << " seed(s), " << result.records.size() << " records -> " << rundir
            << '\n';
  csg::write_summary_text(result.summary, std::cout);
  return 0;
}

// -------------------------------- eval --------------------------------------

int cmd_eval(const std::string& rundir) {
  const fs::path path = fs::path(rundir) / "metrics.jsonl";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::vector<csg::MetricsRecord> records = csg::read_metrics_jsonl(in);
  if (records.empty()) throw std::runtime_error("no records in " + path.string());
  csg::write_summary_text(csg::summarize(records), std::cout);
  return 0;
}

// ---------------------------- verify-theory ----------------------------------

int cmd_verify_theory(int draws, std::uint64_t seed) {
  const csg::TheoryReport report = csg::verify_theorems(draws, seed);
  std::cout << report.to_text();
  return report.all_passed() ? 0 : 1;
}

// -------------------------------- synth -------------------------------------

int cmd_synth(std::size_t n, int communities, double p_in, double p_out,
              double noise, std::uint64_t seed, const std::string& output) {
  const csg::SignedGraph g =
      csg::synth_benchmark(n, communities, p_in, p_out, noise, seed);
  {
    std::ofstream out = open_out(output);
    g.serialize(out);
  }
  const csg::EdgeCounts counts = g.edge_counts();
  std::cout << "wrote " << output << ": " << g.node_count() << " nodes, "
            << counts.total << " edges (" << counts.positive << " positive, "
            << counts.negative << " negative)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signed-graph curriculum toolkit"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_in, ingest_out;
  CLI::App* ingest = app.add_subcommand("ingest", "canonicalize a raw edge list");
  ingest->add_option("input", ingest_in, "raw `src dst weight` file")->required();
  ingest->add_option("-o,--output", ingest_out, "graph file to write")->required();

  // census
  std::string census_in, census_out;
  int census_max_n = 6;
  unsigned census_threads = 0;
  CLI::App* census = app.add_subcommand("census", "count short cycles by balance");
  census->add_option("graph", census_in, "graph file")->required();
  census->add_option("--max-n", census_max_n, "largest cycle length (3..6)")
      ->check(CLI::Range(3, 6));
  census->add_option("--threads", census_threads, "worker threads (0 = auto)");
  census->add_option("-o,--output", census_out, "also write JSON here");

  // score
  std::string score_in, score_out;
  CLI::App* score = app.add_subcommand("score", "per-edge difficulty table");
  score->add_option("graph", score_in, "graph file")->required();
  score->add_option("-o,--output", score_out, "scores.csv path")->required();

  // train
  std::string train_in, train_config, train_rundir;
  std::string train_pacing = "linear";
  double train_lambda0 = 0.25;
  std::int64_t train_horizon = 20;
  std::int64_t train_seeds = 5;
  CLI::App* train = app.add_subcommand("train", "curriculum vs baseline runs");
  train->add_option("graph", train_in, "graph file")->required();
  train->add_option("--pacing", train_pacing, "linear | root | geometric");
  train->add_option("--lambda0", train_lambda0, "initial visible fraction");
  train->add_option("-T,--horizon", train_horizon, "epochs until full data");
  train->add_option("--seeds", train_seeds, "number of seeds (0..N-1)");
  train->add_option("--config", train_config, "key = value config file");
  train->add_option("-o,--output", train_rundir, "run directory")->required();

  // eval
  std::string eval_rundir;
  CLI::App* eval = app.add_subcommand("eval", "summarize a run directory");
  eval->add_option("rundir", eval_rundir, "directory written by train")->required();

  // verify-theory
  int theory_draws = 10;
  std::uint64_t theory_seed = 917;
  CLI::App* theory =
      app.add_subcommand("verify-theory", "check the local-view theory claims");
  theory->add_option("--draws", theory_draws, "random parameter draws per claim");
  theory->add_option("--seed", theory_seed, "base seed for the draws");

  // synth
  std::size_t synth_n = 500;
  int synth_communities = 2;
  double synth_p_in = 0.05, synth_p_out = 0.02, synth_noise = 0.1;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "planted-partition benchmark");
  synth->add_option("--n", synth_n, "node count");
  synth->add_option("--communities", synth_communities, "community count");
  synth->add_option("--p-in", synth_p_in, "intra-community edge probability");
  synth->add_option("--p-out", synth_p_out, "inter-community edge probability");
  synth->add_option("--noise", synth_noise, "sign flip probability");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("-o,--output", synth_out, "graph file to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(ingest_in, ingest_out);
    if (*census) return cmd_census(census_in, census_max_n, census_threads, census_out);
    if (*score) return cmd_score(score_in, score_out);
    if (*train) {
      csg::ExperimentConfig config;
      if (!train_config.empty()) {
        std::ifstream in(train_config);
        if (!in) throw std::runtime_error("cannot read config " + train_config);
        config = csg::parse_config_file(in, config);
      }
      // Explicit flags override the config file; untouched flags defer to it.
      config.graph_path = train_in;
      if (train->count("--pacing") > 0) {
        config.pacing.kind = csg::parse_pacing_kind(train_pacing);
      }
      if (train->count("--lambda0") > 0) config.pacing.lambda0 = train_lambda0;
      if (train->count("--horizon") > 0) config.pacing.horizon = train_horizon;
      if (train->count("--seeds") > 0) {
        if (train_seeds < 1) throw std::runtime_error("--seeds must be >= 1");
        config.seeds.clear();
        for (std::int64_t s = 0; s < train_seeds; ++s) {
          config.seeds.push_back(static_cast<std::uint64_t>(s));
        }
      }
      return cmd_train(config, train_in, train_rundir);
    }
    if (*eval) return cmd_eval(eval_rundir);
    if (*theory) return cmd_verify_theory(theory_draws, theory_seed);
    if (*synth) {
      return cmd_synth(synth_n, synth_communities, synth_p_in, synth_p_out,
                       synth_noise, synth_seed, synth_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
