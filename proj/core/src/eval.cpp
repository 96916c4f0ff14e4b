#include "csg/eval.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "csg/tensor.hpp"
#include "csg/text.hpp"

namespace csg {

namespace {

constexpr std::uint64_t kSplitStream = 3;

}  // namespace

// ------------------------------ splitting ----------------------------------

void SplitSpec::validate() const {
  if (train_fraction < 0.0 || val_fraction < 0.0 || test_fraction < 0.0) {
    throw std::invalid_argument("split fractions must be non-negative");
  }
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
}

EdgeSplit split_edges(const SignedGraph& g, const SplitSpec& spec) {
  spec.validate();
  std::vector<SignedEdge> edges(g.edges().begin(), g.edges().end());
  Rng rng(derive_seed(spec.seed, kSplitStream));
  rng.shuffle(edges);

  const std::size_t m = edges.size();
  const std::array<double, 3> fractions{spec.train_fraction, spec.val_fraction,
                                        spec.test_fraction};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double quota = fractions[i] * static_cast<double>(m);
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    remainders[i] = quota - std::floor(quota);
    assigned += sizes[i];
  }
  // Largest remainder first; remainder ties go to the earlier split.
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&remainders](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t leftover = m - assigned, i = 0; leftover > 0; --leftover, ++i) {
    ++sizes[order[i % 3]];
  }
  static const std::array<const char*, 3> names{"train", "val", "test"};
  for (std::size_t i = 0; i < 3; ++i) {
    if (sizes[i] == 0 && fractions[i] > 0.0 &&
        fractions[i] * static_cast<double>(m) >= 1.0) {
      throw std::invalid_argument(std::string("split '") + names[i] +
                                  "' received no edges despite a positive share");
    }
  }

  EdgeSplit out;
  auto it = edges.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  out.val.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  out.test.assign(it, it + static_cast<std::ptrdiff_t>(sizes[2]));
  return out;
}

// ----------------------------- easy / hard ----------------------------------

EasyHard easy_hard_split(std::span<const SignedEdge> edges,
                         const DifficultyMap& scores) {
  EasyHard out;
  for (const SignedEdge& e : edges) {
    const EdgeDifficulty* d = scores.find(e.u, e.v);
    if (d == nullptr) {
      throw std::invalid_argument(
          "edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
          " has no difficulty score (score the full graph first)");
    }
    const bool hard = d->balanced_triangles < d->total_triangles;
    (hard ? out.hard : out.easy).push_back(e);
  }
  return out;
}

// ------------------------------ synthesis -----------------------------------

SignedGraph synth_benchmark(std::size_t n, int communities, double p_in,
                            double p_out, double noise, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("synthetic benchmark needs n >= 2");
  if (communities < 1) throw std::invalid_argument("communities must be >= 1");
  auto check_prob = [](double p, const char* name) {
    if (p < 0.0 || p > 1.0) {
      throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
  };
  check_prob(p_in, "p_in");
  check_prob(p_out, "p_out");
  check_prob(noise, "noise");

  const auto c = static_cast<std::uint64_t>(communities);
  auto community = [n, c](std::size_t i) {
    return static_cast<std::uint64_t>(i) * c / static_cast<std::uint64_t>(n);
  };

  Rng rng(seed);
  std::vector<SignedEdge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = community(i) == community(j);
      const double p_edge = same ? p_in : p_out;
      if (rng.next_unit() >= p_edge) continue;
      Sign s = same ? Sign::positive : Sign::negative;
      if (rng.next_unit() < noise) s = flipped(s);
      edges.push_back(SignedEdge::canonical(static_cast<NodeId>(i),
                                            static_cast<NodeId>(j), s));
    }
  }
  return SignedGraph::from_edges(static_cast<NodeId>(n), std::move(edges));
}

// ------------------------------- config -------------------------------------

std::string config_to_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "graph = " << config.graph_path << '\n';
  out << "synth.n = " << config.synth_n << '\n';
  out << "synth.communities = " << config.synth_communities << '\n';
  out << "synth.p_in = " << format_double(config.synth_p_in) << '\n';
  out << "synth.p_out = " << format_double(config.synth_p_out) << '\n';
  out << "synth.noise = " << format_double(config.synth_noise) << '\n';
  out << "synth.seed = " << config.synth_seed << '\n';
  out << "split.train = " << format_double(config.train_fraction) << '\n';
  out << "split.val = " << format_double(config.val_fraction) << '\n';
  out << "split.test = " << format_double(config.test_fraction) << '\n';
  out << "pacing.kind = " << pacing_kind_name(config.pacing.kind) << '\n';
  out << "pacing.lambda0 = " << format_double(config.pacing.lambda0) << '\n';
  out << "pacing.horizon = " << config.pacing.horizon << '\n';
  out << "train.feature_dim = " << config.train.feature_dim << '\n';
  out << "train.hidden_dim = " << config.train.hidden_dim << '\n';
  out << "train.learning_rate = " << format_double(config.train.learning_rate) << '\n';
  out << "train.momentum = " << format_double(config.train.momentum) << '\n';
  out << "train.epochs = " << config.train.epochs << '\n';
  out << "seeds = ";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    if (i > 0) out << ',';
    out << config.seeds[i];
  }
  out << '\n';
  return out.str();
}

namespace {

std::string trim(std::string s) {
  const auto is_space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("config: key '" + key + "' has non-integer value '" + value + "'");
  }
  return out;
}

std::int64_t parse_i64(const std::string& value, const std::string& key) {
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("config: key '" + key + "' has non-integer value '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& value, const std::string& key) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    throw ParseError("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_file(std::istream& in,
                                   const ExperimentConfig& defaults) {
  ExperimentConfig config = defaults;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "graph") {
      config.graph_path = value;
    } else if (key == "synth.n") {
      config.synth_n = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "synth.communities") {
      config.synth_communities = static_cast<int>(parse_i64(value, key));
    } else if (key == "synth.p_in") {
      config.synth_p_in = parse_real(value, key);
    } else if (key == "synth.p_out") {
      config.synth_p_out = parse_real(value, key);
    } else if (key == "synth.noise") {
      config.synth_noise = parse_real(value, key);
    } else if (key == "synth.seed") {
      config.synth_seed = parse_u64(value, key);
    } else if (key == "split.train") {
      config.train_fraction = parse_real(value, key);
    } else if (key == "split.val") {
      config.val_fraction = parse_real(value, key);
    } else if (key == "split.test") {
      config.test_fraction = parse_real(value, key);
    } else if (key == "pacing.kind") {
      config.pacing.kind = parse_pacing_kind(value);
    } else if (key == "pacing.lambda0") {
      config.pacing.lambda0 = parse_real(value, key);
    } else if (key == "pacing.horizon") {
      config.pacing.horizon = parse_i64(value, key);
    } else if (key == "train.feature_dim") {
      config.train.feature_dim = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "train.hidden_dim") {
      config.train.hidden_dim = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "train.learning_rate") {
      config.train.learning_rate = parse_real(value, key);
    } else if (key == "train.momentum") {
      config.train.momentum = parse_real(value, key);
    } else if (key == "train.epochs") {
      config.train.epochs = parse_i64(value, key);
    } else if (key == "seeds") {
      std::vector<std::uint64_t> seeds;
      std::istringstream parts(value);
      std::string tok;
      while (std::getline(parts, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) seeds.push_back(parse_u64(tok, key));
      }
      if (seeds.empty()) {
        throw ParseError("config: key 'seeds' needs at least one seed");
      }
      config.seeds = std::move(seeds);
    } else {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }
  return config;
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string text = config_to_text(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

// ----------------------------- experiments ----------------------------------

namespace {

std::optional<double> bucket_auc(const SgnnModel& model, const ForwardCache& cache,
                                 std::span<const SignedEdge> bucket) {
  bool saw_pos = false;
  bool saw_neg = false;
  for (const SignedEdge& e : bucket) {
    (e.sign == Sign::positive ? saw_pos : saw_neg) = true;
  }
  if (!saw_pos || !saw_neg) return std::nullopt;
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(bucket.size());
  labels.reserve(bucket.size());
  for (const SignedEdge& e : bucket) {
    scores.push_back(predict_edge(model, cache, e.u, e.v).probability);
    labels.push_back(e.sign == Sign::positive ? 1 : 0);
  }
  return auc(scores, labels);
}

MetricsRecord evaluate_method(const std::string& method, std::uint64_t seed,
                              const TrainResult& trained,
                              const SignedGraph& train_graph,
                              const EdgeSplit& split,
                              const DifficultyMap& full_scores,
                              const std::string& digest) {
  const ForwardCache cache = forward(trained.model, train_graph, trained.features);
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(split.test.size());
  labels.reserve(split.test.size());
  for (const SignedEdge& e : split.test) {
    scores.push_back(predict_edge(trained.model, cache, e.u, e.v).probability);
    labels.push_back(e.sign == Sign::positive ? 1 : 0);
  }
  MetricsRecord record;
  record.method = method;
  record.seed = seed;
  record.auc_value = auc(scores, labels);
  record.f1_value = f1_binary(scores, labels);
  const EasyHard buckets = easy_hard_split(split.test, full_scores);
  record.auc_easy = bucket_auc(trained.model, cache, buckets.easy);
  record.auc_hard = bucket_auc(trained.model, cache, buckets.hard);
  record.config = digest;
  return record;
}

}  // namespace

SeedRun run_single(const SignedGraph& g, const DifficultyMap& full_scores,
                   const ExperimentConfig& config, std::uint64_t seed) {
  try {
    SplitSpec spec{config.train_fraction, config.val_fraction,
                   config.test_fraction, seed};
    EdgeSplit split = split_edges(g, spec);
    if (split.train.empty()) throw std::runtime_error("training split is empty");
    if (split.test.empty()) throw std::runtime_error("test split is empty");

    const SignedGraph train_graph =
        SignedGraph::from_edges(static_cast<NodeId>(g.node_count()), split.train);
    const DifficultyMap train_scores = difficulty_scores(train_graph);
    CurriculumSchedule schedule =
        build_schedule(split.train, train_scores, config.pacing);

    TrainOptions opts = config.train;
    opts.seed = seed;
    TrainResult csg = train_curriculum(train_graph, schedule, split.val, opts);
    TrainResult random = train_baseline(train_graph, split.train, split.val, opts);

    const std::string digest = config_digest(config);
    MetricsRecord csg_metrics = evaluate_method("csg", seed, csg, train_graph,
                                                split, full_scores, digest);
    MetricsRecord random_metrics = evaluate_method(
        "random", seed, random, train_graph, split, full_scores, digest);

    return SeedRun{seed,
                   std::move(split),
                   std::move(schedule),
                   std::move(csg),
                   std::move(random),
                   std::move(csg_metrics),
                   std::move(random_metrics)};
  } catch (const std::exception& e) {
    throw std::runtime_error("run (seed " + std::to_string(seed) + "): " + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.seeds.empty()) {
    throw std::invalid_argument("experiment needs at least one seed");
  }
  const SignedGraph g =
      config.graph_path.empty()
          ? synth_benchmark(config.synth_n, config.synth_communities,
                            config.synth_p_in, config.synth_p_out,
                            config.synth_noise, config.synth_seed)
          : load_graph(config.graph_path);
  const DifficultyMap full_scores = difficulty_scores(g);

  ExperimentResult result;
  result.digest = config_digest(config);
  for (const std::uint64_t seed : config.seeds) {
    SeedRun run = run_single(g, full_scores, config, seed);
    result.records.push_back(std::move(run.csg_metrics));
    result.records.push_back(std::move(run.random_metrics));
  }
  result.summary = summarize(result.records);
  return result;
}

std::vector<MetricSummary> summarize(std::span<const MetricsRecord> records) {
  std::vector<std::string> methods;
  for (const MetricsRecord& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }

  std::vector<MetricSummary> out;
  for (const std::string& method : methods) {
    struct Pull {
      const char* name;
      std::vector<double> values;
    };
    std::array<Pull, 4> pulls{Pull{"auc", {}}, Pull{"f1", {}},
                              Pull{"auc_easy", {}}, Pull{"auc_hard", {}}};
    for (const MetricsRecord& r : records) {
      if (r.method != method) continue;
      pulls[0].values.push_back(r.auc_value);
      pulls[1].values.push_back(r.f1_value);
      if (r.auc_easy) pulls[2].values.push_back(*r.auc_easy);
      if (r.auc_hard) pulls[3].values.push_back(*r.auc_hard);
    }
    for (const Pull& pull : pulls) {
      if (pull.values.empty()) continue;
      const auto n = static_cast<double>(pull.values.size());
      double mean = 0.0;
      for (const double v : pull.values) mean += v;
      mean /= n;
      double stddev = 0.0;
      if (pull.values.size() > 1) {
        double ss = 0.0;
        for (const double v : pull.values) ss += (v - mean) * (v - mean);
        stddev = std::sqrt(ss / (n - 1.0));
      }
      out.push_back({method, pull.name, mean, stddev, pull.values.size()});
    }
  }
  return out;
}

// ------------------------------- reports ------------------------------------

void write_metrics_jsonl(std::span<const MetricsRecord> records,
                         std::ostream& out) {
  for (const MetricsRecord& r : records) {
    nlohmann::json j;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["auc"] = r.auc_value;
    j["f1"] = r.f1_value;
    j["auc_easy"] = r.auc_easy ? nlohmann::json(*r.auc_easy) : nlohmann::json(nullptr);
    j["auc_hard"] = r.auc_hard ? nlohmann::json(*r.auc_hard) : nlohmann::json(nullptr);
    j["config"] = r.config;
    out << j.dump() << '\n';
  }
}

std::vector<MetricsRecord> read_metrics_jsonl(std::istream& in) {
  std::vector<MetricsRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      MetricsRecord r;
      r.method = j.at("method").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.auc_value = j.at("auc").get<double>();
      r.f1_value = j.at("f1").get<double>();
      if (!j.at("auc_easy").is_null()) r.auc_easy = j.at("auc_easy").get<double>();
      if (!j.at("auc_hard").is_null()) r.auc_hard = j.at("auc_hard").get<double>();
      r.config = j.at("config").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("metrics line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_summary_text(std::span<const MetricSummary> summary,
                        std::ostream& out) {
  for (const MetricSummary& row : summary) {
    out << row.method << '_' << row.metric << ' ' << format_double(row.mean)
        << " ± " << format_double(row.stddev) << " (n=" << row.count << ")\n";
  }
}

}  // namespace csg
