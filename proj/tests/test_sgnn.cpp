#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include "csg/sgnn.hpp"
#include "csg/signed_graph.hpp"
#include "csg/tensor.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace csg;

namespace {

// Six nodes, mixed signs, a triangle, a degree-0 channel here and there, and
// one isolated node. Small enough for finite differences, shaped enough to
// exercise every code path (empty pos-neighborhood, empty neg-neighborhood,
// both channels populated).
SignedGraph mixed_fixture() {
  return SignedGraph::from_edges(6, {{0, 1, Sign::positive},
                                     {0, 2, Sign::negative},
                                     {1, 2, Sign::positive},
                                     {1, 3, Sign::negative},
                                     {2, 4, Sign::positive},
                                     {3, 4, Sign::negative}});
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.flat().data(), b.flat().data(),
                     a.flat().size() * sizeof(double)) == 0;
}

bool bitwise_equal(const SgnnModel& a, const SgnnModel& b) {
  return a.feature_dim == b.feature_dim && a.hidden_dim == b.hidden_dim &&
         bitwise_equal(a.w_pos1, b.w_pos1) && bitwise_equal(a.w_neg1, b.w_neg1) &&
         bitwise_equal(a.w_pos2, b.w_pos2) && bitwise_equal(a.w_neg2, b.w_neg2) &&
         a.clf_w == b.clf_w && a.clf_b == b.clf_b;
}

double max_rel_error(std::span<const double> analytic, std::span<const double> numeric) {
  REQUIRE(analytic.size() == numeric.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

// Central finite difference of batch_loss with respect to every parameter.
SgnnGradients fd_gradients(const SgnnModel& model, const SignedGraph& g,
                           const Matrix& features,
                           std::span<const SignedEdge> batch, double step) {
  SgnnGradients out(model);
  SgnnModel probe = model;
  auto central = [&](double& slot, double& grad) {
    const double saved = slot;
    slot = saved + step;
    const double up = batch_loss(probe, g, features, batch);
    slot = saved - step;
    const double down = batch_loss(probe, g, features, batch);
    slot = saved;
    grad = (up - down) / (2.0 * step);
  };
  auto tensor = [&](Matrix& m, Matrix& gm) {
    for (std::size_t i = 0; i < m.flat().size(); ++i) central(m.flat()[i], gm.flat()[i]);
  };
  tensor(probe.w_pos1, out.w_pos1);
  tensor(probe.w_neg1, out.w_neg1);
  tensor(probe.w_pos2, out.w_pos2);
  tensor(probe.w_neg2, out.w_neg2);
  for (std::size_t i = 0; i < probe.clf_w.size(); ++i) central(probe.clf_w[i], out.clf_w[i]);
  central(probe.clf_b, out.clf_b);
  return out;
}

}  // namespace

TEST_CASE("init_features is deterministic, in range, and centered") {
  const Matrix a = init_features(100, 16, 99);
  const Matrix b = init_features(100, 16, 99);
  CHECK(bitwise_equal(a, b));
  const Matrix c = init_features(100, 16, 100);
  CHECK_FALSE(bitwise_equal(a, c));

  const Matrix big = init_features(10000, 100, 5);  // one million draws
  double sum = 0.0;
  for (const double x : big.flat()) {
    CHECK(x >= -1.0);
    CHECK(x < 1.0);
    sum += x;
  }
  // Mean of 1e6 uniform [-1, 1) draws: sigma = 1/(sqrt(3)*1000), so a 3-sigma
  // band of 1.733e-3 around zero.
  CHECK(std::abs(sum / 1e6) < 1.733e-3);
}

TEST_CASE("init_model shapes and bounds follow the fan-based limit") {
  const SgnnModel m = init_model(8, 5, 3);
  CHECK(m.feature_dim == 8);
  CHECK(m.hidden_dim == 5);
  CHECK(m.w_pos1.rows() == 5);
  CHECK(m.w_pos1.cols() == 16);
  CHECK(m.w_pos2.rows() == 5);
  CHECK(m.w_pos2.cols() == 10);
  CHECK(m.clf_w.size() == 20);
  CHECK(m.clf_b == 0.0);

  const double limit1 = std::sqrt(6.0 / (16 + 5));
  for (const double w : m.w_pos1.flat()) CHECK(std::abs(w) <= limit1);
  const double limit_clf = std::sqrt(6.0 / (20 + 1));
  for (const double w : m.clf_w) CHECK(std::abs(w) <= limit_clf);
  CHECK_FALSE(bitwise_equal(m.w_pos1, m.w_neg1));  // channels start distinct
}

TEST_CASE("forward treats disconnected copies independently and identically") {
  // Two copies of the same 3-node component; corresponding nodes must embed
  // bit-identically because aggregation never crosses components.
  const SignedGraph two = SignedGraph::from_edges(
      6, {{0, 1, Sign::positive}, {0, 2, Sign::negative}, {1, 2, Sign::positive},
          {3, 4, Sign::positive}, {3, 5, Sign::negative}, {4, 5, Sign::positive}});
  const SgnnModel model = init_model(4, 3, 11);
  Matrix features(6, 4);
  Rng rng(21);
  for (std::size_t c = 0; c < 4; ++c) {
    for (NodeId v = 0; v < 3; ++v) {
      const double x = rng.next_symmetric();
      features(v, c) = x;
      features(v + 3, c) = x;
    }
  }
  const Matrix emb = node_embeddings(forward(model, two, features));
  for (NodeId v = 0; v < 3; ++v) {
    for (std::size_t c = 0; c < emb.cols(); ++c) {
      CHECK(emb(v, c) == emb(v + 3, c));
    }
  }
}

TEST_CASE("an isolated node aggregates zero from both channels") {
  const SignedGraph g = SignedGraph::from_edges(3, {{0, 1, Sign::positive}});
  const SgnnModel model = init_model(3, 2, 5);
  const Matrix features = init_features(3, 3, 6);
  const ForwardCache cache = forward(model, g, features);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(cache.a_pos1(2, c) == 0.0);
    CHECK(cache.a_neg1(2, c) == 0.0);
  }
  // Node 0 has a positive neighbor but no negative one.
  bool pos_nonzero = false;
  for (std::size_t c = 0; c < 3; ++c) {
    pos_nonzero = pos_nonzero || cache.a_pos1(0, c) != 0.0;
    CHECK(cache.a_neg1(0, c) == 0.0);
  }
  CHECK(pos_nonzero);
}

TEST_CASE("layer-1 aggregates are per-channel neighbor means of raw features") {
  const SignedGraph g = mixed_fixture();
  const SgnnModel model = init_model(3, 2, 8);
  const Matrix features = init_features(6, 3, 9);
  const ForwardCache cache = forward(model, g, features);
  // Node 1: positive neighbors {0, 2}, negative neighbors {3}.
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(cache.a_pos1(1, c) ==
          doctest::Approx((features(0, c) + features(2, c)) / 2.0).epsilon(1e-15));
    CHECK(cache.a_neg1(1, c) == doctest::Approx(features(3, c)).epsilon(1e-15));
  }
}

TEST_CASE("predict_edge is symmetric in its endpoints") {
  const SignedGraph g = mixed_fixture();
  const SgnnModel model = init_model(5, 4, 13);
  const Matrix features = init_features(6, 5, 14);
  const ForwardCache cache = forward(model, g, features);
  const EdgePrediction ab = predict_edge(model, cache, 1, 4);
  const EdgePrediction ba = predict_edge(model, cache, 4, 1);
  CHECK(ab.logit == ba.logit);
  CHECK(ab.probability == ba.probability);
  CHECK(ab.probability > 0.0);
  CHECK(ab.probability < 1.0);
}

TEST_CASE("zeroed parameters score one half and a balanced batch costs ln 2") {
  const SignedGraph g = mixed_fixture();
  SgnnModel model = init_model(4, 3, 17);
  model.w_pos1.fill(0.0);
  model.w_neg1.fill(0.0);
  model.w_pos2.fill(0.0);
  model.w_neg2.fill(0.0);
  std::fill(model.clf_w.begin(), model.clf_w.end(), 0.0);
  model.clf_b = 0.0;
  const Matrix features = init_features(6, 4, 18);
  const ForwardCache cache = forward(model, g, features);
  CHECK(predict_edge(model, cache, 0, 1).probability == 0.5);

  // Batch with equal class counts: weights are 1, every term is ln 2.
  const std::vector<SignedEdge> batch{{0, 1, Sign::positive}, {0, 2, Sign::negative}};
  CHECK(batch_loss(model, g, features, batch) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // Single-class batch: the absent class's weight defaults to 1 and the
  // present class gets m / (2 * m) = 1/2.
  const std::vector<SignedEdge> pos_only{{0, 1, Sign::positive}, {1, 2, Sign::positive}};
  CHECK(batch_loss(model, g, features, pos_only) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("batch_loss rejects an empty batch") {
  const SignedGraph g = mixed_fixture();
  const SgnnModel model = init_model(4, 3, 1);
  const Matrix features = init_features(6, 4, 2);
  CHECK_THROWS_AS((void)batch_loss(model, g, features, {}), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  const SignedGraph g = mixed_fixture();
  const std::vector<SignedEdge> batch(g.edges().begin(), g.edges().end());
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    const SgnnModel model = init_model(5, 4, seed);
    const Matrix features = init_features(6, 5, seed + 100);
    SgnnGradients analytic(model);
    const double loss = compute_gradients(model, g, features, batch, analytic);
    CHECK(loss == doctest::Approx(batch_loss(model, g, features, batch)).epsilon(1e-12));

    const SgnnGradients numeric = fd_gradients(model, g, features, batch, 1e-5);
    CAPTURE(seed);
    CHECK(max_rel_error(analytic.w_pos1.flat(), numeric.w_pos1.flat()) < 1e-4);
    CHECK(max_rel_error(analytic.w_neg1.flat(), numeric.w_neg1.flat()) < 1e-4);
    CHECK(max_rel_error(analytic.w_pos2.flat(), numeric.w_pos2.flat()) < 1e-4);
    CHECK(max_rel_error(analytic.w_neg2.flat(), numeric.w_neg2.flat()) < 1e-4);
    CHECK(max_rel_error(analytic.clf_w, numeric.clf_w) < 1e-4);
    CHECK(max_rel_error({&analytic.clf_b, 1}, {&numeric.clf_b, 1}) < 1e-4);
  }
}

TEST_CASE("gradients also check out on a batch with unequal class counts") {
  const SignedGraph g = mixed_fixture();
  // 3 positive edges plus 1 negative: class weights 4/6 and 4/2.
  const std::vector<SignedEdge> batch{{0, 1, Sign::positive},
                                      {1, 2, Sign::positive},
                                      {2, 4, Sign::positive},
                                      {0, 2, Sign::negative}};
  const SgnnModel model = init_model(4, 3, 77);
  const Matrix features = init_features(6, 4, 78);
  SgnnGradients analytic(model);
  (void)compute_gradients(model, g, features, batch, analytic);
  const SgnnGradients numeric = fd_gradients(model, g, features, batch, 1e-5);
  CHECK(max_rel_error(analytic.w_pos1.flat(), numeric.w_pos1.flat()) < 1e-4);
  CHECK(max_rel_error(analytic.clf_w, numeric.clf_w) < 1e-4);
}

TEST_CASE("a saturated classifier contributes exactly zero gradient") {
  const SignedGraph g = mixed_fixture();
  SgnnModel model = init_model(4, 3, 5);
  model.clf_b = 100.0;  // logit pinned far beyond the clip
  const Matrix features = init_features(6, 4, 6);
  const ForwardCache cache = forward(model, g, features);
  const EdgePrediction p = predict_edge(model, cache, 0, 1);
  CHECK(p.logit >= 30.0);
  CHECK(p.probability == 1.0 - 1e-13);

  const std::vector<SignedEdge> batch(g.edges().begin(), g.edges().end());
  SgnnGradients grads(model);
  (void)compute_gradients(model, g, features, batch, grads);
  for (const double v : grads.w_pos1.flat()) CHECK(v == 0.0);
  for (const double v : grads.w_pos2.flat()) CHECK(v == 0.0);
  for (const double v : grads.clf_w) CHECK(v == 0.0);
  CHECK(grads.clf_b == 0.0);
}

TEST_CASE("curriculum training with the full set from epoch zero equals the unshuffled baseline") {
  Rng rng(3030);
  const SignedGraph g = oracle::random_graph(30, 0.2, 0.4, rng);
  REQUIRE(g.edges().size() > 10);

  PacingParams pacing;
  pacing.lambda0 = 1.0;  // whole set visible from the start
  const DifficultyMap scores = difficulty_scores(g);
  const CurriculumSchedule schedule = build_schedule(g.edges(), scores, pacing);

  std::vector<SignedEdge> val{{0, 1, Sign::positive}, {0, 2, Sign::negative}};

  TrainOptions opts;
  opts.feature_dim = 8;
  opts.hidden_dim = 4;
  opts.epochs = 15;
  opts.seed = 9;
  const TrainResult a = train_curriculum(g, schedule, val, opts);

  TrainOptions base = opts;
  base.shuffle = false;
  const TrainResult b = train_baseline(g, schedule.ordered_edges(), val, base);

  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t t = 0; t < a.history.size(); ++t) {
    CHECK(a.history[t].loss == b.history[t].loss);
    CHECK(a.history[t].subset_size == b.history[t].subset_size);
  }
  CHECK(bitwise_equal(a.model, b.model));
  CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  Rng rng(88);
  const SignedGraph g = oracle::random_graph(24, 0.25, 0.4, rng);
  PacingParams pacing;
  pacing.lambda0 = 0.3;
  pacing.horizon = 8;
  const CurriculumSchedule schedule =
      build_schedule(g.edges(), difficulty_scores(g), pacing);
  std::vector<SignedEdge> val{{0, 1, Sign::positive}};  // single class: unusable

  TrainOptions opts;
  opts.feature_dim = 6;
  opts.hidden_dim = 3;
  opts.epochs = 10;
  opts.seed = 4;
  const TrainResult a = train_curriculum(g, schedule, val, opts);
  const TrainResult b = train_curriculum(g, schedule, val, opts);
  CHECK(bitwise_equal(a.model, b.model));
  CHECK(bitwise_equal(a.features, b.features));
  REQUIRE(a.history.size() == 10);
  for (std::size_t t = 0; t < a.history.size(); ++t) {
    CHECK(a.history[t].loss == b.history[t].loss);
    // Unusable validation reports NaN and never snapshots.
    CHECK(std::isnan(a.history[t].val_auc));
  }
  CHECK(a.best_epoch == -1);
  CHECK(std::isnan(a.best_val_auc));
}

TEST_CASE("the curriculum reveals prefixes on schedule during training") {
  Rng rng(555);
  const SignedGraph g = oracle::random_graph(26, 0.22, 0.35, rng);
  PacingParams pacing;
  pacing.lambda0 = 0.25;
  pacing.horizon = 6;
  const CurriculumSchedule schedule =
      build_schedule(g.edges(), difficulty_scores(g), pacing);

  TrainOptions opts;
  opts.feature_dim = 6;
  opts.hidden_dim = 3;
  opts.epochs = 9;
  const TrainResult r = train_curriculum(g, schedule, {}, opts);
  REQUIRE(r.history.size() == 9);
  for (const EpochRecord& rec : r.history) {
    CHECK(rec.subset_size == schedule.prefix_size(rec.epoch));
    CHECK(rec.g_value == pacing_value(pacing, rec.epoch));
  }
  CHECK(r.history.front().subset_size < g.edges().size());
  CHECK(r.history.back().subset_size == g.edges().size());
}

TEST_CASE("momentum accelerates the same direction, and bad options throw") {
  Rng rng(777);
  const SignedGraph g = oracle::random_graph(20, 0.3, 0.4, rng);
  const CurriculumSchedule schedule =
      build_schedule(g.edges(), difficulty_scores(g), PacingParams{});

  TrainOptions opts;
  opts.feature_dim = 6;
  opts.hidden_dim = 3;
  opts.epochs = 12;
  opts.momentum = 0.9;
  const TrainResult with = train_curriculum(g, schedule, {}, opts);
  opts.momentum = 0.0;
  const TrainResult without = train_curriculum(g, schedule, {}, opts);
  // Same start, different trajectories.
  CHECK(with.history.front().loss == without.history.front().loss);
  CHECK(with.history.back().loss != without.history.back().loss);

  opts.momentum = 1.0;
  CHECK_THROWS_AS((void)train_curriculum(g, schedule, {}, opts), std::invalid_argument);
  opts.momentum = 0.0;
  opts.learning_rate = 0.0;
  CHECK_THROWS_AS((void)train_curriculum(g, schedule, {}, opts), std::invalid_argument);
  opts.learning_rate = 0.05;
  opts.epochs = 0;
  CHECK_THROWS_AS((void)train_curriculum(g, schedule, {}, opts), std::invalid_argument);
}

TEST_CASE("validation picks the best epoch and freezes that snapshot") {
  Rng rng(1234);
  const SignedGraph g = oracle::random_graph(30, 0.25, 0.4, rng);
  // Hold out a few edges of both signs as validation.
  std::vector<SignedEdge> val;
  std::vector<SignedEdge> train;
  for (const SignedEdge& e : g.edges()) {
    if (val.size() < 6 && (val.size() % 2 == 0) == (e.sign == Sign::positive)) {
      val.push_back(e);
    } else {
      train.push_back(e);
    }
  }
  const SignedGraph train_graph = SignedGraph::from_edges(g.node_count(), train);

  TrainOptions opts;
  opts.feature_dim = 8;
  opts.hidden_dim = 4;
  opts.epochs = 20;
  const TrainResult r = train_baseline(train_graph, train, val, opts);
  REQUIRE(r.best_epoch >= 0);
  CHECK(r.best_epoch < 20);
  double best = -1.0;
  for (const EpochRecord& rec : r.history) best = std::max(best, rec.val_auc);
  CHECK(r.best_val_auc == best);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch)].val_auc == best);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  const SgnnModel model = init_model(7, 3, 12345);
  std::stringstream buffer;
  save_checkpoint(model, 12345, buffer);
  const Checkpoint back = load_checkpoint(buffer);
  CHECK(back.seed == 12345);
  CHECK(bitwise_equal(back.model, model));
}

TEST_CASE("checkpoint loading rejects malformed input") {
  {
    std::stringstream buffer("not a checkpoint\n");
    CHECK_THROWS_AS((void)load_checkpoint(buffer), ParseError);
  }
  {
    // Valid header, truncated body.
    const SgnnModel model = init_model(3, 2, 1);
    std::stringstream full;
    save_checkpoint(model, 1, full);
    const std::string text = full.str();
    std::stringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS((void)load_checkpoint(truncated), ParseError);
  }
}
