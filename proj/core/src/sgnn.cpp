#include "csg/sgnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "csg/metrics.hpp"
#include "csg/text.hpp"

namespace csg {

namespace {

constexpr std::uint64_t kFeatureStream = 0;
constexpr std::uint64_t kWeightStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

constexpr double kLogitClip = 30.0;
constexpr double kProbFloor = 1e-13;
constexpr double kProbCeil = 1.0 - 1e-13;

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_model(const SgnnModel& m) {
  const std::size_t d = m.feature_dim;
  const std::size_t h = m.hidden_dim;
  if (d == 0 || h == 0) throw std::invalid_argument("model dimensions must be positive");
  auto expect = [](const Matrix& w, std::size_t r, std::size_t c, const char* name) {
    if (w.rows() != r || w.cols() != c) {
      throw std::invalid_argument(std::string("bad shape for ") + name);
    }
  };
  expect(m.w_pos1, h, 2 * d, "w_pos1");
  expect(m.w_neg1, h, 2 * d, "w_neg1");
  expect(m.w_pos2, h, 2 * h, "w_pos2");
  expect(m.w_neg2, h, 2 * h, "w_neg2");
  if (m.clf_w.size() != 4 * h) throw std::invalid_argument("bad shape for clf_w");
}

// out[r] = tanh(sum_k W(r,k)*self[k] + sum_k W(r,|self|+k)*agg[k]).
void combine_row(const Matrix& w, std::span<const double> self,
                 std::span<const double> agg, std::span<double> out) {
  const std::size_t n1 = self.size();
  const std::size_t n2 = agg.size();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < n1; ++k) s += w(r, k) * self[k];
    for (std::size_t k = 0; k < n2; ++k) s += w(r, n1 + k) * agg[k];
    out[r] = std::tanh(s);
  }
}

struct EdgeScore {
  double logit = 0.0;      // raw
  double p = 0.5;          // clipped + clamped probability
  bool saturated = false;  // true where the loss is locally constant in z
};

EdgeScore score_pair(const SgnnModel& m, const ForwardCache& cache, NodeId u,
                     NodeId v) {
  const NodeId a = std::min(u, v);
  const NodeId b = std::max(u, v);
  const std::size_t h = m.hidden_dim;
  double z = 0.0;
  const auto pa = cache.h_pos2.row(a);
  const auto na = cache.h_neg2.row(a);
  const auto pb = cache.h_pos2.row(b);
  const auto nb = cache.h_neg2.row(b);
  for (std::size_t k = 0; k < h; ++k) z += m.clf_w[k] * pa[k];
  for (std::size_t k = 0; k < h; ++k) z += m.clf_w[h + k] * na[k];
  for (std::size_t k = 0; k < h; ++k) z += m.clf_w[2 * h + k] * pb[k];
  for (std::size_t k = 0; k < h; ++k) z += m.clf_w[3 * h + k] * nb[k];
  z += m.clf_b;

  const double clipped = std::clamp(z, -kLogitClip, kLogitClip);
  const double raw_p = sigmoid(clipped);
  const double p = std::clamp(raw_p, kProbFloor, kProbCeil);
  const bool saturated = (z <= -kLogitClip) || (z >= kLogitClip) || (p != raw_p);
  return {z, p, saturated};
}

struct ClassWeights {
  double pos = 1.0;
  double neg = 1.0;
};

ClassWeights batch_class_weights(std::span<const SignedEdge> batch) {
  std::size_t n_pos = 0;
  for (const SignedEdge& e : batch) {
    if (e.sign == Sign::positive) ++n_pos;
  }
  const std::size_t n_neg = batch.size() - n_pos;
  const double m = static_cast<double>(batch.size());
  ClassWeights w;
  if (n_pos > 0) w.pos = m / (2.0 * static_cast<double>(n_pos));
  if (n_neg > 0) w.neg = m / (2.0 * static_cast<double>(n_neg));
  return w;
}

}  // namespace

SgnnGradients::SgnnGradients(const SgnnModel& shape)
    : w_pos1(shape.w_pos1.rows(), shape.w_pos1.cols()),
      w_neg1(shape.w_neg1.rows(), shape.w_neg1.cols()),
      w_pos2(shape.w_pos2.rows(), shape.w_pos2.cols()),
      w_neg2(shape.w_neg2.rows(), shape.w_neg2.cols()),
      clf_w(shape.clf_w.size(), 0.0) {}

void SgnnGradients::zero() {
  w_pos1.fill(0.0);
  w_neg1.fill(0.0);
  w_pos2.fill(0.0);
  w_neg2.fill(0.0);
  std::fill(clf_w.begin(), clf_w.end(), 0.0);
  clf_b = 0.0;
}

Matrix init_features(std::size_t node_count, std::size_t feature_dim,
                     std::uint64_t seed) {
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  Matrix x(node_count, feature_dim);
  Rng rng(seed);
  for (double& v : x.flat()) v = rng.next_symmetric();
  return x;
}

SgnnModel init_model(std::size_t feature_dim, std::size_t hidden_dim,
                     std::uint64_t seed) {
  if (feature_dim == 0 || hidden_dim == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  SgnnModel m;
  m.feature_dim = feature_dim;
  m.hidden_dim = hidden_dim;
  m.w_pos1 = Matrix(hidden_dim, 2 * feature_dim);
  m.w_neg1 = Matrix(hidden_dim, 2 * feature_dim);
  m.w_pos2 = Matrix(hidden_dim, 2 * hidden_dim);
  m.w_neg2 = Matrix(hidden_dim, 2 * hidden_dim);
  m.clf_w.assign(4 * hidden_dim, 0.0);
  m.clf_b = 0.0;

  Rng rng(seed);
  auto fill_uniform = [&rng](std::span<double> values, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : values) v = rng.next_range(-limit, limit);
  };
  const auto d = static_cast<double>(feature_dim);
  const auto h = static_cast<double>(hidden_dim);
  fill_uniform(m.w_pos1.flat(), 2.0 * d, h);
  fill_uniform(m.w_neg1.flat(), 2.0 * d, h);
  fill_uniform(m.w_pos2.flat(), 2.0 * h, h);
  fill_uniform(m.w_neg2.flat(), 2.0 * h, h);
  fill_uniform(m.clf_w, 4.0 * h, 1.0);
  return m;
}

ForwardCache forward(const SgnnModel& model, const SignedGraph& g,
                     const Matrix& features) {
  check_model(model);
  const std::size_t n = g.node_count();
  const std::size_t d = model.feature_dim;
  const std::size_t h = model.hidden_dim;
  if (features.rows() != n || features.cols() != d) {
    throw std::invalid_argument("feature matrix shape does not match graph/model");
  }

  ForwardCache c;
  c.a_pos1 = Matrix(n, d);
  c.a_neg1 = Matrix(n, d);
  c.h_pos1 = Matrix(n, h);
  c.h_neg1 = Matrix(n, h);
  c.a_pos2 = Matrix(n, h);
  c.a_neg2 = Matrix(n, h);
  c.h_pos2 = Matrix(n, h);
  c.h_neg2 = Matrix(n, h);

  // Layer 1: channel-separate mean of raw neighbor features.
  for (NodeId i = 0; i < n; ++i) {
    auto ap = c.a_pos1.row(i);
    auto an = c.a_neg1.row(i);
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (const auto& [j, s] : g.neighbors(i)) {
      const auto xj = features.row(j);
      if (s == Sign::positive) {
        for (std::size_t k = 0; k < d; ++k) ap[k] += xj[k];
        ++n_pos;
      } else {
        for (std::size_t k = 0; k < d; ++k) an[k] += xj[k];
        ++n_neg;
      }
    }
    if (n_pos > 0) {
      const double inv = 1.0 / static_cast<double>(n_pos);
      for (std::size_t k = 0; k < d; ++k) ap[k] *= inv;
    }
    if (n_neg > 0) {
      const double inv = 1.0 / static_cast<double>(n_neg);
      for (std::size_t k = 0; k < d; ++k) an[k] *= inv;
    }
    combine_row(model.w_pos1, features.row(i), ap, c.h_pos1.row(i));
    combine_row(model.w_neg1, features.row(i), an, c.h_neg1.row(i));
  }

  // Layer 2: balance-style channel mixing. The friendly channel pools a
  // friend's friendly state and an enemy's hostile state; the hostile channel
  // pools the opposite. Both means run over the full neighborhood.
  for (NodeId i = 0; i < n; ++i) {
    auto ap = c.a_pos2.row(i);
    auto an = c.a_neg2.row(i);
    const std::size_t deg = g.degree(i);
    for (const auto& [j, s] : g.neighbors(i)) {
      const auto hp = c.h_pos1.row(j);
      const auto hn = c.h_neg1.row(j);
      if (s == Sign::positive) {
        for (std::size_t k = 0; k < h; ++k) ap[k] += hp[k];
        for (std::size_t k = 0; k < h; ++k) an[k] += hn[k];
      } else {
        for (std::size_t k = 0; k < h; ++k) ap[k] += hn[k];
        for (std::size_t k = 0; k < h; ++k) an[k] += hp[k];
      }
    }
    if (deg > 0) {
      const double inv = 1.0 / static_cast<double>(deg);
      for (std::size_t k = 0; k < h; ++k) ap[k] *= inv;
      for (std::size_t k = 0; k < h; ++k) an[k] *= inv;
    }
    combine_row(model.w_pos2, c.h_pos1.row(i), ap, c.h_pos2.row(i));
    combine_row(model.w_neg2, c.h_neg1.row(i), an, c.h_neg2.row(i));
  }
  return c;
}

Matrix node_embeddings(const ForwardCache& cache) {
  const std::size_t n = cache.h_pos2.rows();
  const std::size_t h = cache.h_pos2.cols();
  Matrix out(n, 2 * h);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    const auto hp = cache.h_pos2.row(i);
    const auto hn = cache.h_neg2.row(i);
    for (std::size_t k = 0; k < h; ++k) row[k] = hp[k];
    for (std::size_t k = 0; k < h; ++k) row[h + k] = hn[k];
  }
  return out;
}

EdgePrediction predict_edge(const SgnnModel& model, const ForwardCache& cache,
                            NodeId u, NodeId v) {
  const EdgeScore s = score_pair(model, cache, u, v);
  return {s.logit, s.p};
}

double batch_loss(const SgnnModel& model, const SignedGraph& g,
                  const Matrix& features, std::span<const SignedEdge> batch) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  const ForwardCache cache = forward(model, g, features);
  const ClassWeights cw = batch_class_weights(batch);
  double loss = 0.0;
  for (const SignedEdge& e : batch) {
    const EdgeScore s = score_pair(model, cache, e.u, e.v);
    if (e.sign == Sign::positive) {
      loss += cw.pos * -std::log(s.p);
    } else {
      loss += cw.neg * -std::log(1.0 - s.p);
    }
  }
  return loss / static_cast<double>(batch.size());
}

double compute_gradients(const SgnnModel& model, const SignedGraph& g,
                         const Matrix& features,
                         std::span<const SignedEdge> batch,
                         SgnnGradients& grads) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  const ForwardCache cache = forward(model, g, features);
  const std::size_t n = g.node_count();
  const std::size_t d = model.feature_dim;
  const std::size_t h = model.hidden_dim;
  grads = SgnnGradients(model);

  const ClassWeights cw = batch_class_weights(batch);
  const double inv_m = 1.0 / static_cast<double>(batch.size());

  // Classifier stage: accumulate loss, classifier gradients, and the
  // gradient flowing into each node's final embedding [h_pos2 ; h_neg2].
  Matrix dh_pos2(n, h);
  Matrix dh_neg2(n, h);
  double loss = 0.0;
  for (const SignedEdge& e : batch) {
    const EdgeScore s = score_pair(model, cache, e.u, e.v);
    const double y = e.sign == Sign::positive ? 1.0 : 0.0;
    const double w = e.sign == Sign::positive ? cw.pos : cw.neg;
    loss += w * -(y > 0.5 ? std::log(s.p) : std::log(1.0 - s.p));
    if (s.saturated) continue;
    const double dz = w * inv_m * (s.p - y);

    const NodeId a = std::min(e.u, e.v);
    const NodeId b = std::max(e.u, e.v);
    const auto pa = cache.h_pos2.row(a);
    const auto na = cache.h_neg2.row(a);
    const auto pb = cache.h_pos2.row(b);
    const auto nb = cache.h_neg2.row(b);
    for (std::size_t k = 0; k < h; ++k) grads.clf_w[k] += dz * pa[k];
    for (std::size_t k = 0; k < h; ++k) grads.clf_w[h + k] += dz * na[k];
    for (std::size_t k = 0; k < h; ++k) grads.clf_w[2 * h + k] += dz * pb[k];
    for (std::size_t k = 0; k < h; ++k) grads.clf_w[3 * h + k] += dz * nb[k];
    grads.clf_b += dz;

    auto dpa = dh_pos2.row(a);
    auto dna = dh_neg2.row(a);
    auto dpb = dh_pos2.row(b);
    auto dnb = dh_neg2.row(b);
    for (std::size_t k = 0; k < h; ++k) dpa[k] += dz * model.clf_w[k];
    for (std::size_t k = 0; k < h; ++k) dna[k] += dz * model.clf_w[h + k];
    for (std::size_t k = 0; k < h; ++k) dpb[k] += dz * model.clf_w[2 * h + k];
    for (std::size_t k = 0; k < h; ++k) dnb[k] += dz * model.clf_w[3 * h + k];
  }
  loss *= inv_m;

  // Layer 2 backward: through tanh, the combine weights, and the mean
  // aggregation (which fans out to neighbors with weight 1/degree).
  Matrix dh_pos1(n, h);
  Matrix dh_neg1(n, h);
  std::vector<double> du(h, 0.0);
  std::vector<double> dagg(h, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t deg = g.degree(i);
    const double inv_deg = deg > 0 ? 1.0 / static_cast<double>(deg) : 0.0;

    // Friendly channel.
    {
      const auto hout = cache.h_pos2.row(i);
      const auto din = dh_pos2.row(i);
      for (std::size_t r = 0; r < h; ++r) du[r] = din[r] * (1.0 - hout[r] * hout[r]);
      const auto self = cache.h_pos1.row(i);
      const auto agg = cache.a_pos2.row(i);
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t k = 0; k < h; ++k) grads.w_pos2(r, k) += du[r] * self[k];
        for (std::size_t k = 0; k < h; ++k) grads.w_pos2(r, h + k) += du[r] * agg[k];
      }
      auto dself = dh_pos1.row(i);
      for (std::size_t k = 0; k < h; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < h; ++r) s += model.w_pos2(r, k) * du[r];
        dself[k] += s;
      }
      for (std::size_t k = 0; k < h; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < h; ++r) s += model.w_pos2(r, h + k) * du[r];
        dagg[k] = s * inv_deg;
      }
      if (deg > 0) {
        for (const auto& [j, s] : g.neighbors(i)) {
          auto target = s == Sign::positive ? dh_pos1.row(j) : dh_neg1.row(j);
          for (std::size_t k = 0; k < h; ++k) target[k] += dagg[k];
        }
      }
    }

    // Hostile channel.
    {
      const auto hout = cache.h_neg2.row(i);
      const auto din = dh_neg2.row(i);
      for (std::size_t r = 0; r < h; ++r) du[r] = din[r] * (1.0 - hout[r] * hout[r]);
      const auto self = cache.h_neg1.row(i);
      const auto agg = cache.a_neg2.row(i);
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t k = 0; k < h; ++k) grads.w_neg2(r, k) += du[r] * self[k];
        for (std::size_t k = 0; k < h; ++k) grads.w_neg2(r, h + k) += du[r] * agg[k];
      }
      auto dself = dh_neg1.row(i);
      for (std::size_t k = 0; k < h; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < h; ++r) s += model.w_neg2(r, k) * du[r];
        dself[k] += s;
      }
      for (std::size_t k = 0; k < h; ++k) {
        double s = 0.0;
        for (std::size_t r = 0; r < h; ++r) s += model.w_neg2(r, h + k) * du[r];
        dagg[k] = s * inv_deg;
      }
      if (deg > 0) {
        for (const auto& [j, s] : g.neighbors(i)) {
          auto target = s == Sign::positive ? dh_neg1.row(j) : dh_pos1.row(j);
          for (std::size_t k = 0; k < h; ++k) target[k] += dagg[k];
        }
      }
    }
  }

  // Layer 1 backward: features are fixed inputs, so gradients stop at the
  // combine weights.
  for (NodeId i = 0; i < n; ++i) {
    {
      const auto hout = cache.h_pos1.row(i);
      const auto din = dh_pos1.row(i);
      for (std::size_t r = 0; r < h; ++r) du[r] = din[r] * (1.0 - hout[r] * hout[r]);
      const auto self = features.row(i);
      const auto agg = cache.a_pos1.row(i);
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t k = 0; k < d; ++k) grads.w_pos1(r, k) += du[r] * self[k];
        for (std::size_t k = 0; k < d; ++k) grads.w_pos1(r, d + k) += du[r] * agg[k];
      }
    }
    {
      const auto hout = cache.h_neg1.row(i);
      const auto din = dh_neg1.row(i);
      for (std::size_t r = 0; r < h; ++r) du[r] = din[r] * (1.0 - hout[r] * hout[r]);
      const auto self = features.row(i);
      const auto agg = cache.a_neg1.row(i);
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t k = 0; k < d; ++k) grads.w_neg1(r, k) += du[r] * self[k];
        for (std::size_t k = 0; k < d; ++k) grads.w_neg1(r, d + k) += du[r] * agg[k];
      }
    }
  }

  return loss;
}

namespace {

void check_train_options(const TrainOptions& opts) {
  if (opts.feature_dim == 0 || opts.hidden_dim == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(opts.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (opts.momentum < 0.0 || opts.momentum >= 1.0) {
    throw std::invalid_argument("momentum must lie in [0, 1)");
  }
  if (opts.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
}

void apply_update(SgnnModel& model, SgnnGradients& velocity,
                  const SgnnGradients& grads, double lr, double momentum) {
  auto step = [lr, momentum](std::span<double> param, std::span<double> vel,
                             std::span<const double> grad) {
    for (std::size_t k = 0; k < param.size(); ++k) {
      vel[k] = momentum * vel[k] - lr * grad[k];
      param[k] += vel[k];
    }
  };
  step(model.w_pos1.flat(), velocity.w_pos1.flat(), grads.w_pos1.flat());
  step(model.w_neg1.flat(), velocity.w_neg1.flat(), grads.w_neg1.flat());
  step(model.w_pos2.flat(), velocity.w_pos2.flat(), grads.w_pos2.flat());
  step(model.w_neg2.flat(), velocity.w_neg2.flat(), grads.w_neg2.flat());
  step(model.clf_w, velocity.clf_w, grads.clf_w);
  velocity.clf_b = momentum * velocity.clf_b - lr * grads.clf_b;
  model.clf_b += velocity.clf_b;
}

// Shared epoch loop; the two public trainers differ only in how each epoch's
// batch is produced. next_batch(t, g_value) -> span over this epoch's edges.
template <typename BatchFn>
TrainResult train_loop(const SignedGraph& g, BatchFn&& next_batch,
                       std::span<const SignedEdge> val_edges,
                       const TrainOptions& opts) {
  check_train_options(opts);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Validation is usable only when both classes appear; otherwise AUC is
  // undefined and the loop reports NaN while returning the final parameters.
  bool val_usable = false;
  {
    bool saw_pos = false;
    bool saw_neg = false;
    for (const SignedEdge& e : val_edges) {
      (e.sign == Sign::positive ? saw_pos : saw_neg) = true;
    }
    val_usable = saw_pos && saw_neg;
  }
  std::vector<int> val_labels;
  val_labels.reserve(val_edges.size());
  for (const SignedEdge& e : val_edges) {
    val_labels.push_back(e.sign == Sign::positive ? 1 : 0);
  }

  TrainResult result;
  result.features = init_features(g.node_count(), opts.feature_dim,
                                  derive_seed(opts.seed, kFeatureStream));
  SgnnModel model = init_model(opts.feature_dim, opts.hidden_dim,
                               derive_seed(opts.seed, kWeightStream));
  SgnnGradients velocity(model);
  SgnnGradients grads(model);
  result.best_val_auc = nan;
  result.best_epoch = -1;

  std::vector<double> val_scores(val_edges.size(), 0.0);
  for (std::int64_t t = 0; t < opts.epochs; ++t) {
    double g_value = 1.0;
    const std::span<const SignedEdge> batch = next_batch(t, g_value);
    const double loss = compute_gradients(model, g, result.features, batch, grads);
    apply_update(model, velocity, grads, opts.learning_rate, opts.momentum);

    double val_auc = nan;
    if (val_usable) {
      const ForwardCache cache = forward(model, g, result.features);
      for (std::size_t k = 0; k < val_edges.size(); ++k) {
        val_scores[k] =
            predict_edge(model, cache, val_edges[k].u, val_edges[k].v).probability;
      }
      val_auc = auc(val_scores, val_labels);
      if (result.best_epoch < 0 || val_auc > result.best_val_auc) {
        result.best_val_auc = val_auc;
        result.best_epoch = t;
        result.model = model;
      }
    }
    result.history.push_back({t, g_value, batch.size(), loss, val_auc});
  }
  if (result.best_epoch < 0) result.model = std::move(model);
  return result;
}

}  // namespace

TrainResult train_curriculum(const SignedGraph& g,
                             const CurriculumSchedule& schedule,
                             std::span<const SignedEdge> val_edges,
                             const TrainOptions& opts) {
  if (schedule.ordered_edges().empty()) {
    throw std::invalid_argument("schedule has no edges");
  }
  return train_loop(
      g,
      [&schedule](std::int64_t t, double& g_value) {
        g_value = pacing_value(schedule.params(), t);
        return schedule.subset_at(t);
      },
      val_edges, opts);
}

TrainResult train_baseline(const SignedGraph& g,
                           std::span<const SignedEdge> train_edges,
                           std::span<const SignedEdge> val_edges,
                           const TrainOptions& opts) {
  if (train_edges.empty()) throw std::invalid_argument("no training edges");
  std::vector<SignedEdge> edges(train_edges.begin(), train_edges.end());
  Rng shuffle_rng(derive_seed(opts.seed, kShuffleStream));
  return train_loop(
      g,
      [&edges, &shuffle_rng, &opts](std::int64_t, double& g_value) {
        g_value = 1.0;
        if (opts.shuffle) shuffle_rng.shuffle(edges);
        return std::span<const SignedEdge>(edges);
      },
      val_edges, opts);
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Matrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ' ';
      out << format_double_exact(row[c]);
    }
    out << '\n';
  }
}

[[noreturn]] void ckpt_error(const std::string& what) {
  throw ParseError("checkpoint: " + what);
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) ckpt_error("unexpected end of file");
  return line;
}

Matrix read_matrix(std::istream& in, const std::string& name) {
  std::istringstream head(next_line(in));
  std::string kw, got;
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(head >> kw >> got >> rows >> cols) || kw != "tensor" || got != name) {
    ckpt_error("expected tensor " + name);
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::istringstream row(next_line(in));
    std::string tok;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!(row >> tok)) ckpt_error("short row in tensor " + name);
      m(r, c) = parse_double(tok);
    }
  }
  return m;
}

}  // namespace

void save_checkpoint(const SgnnModel& model, std::uint64_t seed,
                     std::ostream& out) {
  check_model(model);
  out << "csg-ckpt v1\n";
  out << "feature_dim " << model.feature_dim << '\n';
  out << "hidden_dim " << model.hidden_dim << '\n';
  out << "seed " << seed << '\n';
  write_matrix(out, "w_pos1", model.w_pos1);
  write_matrix(out, "w_neg1", model.w_neg1);
  write_matrix(out, "w_pos2", model.w_pos2);
  write_matrix(out, "w_neg2", model.w_neg2);
  out << "vector clf_w " << model.clf_w.size() << '\n';
  for (std::size_t k = 0; k < model.clf_w.size(); ++k) {
    if (k > 0) out << ' ';
    out << format_double_exact(model.clf_w[k]);
  }
  out << '\n';
  out << "scalar clf_b " << format_double_exact(model.clf_b) << '\n';
  out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in) {
  if (next_line(in) != "csg-ckpt v1") ckpt_error("bad magic line");
  Checkpoint ckpt;
  auto read_kv = [&in](const std::string& key) -> std::string {
    std::istringstream line(next_line(in));
    std::string k, v;
    if (!(line >> k >> v) || k != key) ckpt_error("expected field " + key);
    return v;
  };
  ckpt.model.feature_dim = std::stoull(read_kv("feature_dim"));
  ckpt.model.hidden_dim = std::stoull(read_kv("hidden_dim"));
  ckpt.seed = std::stoull(read_kv("seed"));
  ckpt.model.w_pos1 = read_matrix(in, "w_pos1");
  ckpt.model.w_neg1 = read_matrix(in, "w_neg1");
  ckpt.model.w_pos2 = read_matrix(in, "w_pos2");
  ckpt.model.w_neg2 = read_matrix(in, "w_neg2");
  {
    std::istringstream head(next_line(in));
    std::string kw, name;
    std::size_t len = 0;
    if (!(head >> kw >> name >> len) || kw != "vector" || name != "clf_w") {
      ckpt_error("expected vector clf_w");
    }
    ckpt.model.clf_w.assign(len, 0.0);
    std::istringstream row(next_line(in));
    std::string tok;
    for (std::size_t k = 0; k < len; ++k) {
      if (!(row >> tok)) ckpt_error("short clf_w row");
      ckpt.model.clf_w[k] = parse_double(tok);
    }
  }
  {
    std::istringstream line(next_line(in));
    std::string kw, name, tok;
    if (!(line >> kw >> name >> tok) || kw != "scalar" || name != "clf_b") {
      ckpt_error("expected scalar clf_b");
    }
    ckpt.model.clf_b = parse_double(tok);
  }
  if (next_line(in) != "end") ckpt_error("missing end marker");
  check_model(ckpt.model);
  return ckpt;
}

}  // namespace csg
