#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "csg/curriculum.hpp"
#include "csg/signed_graph.hpp"
#include "csg/tensor.hpp"
#include "csg/types.hpp"

namespace csg {

// Two-channel signed message-passing network for link sign prediction.
//
// Every node carries a "friendly" (pos) and a "hostile" (neg) representation.
// Layer 1 aggregates raw node features across positive and negative edges
// separately; deeper layers mix channels the way structural balance does:
// a friend's friendly state and an enemy's hostile state both feed the
// friendly channel, and vice versa. Each channel applies
//   h = tanh(W * [self ; mean-aggregate])
// where the mean over an empty neighbor multiset is the zero vector.
// The network depth is fixed at two layers. The final node embedding is the
// concatenation [h_pos ; h_neg], and an edge (u, v) with u < v is scored by
// a logistic classifier on [H_u ; H_v].

struct SgnnModel {
  std::size_t feature_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_pos1, w_neg1;      // hidden x 2*feature_dim
  Matrix w_pos2, w_neg2;      // hidden x 2*hidden
  std::vector<double> clf_w;  // 4*hidden
  double clf_b = 0.0;
};

// Per-parameter companions of SgnnModel (gradients, momentum buffers).
struct SgnnGradients {
  Matrix w_pos1, w_neg1, w_pos2, w_neg2;
  std::vector<double> clf_w;
  double clf_b = 0.0;

  SgnnGradients() = default;
  explicit SgnnGradients(const SgnnModel& shape);
  void zero();
};

// Node features: iid uniform on [-1, 1), one fixed draw per run.
Matrix init_features(std::size_t node_count, std::size_t feature_dim,
                     std::uint64_t seed);

// Uniform initialization with per-tensor limit sqrt(6 / (fan_in + fan_out)).
SgnnModel init_model(std::size_t feature_dim, std::size_t hidden_dim,
                     std::uint64_t seed);

// Intermediate activations kept for scoring and backpropagation.
struct ForwardCache {
  Matrix a_pos1, a_neg1;  // node x feature_dim: layer-1 mean aggregates
  Matrix h_pos1, h_neg1;  // node x hidden
  Matrix a_pos2, a_neg2;  // node x hidden: layer-2 mean aggregates
  Matrix h_pos2, h_neg2;  // node x hidden
};

ForwardCache forward(const SgnnModel& model, const SignedGraph& g,
                     const Matrix& features);

// Final embeddings, node x 2*hidden: [h_pos2 ; h_neg2].
Matrix node_embeddings(const ForwardCache& cache);

struct EdgePrediction {
  double logit;        // raw classifier output
  double probability;  // sigmoid of the logit clipped to [-30, 30], then
                       // clamped into [1e-13, 1 - 1e-13]
};

// Scores the node pair in canonical (min, max) order. The pair does not have
// to be an edge of the graph, which is what makes held-out evaluation work.
EdgePrediction predict_edge(const SgnnModel& model, const ForwardCache& cache,
                            NodeId u, NodeId v);

// Class-weighted binary cross-entropy over the batch, mean-reduced. The
// positive/negative class weights are m / (2 * class_count), computed on the
// batch itself (a perfectly balanced batch gets weight 1 for both classes).
// Runs its own forward pass; throws std::invalid_argument on an empty batch.
double batch_loss(const SgnnModel& model, const SignedGraph& g,
                  const Matrix& features, std::span<const SignedEdge> batch);

// Analytic gradients of batch_loss with respect to every model parameter.
// Returns the loss. Saturated edges (|logit| >= 30, or probability at the
// clamp boundary) contribute zero gradient, matching the piecewise loss.
double compute_gradients(const SgnnModel& model, const SignedGraph& g,
                         const Matrix& features,
                         std::span<const SignedEdge> batch,
                         SgnnGradients& grads);

struct TrainOptions {
  std::size_t feature_dim = 64;
  std::size_t hidden_dim = 32;
  double learning_rate = 0.05;
  double momentum = 0.0;
  std::int64_t epochs = 100;
  std::uint64_t seed = 0;
  bool shuffle = true;  // baseline trainer only: reshuffle the batch each epoch
};

struct EpochRecord {
  std::int64_t epoch = 0;
  double g_value = 1.0;         // visible fraction given by the pacing function
  std::size_t subset_size = 0;  // edges in this epoch's batch
  double loss = 0.0;            // batch loss before this epoch's update
  double val_auc = 0.0;         // NaN when no usable validation set
};

struct TrainResult {
  SgnnModel model;       // best-validation snapshot; final params if no val
  Matrix features;       // the exact features used (needed to evaluate later)
  std::vector<EpochRecord> history;
  double best_val_auc = 0.0;    // NaN if validation never produced a value
  std::int64_t best_epoch = -1;
};

// Curriculum training: epoch t sees schedule.subset_at(t), easiest first.
// `g` must be the graph over the schedule's edges (message passing must not
// leak held-out edges). Validation edges are scored by their stored sign.
TrainResult train_curriculum(const SignedGraph& g,
                             const CurriculumSchedule& schedule,
                             std::span<const SignedEdge> val_edges,
                             const TrainOptions& opts);

// Baseline without a curriculum: every epoch sees all of `train_edges`,
// reshuffled per epoch when opts.shuffle is set. With shuffle off and
// train_edges in schedule order, this is bit-identical to train_curriculum
// with lambda0 = 1.
TrainResult train_baseline(const SignedGraph& g,
                           std::span<const SignedEdge> train_edges,
                           std::span<const SignedEdge> val_edges,
                           const TrainOptions& opts);

// Versioned text checkpoint with exact (hexfloat) parameter round-trip.
struct Checkpoint {
  SgnnModel model;
  std::uint64_t seed = 0;
};

void save_checkpoint(const SgnnModel& model, std::uint64_t seed,
                     std::ostream& out);
Checkpoint load_checkpoint(std::istream& in);  // throws ParseError

}  // namespace csg
