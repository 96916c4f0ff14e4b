#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csg/types.hpp"

namespace csg {

/// One raw input record, as read: `src dst weight`. Ids may be sparse and in
/// either orientation; only the sign of the weight survives ingestion.
struct EdgeRecord {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double weight = 0.0;
};

struct EdgeCounts {
  std::uint64_t total = 0;
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;

  bool operator==(const EdgeCounts&) const = default;
};

/// What ingestion did to the raw records. Written next to the graph so count
/// deviations against published statistics stay explainable.
struct IngestReport {
  std::uint64_t edges_in = 0;
  std::uint64_t dropped_self_loops = 0;
  std::uint64_t dropped_zero_weight = 0;
  std::uint64_t duplicates_merged = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t nodes = 0;
  std::uint64_t edges_out = 0;
  std::uint64_t positive_edges = 0;
  std::uint64_t negative_edges = 0;

  [[nodiscard]] std::string to_text() const;
};

/// Immutable undirected signed graph. Neighbor lists are sign-interleaved and
/// sorted by neighbor id, so common-neighbor queries are one O(r) merge.
class SignedGraph {
 public:
  using Neighbor = std::pair<NodeId, Sign>;

  SignedGraph() = default;

  /// Builds from canonical edges over a fixed node range [0, n). Edges must be
  /// canonical (u < v), in-range, and pairwise distinct; isolated nodes are
  /// allowed (training subgraphs keep the full node range).
  static SignedGraph from_edges(NodeId n, std::vector<SignedEdge> edges);

  [[nodiscard]] NodeId node_count() const noexcept { return n_; }
  /// Canonical edge list, sorted by (u, v).
  [[nodiscard]] const std::vector<SignedEdge>& edges() const noexcept { return edges_; }

  [[nodiscard]] std::span<const Neighbor> neighbors(NodeId u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }
  [[nodiscard]] std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  /// Sign of edge {u, v} if present. Binary search over the sorted list.
  [[nodiscard]] std::optional<Sign> edge_sign(NodeId u, NodeId v) const;
  [[nodiscard]] bool has_edge(NodeId u, NodeId v) const { return edge_sign(u, v).has_value(); }

  /// Position of canonical edge {u, v} in edges(), if present.
  [[nodiscard]] std::optional<std::size_t> edge_index(NodeId u, NodeId v) const;

  [[nodiscard]] EdgeCounts edge_counts() const;

  /// Graph with every sign reversed; node set and adjacency shape unchanged.
  [[nodiscard]] SignedGraph sign_flipped() const;

  /// Canonical edge-list text, one `u v sign` row per edge, sorted by (u, v).
  /// The output re-ingests to an identical graph.
  void serialize(std::ostream& out) const;

 private:
  NodeId n_ = 0;
  std::vector<SignedEdge> edges_;
  std::vector<std::size_t> offsets_;  // n_ + 1 entries
  std::vector<Neighbor> adj_;
};

/// A common neighbor of a queried pair, with its sign toward each endpoint.
struct CommonNeighbor {
  NodeId node = 0;
  Sign sign_u = Sign::positive;
  Sign sign_v = Sign::positive;

  bool operator==(const CommonNeighbor&) const = default;
};

/// Sorted-merge intersection of the two neighbor lists; O(max degree) time.
/// Results are ascending by node id. u and v must differ.
[[nodiscard]] std::vector<CommonNeighbor> common_neighbors(const SignedGraph& g, NodeId u,
                                                           NodeId v);

struct IngestResult {
  SignedGraph graph;
  IngestReport report;
  /// original_ids[new_id] = raw id from the input. Identity when the raw ids
  /// were already dense in [0, n).
  std::vector<std::int64_t> original_ids;
};

/// Canonicalizes raw records into a SignedGraph:
/// sign = signum(weight), zero weights dropped, self-loops dropped, directed
/// duplicates symmetrized, pairs seen with conflicting signs dropped and
/// counted, ids densely remapped in first-appearance order (kept as-is when
/// already dense). Throws EmptyEdgeSetError when nothing usable remains.
[[nodiscard]] IngestResult ingest(std::span<const EdgeRecord> records);

/// Parses `src dst weight` rows. Splits on whitespace/commas, skips blank and
/// `#` comment lines, ignores trailing columns (raw dataset exports carry
/// timestamps). Throws ParseError naming `source` and the 1-based line.
[[nodiscard]] std::vector<EdgeRecord> parse_edge_records(std::istream& in,
                                                         const std::string& source);

/// parse + ingest for a file on disk. Throws ParseError if unreadable.
[[nodiscard]] IngestResult ingest_file(const std::string& path);

/// Reads a canonical graph file (dense ids, one sign-valued weight per row).
[[nodiscard]] SignedGraph load_graph(const std::string& path);

void save_graph(const SignedGraph& g, const std::string& path);

}  // namespace csg
