#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "csg/signed_graph.hpp"
#include "csg/types.hpp"

namespace csg {

/// Triangle on nodes i < j < k with the signs of its three edges.
struct Triangle {
  NodeId i = 0, j = 0, k = 0;
  Sign s_ij = Sign::positive;
  Sign s_jk = Sign::positive;
  Sign s_ik = Sign::positive;

  /// Balanced iff the sign product is positive (even negative-edge count).
  [[nodiscard]] bool balanced() const noexcept {
    return (s_ij * s_jk) * s_ik == Sign::positive;
  }

  bool operator==(const Triangle&) const = default;
};

/// Simple-cycle counts per length n in {3..6}, split by balance parity.
struct CycleCensus {
  struct Row {
    std::uint64_t total = 0;
    std::uint64_t balanced = 0;
    std::uint64_t unbalanced = 0;
    bool operator==(const Row&) const = default;
  };

  int max_n = 3;
  std::array<Row, 4> rows{};  // index 0 -> 3-cycles, ... index 3 -> 6-cycles

  [[nodiscard]] const Row& at(int n) const { return rows.at(static_cast<std::size_t>(n - 3)); }
  [[nodiscard]] Row& at(int n) { return rows.at(static_cast<std::size_t>(n - 3)); }
};

/// Per-edge triangle membership and the derived difficulty score.
/// d3 = balanced/total (1 for edges in no triangle), score = 1 - d3.
struct EdgeDifficulty {
  SignedEdge edge;
  std::uint64_t total_triangles = 0;
  std::uint64_t balanced_triangles = 0;

  [[nodiscard]] Ratio d3() const {
    if (total_triangles == 0) return Ratio{1, 1};
    return Ratio{static_cast<std::int64_t>(balanced_triangles),
                 static_cast<std::int64_t>(total_triangles)};
  }
  [[nodiscard]] Ratio score() const {
    if (total_triangles == 0) return Ratio{0, 1};
    return Ratio{static_cast<std::int64_t>(total_triangles - balanced_triangles),
                 static_cast<std::int64_t>(total_triangles)};
  }
};

/// Difficulty results for every edge of a graph, in edges() order.
class DifficultyMap {
 public:
  DifficultyMap() = default;
  explicit DifficultyMap(std::vector<EdgeDifficulty> entries) : entries_(std::move(entries)) {}

  [[nodiscard]] const std::vector<EdgeDifficulty>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] const EdgeDifficulty& at(std::size_t edge_index) const { return entries_.at(edge_index); }

  /// Lookup by endpoints; binary search over the canonical ordering.
  [[nodiscard]] const EdgeDifficulty* find(NodeId u, NodeId v) const;

 private:
  std::vector<EdgeDifficulty> entries_;
};

/// Visits each triangle exactly once, ascending by (i, j, k). A triangle is
/// discovered at its lexicographically smallest edge via one sorted-adjacency
/// merge per edge.
void for_each_triangle(const SignedGraph& g, const std::function<void(const Triangle&)>& visit);

[[nodiscard]] std::vector<Triangle> enumerate_triangles(const SignedGraph& g);

/// Local balance degree of one existing edge; throws if {u, v} is absent.
[[nodiscard]] Ratio local_balance_degree(const SignedGraph& g, NodeId u, NodeId v);

/// Scores every edge in one pass over all triangles (each triangle advances
/// its three edge counters).
[[nodiscard]] DifficultyMap difficulty_scores(const SignedGraph& g);

/// Counts simple cycles of each length in [3, max_n] exactly once. DFS per
/// start node, restricted to ids above the start so the smallest node opens
/// the cycle; of the two traversal directions the lexicographically smaller
/// node sequence is kept. Partitions start nodes over `threads` workers
/// (0 = hardware default) and reduces counts by summation.
[[nodiscard]] CycleCensus census(const SignedGraph& g, int max_n, unsigned threads = 0);

/// Balanced/unbalanced triangle totals of the subgraph formed by `subset`,
/// plus their ratio. All subset edges must exist in g.
struct BalanceRatioReport {
  std::uint64_t balanced = 0;
  std::uint64_t unbalanced = 0;
  /// balanced / unbalanced; meaningless when `infinite` (unbalanced == 0).
  double ratio = 0.0;
  bool infinite = false;

  /// Ratio with one decimal, or "inf".
  [[nodiscard]] std::string ratio_text() const;
};

[[nodiscard]] BalanceRatioReport balance_ratio_report(const SignedGraph& g,
                                                      std::span<const SignedEdge> subset);

/// scores.csv: header `u,v,sign,total_triangles,balanced_triangles,score`,
/// rows in canonical edge order.
void write_scores_csv(const DifficultyMap& scores, std::ostream& out);

/// Census as JSON: {"3": {"total": ..., "balanced": ..., "unbalanced": ...}, ...}.
[[nodiscard]] std::string census_to_json(const CycleCensus& c);

}  // namespace csg
