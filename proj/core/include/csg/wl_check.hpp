#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csg/signed_graph.hpp"
#include "csg/tensor.hpp"
#include "csg/types.hpp"

namespace csg {

// ---------------------------------------------------------------------------
// Balanced / unbalanced reach sets.
//
// A node j belongs to the level-l balanced (unbalanced) set of an origin node
// when some length-l walk from the origin to j crosses an even (odd) number
// of negative edges. Level 1 is exactly the positive / negative neighborhood.
// The origin itself is excluded from the reported sets (a walk back to the
// start connects the origin to nothing new), but propagation runs over the
// full walk closure, so walks may pass through the origin.
// ---------------------------------------------------------------------------
struct ReachSets {
  NodeId origin = 0;
  // Index l in [0, max_len]; sorted node lists. Level 0 is empty by the
  // origin-exclusion rule.
  std::vector<std::vector<NodeId>> balanced;
  std::vector<std::vector<NodeId>> unbalanced;
};

ReachSets reach_sets(const SignedGraph& g, NodeId origin, int max_len);

// ---------------------------------------------------------------------------
// Extended WL refinement for signed graphs.
//
// Every node carries a (balanced, unbalanced) label pair. Iteration 1 hashes
// (initial label, multiset of positive-neighbor initial labels) into the
// balanced slot and the negative-neighbor counterpart into the unbalanced
// slot. Later iterations mix channels: the balanced label aggregates
// balanced labels across positive edges and unbalanced labels across
// negative edges, and symmetrically for the unbalanced label. The injective
// relabeling is realized by interning canonical signature strings; sharing
// one interner across graphs makes label ids comparable between graphs.
// ---------------------------------------------------------------------------
class LabelInterner {
 public:
  int intern(const std::string& signature);
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, int> ids_;
};

struct WlLabeling {
  // pairs[l][v] = (balanced label, unbalanced label) after iteration l;
  // pairs[0] is the uniform initial labeling (featureless nodes).
  std::vector<std::vector<std::pair<int, int>>> pairs;

  const std::vector<std::pair<int, int>>& at(std::size_t iteration) const {
    return pairs.at(iteration);
  }
  const std::vector<std::pair<int, int>>& final_pairs() const {
    return pairs.back();
  }
};

WlLabeling signed_wl(const SignedGraph& g, int iterations,
                     LabelInterner& interner);
WlLabeling signed_wl(const SignedGraph& g, int iterations);

// ---------------------------------------------------------------------------
// Rooted k-hop ego-trees.
//
// Level l+1 holds one fresh copy of every graph-neighbor of each level-l
// tree node — including a copy of the node it was reached from — with tree
// edges carrying the graph edge signs. Depth is capped at k = 2: the proofs
// only need two hops and growth is exponential beyond that.
// ---------------------------------------------------------------------------
struct EgoTreeNode {
  NodeId origin = 0;  // graph node this tree node copies
  int parent = -1;    // arena index; -1 for the root
  Sign sign_from_parent = Sign::positive;  // meaningful when parent >= 0
  int level = 0;
  std::vector<int> children;  // arena indices, in adjacency order
};

struct EgoTree {
  NodeId root_origin = 0;
  int k = 0;
  std::vector<EgoTreeNode> nodes;  // nodes[0] is the root; level order
};

EgoTree build_ego_tree(const SignedGraph& g, NodeId v, int k);

// Isomorphism via canonical encoding: each subtree encodes as its incoming
// sign plus the sorted encodings of its children; trees are isomorphic iff
// the root encodings agree. On success the witness pairs arena indices of
// the two trees (a structure- and sign-preserving bijection).
struct IsoWitness {
  bool isomorphic = false;
  std::vector<std::pair<int, int>> mapping;
};

IsoWitness ego_tree_isomorphic(const EgoTree& t1, const EgoTree& t2);

// ---------------------------------------------------------------------------
// Adequacy of node embeddings (Euclidean distance).
//
// Condition (a): endpoints of a negative edge must sit farther apart than
// epsilon. Condition (b): for every node, each positive neighbor must sit
// strictly closer than every negative neighbor. Violations mark every node
// they involve; an edge is inadequate iff either endpoint is marked.
// ---------------------------------------------------------------------------
struct AdequacyReport {
  double epsilon = 1e-6;
  std::vector<std::pair<NodeId, NodeId>> violations_a;  // negative edge (u < v)
  std::vector<std::array<NodeId, 3>> violations_b;      // (i, j in N+, k in N-)
  std::vector<NodeId> inadequate_nodes;                 // sorted
  std::vector<SignedEdge> inadequate_edges;

  bool adequate() const {
    return violations_a.empty() && violations_b.empty();
  }
};

AdequacyReport check_adequacy(const SignedGraph& g, const Matrix& embeddings,
                              double epsilon = 1e-6);

// ---------------------------------------------------------------------------
// Theory harness.
// ---------------------------------------------------------------------------

// Cycle 0-1-...-(length-1)-0. When `unbalanced`, edge (0,1) is negative and
// the rest are positive (the classic single-negative-edge configuration);
// otherwise all edges are positive.
SignedGraph cycle_fixture(int length, bool unbalanced);

struct ClaimResult {
  std::string fixture;
  std::string claim;
  bool passed = false;
  std::string detail;  // measured values, or the counterexample on failure
};

struct TheoryReport {
  std::vector<ClaimResult> claims;

  bool all_passed() const;
  std::string to_text() const;
};

// Checks, on the unbalanced 3/4/5/6-cycle fixtures plus an all-positive
// control triangle: (i) the claimed ego-tree isomorphisms and
// non-isomorphisms, (ii) equality (within 1e-6) of the embeddings of
// isomorphic roots under `parameter_draws` random model initializations with
// constant node features, and (iii) the forced adequacy violations.
TheoryReport verify_theorems(int parameter_draws = 10,
                             std::uint64_t seed = 917);

}  // namespace csg
