#include "csg/wl_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "csg/sgnn.hpp"
#include "csg/text.hpp"

namespace csg {

// --------------------------- reach sets -----------------------------------

ReachSets reach_sets(const SignedGraph& g, NodeId origin, int max_len) {
  if (max_len < 1) throw std::invalid_argument("reach sets need max_len >= 1");
  if (origin >= g.node_count()) throw std::invalid_argument("origin out of range");
  const std::size_t n = g.node_count();

  ReachSets out;
  out.origin = origin;
  out.balanced.resize(static_cast<std::size_t>(max_len) + 1);
  out.unbalanced.resize(static_cast<std::size_t>(max_len) + 1);

  // Walk closure over (node, parity) states; the reported sets drop the
  // origin but propagation keeps it, so walks may pass through the start.
  std::vector<char> even(n, 0);
  std::vector<char> odd(n, 0);
  even[origin] = 1;
  for (int l = 1; l <= max_len; ++l) {
    std::vector<char> next_even(n, 0);
    std::vector<char> next_odd(n, 0);
    for (NodeId k = 0; k < n; ++k) {
      if (!even[k] && !odd[k]) continue;
      for (const auto& [j, s] : g.neighbors(k)) {
        if (even[k]) (s == Sign::positive ? next_even : next_odd)[j] = 1;
        if (odd[k]) (s == Sign::positive ? next_odd : next_even)[j] = 1;
      }
    }
    even.swap(next_even);
    odd.swap(next_odd);
    for (NodeId v = 0; v < n; ++v) {
      if (v == origin) continue;
      if (even[v]) out.balanced[static_cast<std::size_t>(l)].push_back(v);
      if (odd[v]) out.unbalanced[static_cast<std::size_t>(l)].push_back(v);
    }
  }
  return out;
}

// ----------------------------- signed WL -----------------------------------

int LabelInterner::intern(const std::string& signature) {
  const auto [it, inserted] =
      ids_.emplace(signature, static_cast<int>(ids_.size()));
  return it->second;
}

namespace {

std::string join_sorted(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

WlLabeling signed_wl(const SignedGraph& g, int iterations,
                     LabelInterner& interner) {
  if (iterations < 1) throw std::invalid_argument("signed_wl needs iterations >= 1");
  const std::size_t n = g.node_count();
  WlLabeling out;
  const int c0 = interner.intern("init");
  out.pairs.emplace_back(n, std::make_pair(c0, c0));

  // Iteration 1: signature (self, multiset over one neighborhood). The same
  // signature shape serves both slots, so a node's balanced label equals
  // another's unbalanced label whenever the underlying tuples coincide.
  {
    std::vector<std::pair<int, int>> next(n);
    for (NodeId i = 0; i < n; ++i) {
      std::vector<int> pos;
      std::vector<int> neg;
      for (const auto& [j, s] : g.neighbors(i)) {
        (s == Sign::positive ? pos : neg).push_back(c0);
      }
      const std::string base = std::to_string(c0) + '|';
      next[i].first = interner.intern('(' + base + join_sorted(std::move(pos)) + ')');
      next[i].second = interner.intern('(' + base + join_sorted(std::move(neg)) + ')');
    }
    out.pairs.push_back(std::move(next));
  }

  // Iterations > 1: cross-channel signature
  // (self-label, multiset across positive edges, multiset across negative
  // edges), where the balanced slot reads balanced labels over positive
  // edges and unbalanced labels over negative ones, and vice versa.
  for (int l = 2; l <= iterations; ++l) {
    const auto& prev = out.pairs.back();
    std::vector<std::pair<int, int>> next(n);
    for (NodeId i = 0; i < n; ++i) {
      std::vector<int> b_pos, b_neg, u_pos, u_neg;
      for (const auto& [j, s] : g.neighbors(i)) {
        if (s == Sign::positive) {
          b_pos.push_back(prev[j].first);
          u_pos.push_back(prev[j].second);
        } else {
          b_neg.push_back(prev[j].second);
          u_neg.push_back(prev[j].first);
        }
      }
      next[i].first = interner.intern(
          '(' + std::to_string(prev[i].first) + '|' +
          join_sorted(std::move(b_pos)) + '|' + join_sorted(std::move(b_neg)) + ')');
      next[i].second = interner.intern(
          '(' + std::to_string(prev[i].second) + '|' +
          join_sorted(std::move(u_pos)) + '|' + join_sorted(std::move(u_neg)) + ')');
    }
    out.pairs.push_back(std::move(next));
  }
  return out;
}

WlLabeling signed_wl(const SignedGraph& g, int iterations) {
  LabelInterner interner;
  return signed_wl(g, iterations, interner);
}

// ----------------------------- ego-trees -----------------------------------

EgoTree build_ego_tree(const SignedGraph& g, NodeId v, int k) {
  if (v >= g.node_count()) throw std::invalid_argument("ego-tree root out of range");
  if (k < 1) throw std::invalid_argument("ego-tree depth must be at least 1");
  if (k > 2) {
    throw std::invalid_argument(
        "ego-tree depth " + std::to_string(k) +
        " exceeds the supported maximum of 2 (the tree grows exponentially "
        "with depth)");
  }
  EgoTree tree;
  tree.root_origin = v;
  tree.k = k;
  tree.nodes.push_back({v, -1, Sign::positive, 0, {}});
  std::size_t level_begin = 0;
  for (int level = 0; level < k; ++level) {
    const std::size_t level_end = tree.nodes.size();
    for (std::size_t p = level_begin; p < level_end; ++p) {
      for (const auto& [j, s] : g.neighbors(tree.nodes[p].origin)) {
        const int child = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({j, static_cast<int>(p), s, level + 1, {}});
        tree.nodes[p].children.push_back(child);
      }
    }
    level_begin = level_end;
  }
  return tree;
}

namespace {

std::vector<std::string> encode_tree(const EgoTree& t) {
  std::vector<std::string> enc(t.nodes.size());
  // Level order guarantees children have larger indices than parents, so a
  // reverse sweep computes encodings bottom-up.
  for (std::size_t idx = t.nodes.size(); idx-- > 0;) {
    const EgoTreeNode& node = t.nodes[idx];
    std::vector<std::string> child_encs;
    child_encs.reserve(node.children.size());
    for (int c : node.children) child_encs.push_back(enc[static_cast<std::size_t>(c)]);
    std::sort(child_encs.begin(), child_encs.end());
    std::string s;
    s += node.parent < 0 ? '*' : sign_char(node.sign_from_parent);
    s += '(';
    for (std::size_t i = 0; i < child_encs.size(); ++i) {
      if (i > 0) s += ',';
      s += child_encs[i];
    }
    s += ')';
    enc[idx] = std::move(s);
  }
  return enc;
}

// Pairs subtree roots whose encodings match; children sorted by encoding
// (ties by arena index) correspond positionally.
void pair_subtrees(const EgoTree& t1, const EgoTree& t2,
                   const std::vector<std::string>& enc1,
                   const std::vector<std::string>& enc2, int i1, int i2,
                   std::vector<std::pair<int, int>>& mapping) {
  mapping.emplace_back(i1, i2);
  auto sorted_children = [](const EgoTree& t, const std::vector<std::string>& enc,
                            int idx) {
    std::vector<int> kids = t.nodes[static_cast<std::size_t>(idx)].children;
    std::sort(kids.begin(), kids.end(), [&enc](int a, int b) {
      const std::string& ea = enc[static_cast<std::size_t>(a)];
      const std::string& eb = enc[static_cast<std::size_t>(b)];
      if (ea != eb) return ea < eb;
      return a < b;
    });
    return kids;
  };
  const std::vector<int> kids1 = sorted_children(t1, enc1, i1);
  const std::vector<int> kids2 = sorted_children(t2, enc2, i2);
  for (std::size_t c = 0; c < kids1.size(); ++c) {
    pair_subtrees(t1, t2, enc1, enc2, kids1[c], kids2[c], mapping);
  }
}

}  // namespace

IsoWitness ego_tree_isomorphic(const EgoTree& t1, const EgoTree& t2) {
  if (t1.k != t2.k) {
    throw std::invalid_argument("ego-trees were built with different depths");
  }
  const std::vector<std::string> enc1 = encode_tree(t1);
  const std::vector<std::string> enc2 = encode_tree(t2);
  IsoWitness w;
  if (enc1[0] != enc2[0]) return w;
  w.isomorphic = true;
  w.mapping.reserve(t1.nodes.size());
  pair_subtrees(t1, t2, enc1, enc2, 0, 0, w.mapping);
  return w;
}

// ----------------------------- adequacy ------------------------------------

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

AdequacyReport check_adequacy(const SignedGraph& g, const Matrix& embeddings,
                              double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (embeddings.rows() != g.node_count() || embeddings.cols() == 0) {
    throw std::invalid_argument("every node needs a non-empty embedding row");
  }
  AdequacyReport report;
  report.epsilon = epsilon;
  std::vector<char> marked(g.node_count(), 0);

  // Condition (a): negative endpoints must be separated by more than epsilon.
  for (const SignedEdge& e : g.edges()) {
    if (e.sign != Sign::negative) continue;
    if (euclidean(embeddings.row(e.u), embeddings.row(e.v)) <= epsilon) {
      report.violations_a.emplace_back(e.u, e.v);
      marked[e.u] = 1;
      marked[e.v] = 1;
    }
  }

  // Condition (b): every positive neighbor strictly closer than every
  // negative neighbor.
  for (NodeId i = 0; i < g.node_count(); ++i) {
    std::vector<NodeId> pos;
    std::vector<NodeId> neg;
    for (const auto& [j, s] : g.neighbors(i)) {
      (s == Sign::positive ? pos : neg).push_back(j);
    }
    for (NodeId j : pos) {
      const double dij = euclidean(embeddings.row(i), embeddings.row(j));
      for (NodeId k : neg) {
        const double dik = euclidean(embeddings.row(i), embeddings.row(k));
        if (dij >= dik) {
          report.violations_b.push_back({i, j, k});
          marked[i] = 1;
          marked[j] = 1;
          marked[k] = 1;
        }
      }
    }
  }

  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (marked[v]) report.inadequate_nodes.push_back(v);
  }
  for (const SignedEdge& e : g.edges()) {
    if (marked[e.u] || marked[e.v]) report.inadequate_edges.push_back(e);
  }
  return report;
}

// --------------------------- theory harness --------------------------------

SignedGraph cycle_fixture(int length, bool unbalanced) {
  if (length < 3) throw std::invalid_argument("cycle needs at least 3 nodes");
  std::vector<SignedEdge> edges;
  const auto n = static_cast<NodeId>(length);
  for (NodeId i = 0; i + 1 < n; ++i) {
    const Sign s = (unbalanced && i == 0) ? Sign::negative : Sign::positive;
    edges.push_back(SignedEdge::canonical(i, i + 1, s));
  }
  edges.push_back(SignedEdge::canonical(0, n - 1, Sign::positive));
  return SignedGraph::from_edges(n, std::move(edges));
}

bool TheoryReport::all_passed() const {
  return std::all_of(claims.begin(), claims.end(),
                     [](const ClaimResult& c) { return c.passed; });
}

std::string TheoryReport::to_text() const {
  std::ostringstream out;
  std::size_t failed = 0;
  for (const ClaimResult& c : claims) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.fixture << ": " << c.claim;
    if (!c.detail.empty()) out << " — " << c.detail;
    out << '\n';
    if (!c.passed) ++failed;
  }
  if (failed == 0) {
    out << "all " << claims.size() << " claims passed\n";
  } else {
    out << failed << " of " << claims.size() << " claims FAILED\n";
  }
  return out.str();
}

namespace {

constexpr std::size_t kTheoryFeatureDim = 6;
constexpr std::size_t kTheoryHiddenDim = 5;

Matrix constant_features(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> row(dim);
  for (double& v : row) v = rng.next_symmetric();
  Matrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = x.row(i);
    for (std::size_t kk = 0; kk < dim; ++kk) r[kk] = row[kk];
  }
  return x;
}

double max_row_diff(const Matrix& emb, NodeId a, NodeId b) {
  const auto ra = emb.row(a);
  const auto rb = emb.row(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    worst = std::max(worst, std::abs(ra[k] - rb[k]));
  }
  return worst;
}

bool has_pair(const std::vector<std::pair<NodeId, NodeId>>& list, NodeId a,
              NodeId b) {
  return std::find(list.begin(), list.end(), std::make_pair(a, b)) != list.end();
}

bool has_triple(const std::vector<std::array<NodeId, 3>>& list, NodeId a,
                NodeId b, NodeId c) {
  return std::find(list.begin(), list.end(), std::array<NodeId, 3>{a, b, c}) !=
         list.end();
}

bool has_node(const std::vector<NodeId>& sorted_nodes, NodeId v) {
  return std::binary_search(sorted_nodes.begin(), sorted_nodes.end(), v);
}

bool has_edge_uv(const std::vector<SignedEdge>& edges, NodeId u, NodeId v) {
  return std::any_of(edges.begin(), edges.end(), [u, v](const SignedEdge& e) {
    return e.u == u && e.v == v;
  });
}

}  // namespace

TheoryReport verify_theorems(int parameter_draws, std::uint64_t seed) {
  if (parameter_draws < 1) {
    throw std::invalid_argument("verify_theorems needs at least one draw");
  }
  TheoryReport report;

  int fixture_index = 0;
  for (const int length : {3, 4, 5, 6}) {
    const std::string name = "unbalanced-" + std::to_string(length) + "-cycle";
    const SignedGraph g = cycle_fixture(length, true);
    const NodeId last = static_cast<NodeId>(length - 1);

    const EgoTree t0 = build_ego_tree(g, 0, 2);
    const EgoTree t1 = build_ego_tree(g, 1, 2);
    const EgoTree tl = build_ego_tree(g, last, 2);

    {
      const IsoWitness w = ego_tree_isomorphic(t0, t1);
      report.claims.push_back(
          {name, "2-hop ego-trees of nodes 0 and 1 are isomorphic", w.isomorphic,
           w.isomorphic
               ? "witness maps " + std::to_string(w.mapping.size()) + " tree nodes"
               : "root encodings differ"});
    }
    {
      const IsoWitness w = ego_tree_isomorphic(t0, tl);
      report.claims.push_back(
          {name,
           "2-hop ego-trees of nodes 0 and " + std::to_string(last) +
               " are not isomorphic",
           !w.isomorphic,
           w.isomorphic ? "unexpected isomorphism witness found"
                        : "root encodings differ as expected"});
    }

    double worst_diff = 0.0;
    bool pair_found = true;
    bool triple_found = true;
    bool marks_found = true;
    std::string counterexample;
    for (int draw = 0; draw < parameter_draws; ++draw) {
      const std::uint64_t tag =
          static_cast<std::uint64_t>(fixture_index) * 1000 +
          static_cast<std::uint64_t>(draw) * 2;
      const SgnnModel model = init_model(kTheoryFeatureDim, kTheoryHiddenDim,
                                         derive_seed(seed, tag));
      const Matrix x = constant_features(g.node_count(), kTheoryFeatureDim,
                                         derive_seed(seed, tag + 1));
      const Matrix emb = node_embeddings(forward(model, g, x));
      worst_diff = std::max(worst_diff, max_row_diff(emb, 0, 1));

      const AdequacyReport adequacy = check_adequacy(g, emb, 1e-6);
      if (!has_pair(adequacy.violations_a, 0, 1)) {
        pair_found = false;
        if (counterexample.empty()) {
          counterexample = "draw " + std::to_string(draw) +
                           ": negative edge (0,1) not reported as violation";
        }
      }
      if (!has_triple(adequacy.violations_b, 0, last, 1)) {
        triple_found = false;
        if (counterexample.empty()) {
          counterexample = "draw " + std::to_string(draw) + ": triple (0," +
                           std::to_string(last) + ",1) not reported";
        }
      }
      if (!has_node(adequacy.inadequate_nodes, 0) ||
          !has_node(adequacy.inadequate_nodes, 1) ||
          !has_node(adequacy.inadequate_nodes, last) ||
          !has_edge_uv(adequacy.inadequate_edges, 0, 1) ||
          !has_edge_uv(adequacy.inadequate_edges, 0, last)) {
        marks_found = false;
        if (counterexample.empty()) {
          counterexample =
              "draw " + std::to_string(draw) + ": inadequate marks incomplete";
        }
      }
    }

    report.claims.push_back(
        {name,
         "embeddings of nodes 0 and 1 agree within 1e-6 over " +
             std::to_string(parameter_draws) + " random draws",
         worst_diff <= 1e-6,
         "max |H_0 - H_1| = " + format_double(worst_diff)});
    report.claims.push_back(
        {name, "negative edge (0,1) violates the separation condition at every draw",
         pair_found, pair_found ? "" : counterexample});
    report.claims.push_back(
        {name,
         "triple (0," + std::to_string(last) +
             ",1) violates the closeness condition at every draw",
         triple_found, triple_found ? "" : counterexample});
    report.claims.push_back(
        {name,
         "nodes 0, 1, " + std::to_string(last) +
             " and their incident edges are flagged inadequate",
         marks_found, marks_found ? "" : counterexample});
    ++fixture_index;
  }

  // Balanced control: all-positive triangle, fully symmetric and adequate.
  {
    const std::string name = "balanced-3-cycle";
    const SignedGraph g = cycle_fixture(3, false);
    const EgoTree t0 = build_ego_tree(g, 0, 2);
    const EgoTree t1 = build_ego_tree(g, 1, 2);
    const EgoTree t2 = build_ego_tree(g, 2, 2);
    const bool all_iso = ego_tree_isomorphic(t0, t1).isomorphic &&
                         ego_tree_isomorphic(t0, t2).isomorphic &&
                         ego_tree_isomorphic(t1, t2).isomorphic;
    report.claims.push_back({name, "2-hop ego-trees of all nodes are pairwise isomorphic",
                             all_iso, ""});

    double worst_diff = 0.0;
    bool all_adequate = true;
    std::string counterexample;
    for (int draw = 0; draw < parameter_draws; ++draw) {
      const std::uint64_t tag =
          static_cast<std::uint64_t>(fixture_index) * 1000 +
          static_cast<std::uint64_t>(draw) * 2;
      const SgnnModel model = init_model(kTheoryFeatureDim, kTheoryHiddenDim,
                                         derive_seed(seed, tag));
      const Matrix x = constant_features(g.node_count(), kTheoryFeatureDim,
                                         derive_seed(seed, tag + 1));
      const Matrix emb = node_embeddings(forward(model, g, x));
      worst_diff = std::max(worst_diff, max_row_diff(emb, 0, 1));
      worst_diff = std::max(worst_diff, max_row_diff(emb, 0, 2));
      const AdequacyReport adequacy = check_adequacy(g, emb, 1e-6);
      if (!adequacy.adequate()) {
        all_adequate = false;
        if (counterexample.empty()) {
          counterexample = "draw " + std::to_string(draw) + ": " +
                           std::to_string(adequacy.violations_a.size()) +
                           " separation / " +
                           std::to_string(adequacy.violations_b.size()) +
                           " closeness violations";
        }
      }
    }
    report.claims.push_back(
        {name,
         "embeddings of all nodes agree within 1e-6 over " +
             std::to_string(parameter_draws) + " random draws",
         worst_diff <= 1e-6, "max pairwise diff = " + format_double(worst_diff)});
    report.claims.push_back(
        {name, "no adequacy violations at any draw (conditions are vacuous)",
         all_adequate, all_adequate ? "" : counterexample});
  }

  return report;
}

}  // namespace csg
