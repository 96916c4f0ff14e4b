#include "csg/cycle_census.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>

#include "csg/text.hpp"

namespace csg {

const EdgeDifficulty* DifficultyMap::find(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), std::pair{u, v},
      [](const EdgeDifficulty& d, const std::pair<NodeId, NodeId>& key) {
        return std::pair{d.edge.u, d.edge.v} < key;
      });
  if (it != entries_.end() && it->edge.u == u && it->edge.v == v) return &*it;
  return nullptr;
}

void for_each_triangle(const SignedGraph& g, const std::function<void(const Triangle&)>& visit) {
  // Each triangle i<j<k surfaces exactly once: at edge (i,j) with common
  // neighbor k > j. Edges are sorted, merges ascend, so emission order is
  // sorted by (i,j,k).
  for (const SignedEdge& e : g.edges()) {
    const auto a = g.neighbors(e.u);
    const auto b = g.neighbors(e.v);
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].first < b[j].first) {
        ++i;
      } else if (b[j].first < a[i].first) {
        ++j;
      } else {
        const NodeId w = a[i].first;
        if (w > e.v) visit(Triangle{e.u, e.v, w, e.sign, b[j].second, a[i].second});
        ++i;
        ++j;
      }
    }
  }
}

std::vector<Triangle> enumerate_triangles(const SignedGraph& g) {
  std::vector<Triangle> out;
  for_each_triangle(g, [&](const Triangle& t) { out.push_back(t); });
  return out;
}

Ratio local_balance_degree(const SignedGraph& g, NodeId u, NodeId v) {
  const auto sign = g.edge_sign(u, v);
  if (!sign) {
    throw std::invalid_argument("local_balance_degree: edge (" + std::to_string(u) + "," +
                                std::to_string(v) + ") not in graph");
  }
  std::int64_t total = 0;
  std::int64_t balanced = 0;
  for (const CommonNeighbor& c : common_neighbors(g, u, v)) {
    ++total;
    if ((*sign * c.sign_u) * c.sign_v == Sign::positive) ++balanced;
  }
  if (total == 0) return Ratio{1, 1};  // triangle-free edges count as fully balanced
  return Ratio{balanced, total};
}

DifficultyMap difficulty_scores(const SignedGraph& g) {
  std::vector<EdgeDifficulty> entries;
  entries.reserve(g.edges().size());
  for (const SignedEdge& e : g.edges()) entries.push_back(EdgeDifficulty{e, 0, 0});

  for_each_triangle(g, [&](const Triangle& t) {
    const bool balanced = t.balanced();
    for (const auto& [a, b] : {std::pair{t.i, t.j}, std::pair{t.j, t.k}, std::pair{t.i, t.k}}) {
      const auto idx = g.edge_index(a, b);
      EdgeDifficulty& d = entries[*idx];
      ++d.total_triangles;
      if (balanced) ++d.balanced_triangles;
    }
  });
  return DifficultyMap{std::move(entries)};
}

namespace {

// Path DFS from one start node. Only ids above the start may enter the path,
// and a cycle closes only when the second node is smaller than the last, so
// each simple cycle is recorded once in its canonical direction.
class CycleWalker {
 public:
  CycleWalker(const SignedGraph& g, int max_n) : g_(g), max_n_(max_n), on_path_(g.node_count(), 0) {}

  void run(NodeId start, CycleCensus& out) {
    start_ = start;
    path_.clear();
    path_.push_back(start);
    on_path_[start] = 1;
    extend(start, 0, out);
    on_path_[start] = 0;
  }

 private:
  void extend(NodeId tail, int neg_parity, CycleCensus& out) {
    for (const auto& [next, sign] : g_.neighbors(tail)) {
      if (next <= start_ || on_path_[next]) continue;
      const int parity = neg_parity + (sign == Sign::negative ? 1 : 0);
      path_.push_back(next);
      const int len = static_cast<int>(path_.size());
      if (len >= 3 && path_[1] < next) {
        if (const auto closing = g_.edge_sign(next, start_)) {
          const int cycle_parity = parity + (*closing == Sign::negative ? 1 : 0);
          auto& row = out.at(len);
          ++row.total;
          if (cycle_parity % 2 == 0)
            ++row.balanced;
          else
            ++row.unbalanced;
        }
      }
      if (len < max_n_) {
        on_path_[next] = 1;
        extend(next, parity, out);
        on_path_[next] = 0;
      }
      path_.pop_back();
    }
  }

  const SignedGraph& g_;
  const int max_n_;
  NodeId start_ = 0;
  std::vector<NodeId> path_;
  std::vector<char> on_path_;
};

}  // namespace

CycleCensus census(const SignedGraph& g, int max_n, unsigned threads) {
  if (max_n < 3 || max_n > 6) throw std::invalid_argument("census: max_n must be in [3, 6]");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const NodeId n = g.node_count();
  threads = std::min<unsigned>(threads, std::max<NodeId>(n, 1));

  // Start nodes partition round-robin; per-partition integer counts reduce by
  // summation in worker order, so the result never depends on scheduling.
  std::vector<CycleCensus> partial(threads);
  for (auto& c : partial) c.max_n = max_n;

  auto work = [&](unsigned tid) {
    CycleWalker walker(g, max_n);
    for (NodeId s = tid; s < n; s += threads) walker.run(s, partial[tid]);
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
    for (auto& t : pool) t.join();
  }

  CycleCensus total;
  total.max_n = max_n;
  for (const CycleCensus& part : partial) {
    for (int len = 3; len <= max_n; ++len) {
      total.at(len).total += part.at(len).total;
      total.at(len).balanced += part.at(len).balanced;
      total.at(len).unbalanced += part.at(len).unbalanced;
    }
  }
  return total;
}

std::string BalanceRatioReport::ratio_text() const {
  if (infinite) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", ratio);
  return buf;
}

BalanceRatioReport balance_ratio_report(const SignedGraph& g, std::span<const SignedEdge> subset) {
  std::vector<SignedEdge> edges;
  edges.reserve(subset.size());
  for (const SignedEdge& e : subset) {
    const auto sign = g.edge_sign(e.u, e.v);
    if (!sign) {
      throw std::invalid_argument("balance_ratio_report: subset edge (" + std::to_string(e.u) +
                                  "," + std::to_string(e.v) + ") not in graph");
    }
    edges.push_back(SignedEdge::canonical(e.u, e.v, *sign));
  }
  const SignedGraph sub = SignedGraph::from_edges(g.node_count(), std::move(edges));

  BalanceRatioReport rep;
  for_each_triangle(sub, [&](const Triangle& t) {
    if (t.balanced())
      ++rep.balanced;
    else
      ++rep.unbalanced;
  });
  if (rep.unbalanced == 0) {
    rep.infinite = true;
  } else {
    rep.ratio = static_cast<double>(rep.balanced) / static_cast<double>(rep.unbalanced);
  }
  return rep;
}

void write_scores_csv(const DifficultyMap& scores, std::ostream& out) {
  out << "u,v,sign,total_triangles,balanced_triangles,score\n";
  for (const EdgeDifficulty& d : scores.entries()) {
    out << d.edge.u << ',' << d.edge.v << ',' << sign_value(d.edge.sign) << ','
        << d.total_triangles << ',' << d.balanced_triangles << ','
        << format_double(d.score().value()) << '\n';
  }
}

std::string census_to_json(const CycleCensus& c) {
  std::string out = "{";
  for (int len = 3; len <= c.max_n; ++len) {
    const auto& row = c.at(len);
    if (len > 3) out += ", ";
    out += "\"" + std::to_string(len) + "\": {\"total\": " + std::to_string(row.total) +
           ", \"balanced\": " + std::to_string(row.balanced) +
           ", \"unbalanced\": " + std::to_string(row.unbalanced) + "}";
  }
  out += "}";
  return out;
}

}  // namespace csg
