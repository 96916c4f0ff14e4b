#include "csg/signed_graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace csg {

std::string IngestReport::to_text() const {
  std::ostringstream out;
  out << "edges_in " << edges_in << '\n'
      << "dropped_self_loops " << dropped_self_loops << '\n'
      << "dropped_zero_weight " << dropped_zero_weight << '\n'
      << "duplicates_merged " << duplicates_merged << '\n'
      << "conflicts " << conflicts << '\n'
      << "nodes " << nodes << '\n'
      << "edges_out " << edges_out << '\n'
      << "positive_edges " << positive_edges << '\n'
      << "negative_edges " << negative_edges << '\n';
  return out.str();
}

SignedGraph SignedGraph::from_edges(NodeId n, std::vector<SignedEdge> edges) {
  std::sort(edges.begin(), edges.end(),
            [](const SignedEdge& a, const SignedEdge& b) { return std::pair{a.u, a.v} < std::pair{b.u, b.v}; });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.u >= e.v) throw std::invalid_argument("edge not canonical: requires u < v");
    if (e.v >= n) throw std::invalid_argument("edge endpoint out of node range");
    if (i > 0 && edges[i - 1].u == e.u && edges[i - 1].v == e.v)
      throw std::invalid_argument("duplicate edge in edge list");
  }

  SignedGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + deg[u];
  g.adj_.resize(g.offsets_[n]);

  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adj_[cursor[e.u]++] = {e.v, e.sign};
    g.adj_[cursor[e.v]++] = {e.u, e.sign};
  }
  for (NodeId u = 0; u < n; ++u) {
    std::sort(g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
              g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.first < b.first; });
  }
  return g;
}

std::optional<Sign> SignedGraph::edge_sign(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                                   [](const Neighbor& a, NodeId id) { return a.first < id; });
  if (it != nbrs.end() && it->first == v) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> SignedGraph::edge_index(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  const auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair{u, v}, [](const SignedEdge& e, const std::pair<NodeId, NodeId>& key) {
        return std::pair{e.u, e.v} < key;
      });
  if (it != edges_.end() && it->u == u && it->v == v)
    return static_cast<std::size_t>(it - edges_.begin());
  return std::nullopt;
}

EdgeCounts SignedGraph::edge_counts() const {
  EdgeCounts c;
  c.total = edges_.size();
  for (const auto& e : edges_)
    if (e.sign == Sign::positive) ++c.positive;
  c.negative = c.total - c.positive;
  return c;
}

SignedGraph SignedGraph::sign_flipped() const {
  std::vector<SignedEdge> flipped_edges = edges_;
  for (auto& e : flipped_edges) e.sign = flipped(e.sign);
  return from_edges(n_, std::move(flipped_edges));
}

void SignedGraph::serialize(std::ostream& out) const {
  for (const auto& e : edges_)
    out << e.u << ' ' << e.v << ' ' << (e.sign == Sign::positive ? "1" : "-1") << '\n';
}

std::vector<CommonNeighbor> common_neighbors(const SignedGraph& g, NodeId u, NodeId v) {
  if (u == v) throw std::invalid_argument("common_neighbors: endpoints must differ");
  std::vector<CommonNeighbor> out;
  const auto a = g.neighbors(u);
  const auto b = g.neighbors(v);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      out.push_back({a[i].first, a[i].second, b[j].second});
      ++i;
      ++j;
    }
  }
  return out;
}

namespace {

struct PairState {
  std::size_t first_record = 0;
  std::int64_t src = 0;  // orientation of the first record, for id ordering
  std::int64_t dst = 0;
  Sign sign = Sign::positive;
  bool conflict = false;
};

}  // namespace

IngestResult ingest(std::span<const EdgeRecord> records) {
  IngestResult result;
  IngestReport& rep = result.report;
  rep.edges_in = records.size();

  std::map<std::pair<std::int64_t, std::int64_t>, PairState> pairs;
  for (std::size_t idx = 0; idx < records.size(); ++idx) {
    const EdgeRecord& r = records[idx];
    if (r.src == r.dst) {
      ++rep.dropped_self_loops;
      continue;
    }
    if (r.weight == 0.0) {
      ++rep.dropped_zero_weight;
      continue;
    }
    const Sign s = r.weight > 0 ? Sign::positive : Sign::negative;
    const auto key = std::minmax(r.src, r.dst);
    auto [it, inserted] = pairs.try_emplace(key, PairState{idx, r.src, r.dst, s, false});
    if (!inserted) {
      if (it->second.sign != s)
        it->second.conflict = true;
      else
        ++rep.duplicates_merged;
    }
  }

  std::vector<const PairState*> survivors;
  survivors.reserve(pairs.size());
  for (const auto& [key, st] : pairs) {
    if (st.conflict)
      ++rep.conflicts;
    else
      survivors.push_back(&st);
  }
  if (survivors.empty()) throw EmptyEdgeSetError("ingest: no usable edges after canonicalization");

  std::sort(survivors.begin(), survivors.end(),
            [](const PairState* a, const PairState* b) { return a->first_record < b->first_record; });

  // Dense inputs keep their ids so canonical files round-trip unchanged;
  // sparse raw ids are remapped in first-appearance order.
  std::vector<std::int64_t> seen;
  seen.reserve(survivors.size() * 2);
  for (const PairState* st : survivors) {
    seen.push_back(st->src);
    seen.push_back(st->dst);
  }
  std::vector<std::int64_t> distinct = seen;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const bool already_dense =
      distinct.front() == 0 && distinct.back() == static_cast<std::int64_t>(distinct.size()) - 1;

  std::unordered_map<std::int64_t, NodeId> id_map;
  id_map.reserve(distinct.size());
  if (already_dense) {
    for (const std::int64_t id : distinct) id_map.emplace(id, static_cast<NodeId>(id));
    result.original_ids.assign(distinct.begin(), distinct.end());
  } else {
    for (const std::int64_t id : seen) {
      if (id_map.try_emplace(id, static_cast<NodeId>(result.original_ids.size())).second)
        result.original_ids.push_back(id);
    }
  }

  std::vector<SignedEdge> edges;
  edges.reserve(survivors.size());
  for (const PairState* st : survivors)
    edges.push_back(SignedEdge::canonical(id_map.at(st->src), id_map.at(st->dst), st->sign));

  result.graph = SignedGraph::from_edges(static_cast<NodeId>(result.original_ids.size()), std::move(edges));
  rep.nodes = result.original_ids.size();
  const EdgeCounts counts = result.graph.edge_counts();
  rep.edges_out = counts.total;
  rep.positive_edges = counts.positive;
  rep.negative_edges = counts.negative;
  return result;
}

std::vector<EdgeRecord> parse_edge_records(std::istream& in, const std::string& source) {
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream row(line);
    EdgeRecord rec;
    if (!(row >> rec.src >> rec.dst >> rec.weight)) {
      throw ParseError(source + ":" + std::to_string(line_no) +
                       ": malformed record, expected `src dst weight`");
    }
    records.push_back(rec);
  }
  return records;
}

IngestResult ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  const auto records = parse_edge_records(in, path);
  return ingest(records);
}

SignedGraph load_graph(const std::string& path) { return ingest_file(path).graph; }

void save_graph(const SignedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  g.serialize(out);
}

}  // namespace csg
