#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csg/signed_graph.hpp"
#include "csg/tensor.hpp"
#include "csg/types.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace csg;

namespace {

std::vector<EdgeRecord> records(std::initializer_list<EdgeRecord> rs) { return rs; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("canonical edge orients endpoints and rejects self-loops") {
  const SignedEdge e = SignedEdge::canonical(7, 2, Sign::negative);
  CHECK(e.u == 2);
  CHECK(e.v == 7);
  CHECK(e.sign == Sign::negative);
  CHECK_THROWS_AS(SignedEdge::canonical(3, 3, Sign::positive), std::invalid_argument);
}

TEST_CASE("sign algebra") {
  CHECK(Sign::positive * Sign::positive == Sign::positive);
  CHECK(Sign::negative * Sign::negative == Sign::positive);
  CHECK(Sign::positive * Sign::negative == Sign::negative);
  CHECK(flipped(Sign::positive) == Sign::negative);
  CHECK(sign_value(Sign::negative) == -1);
  CHECK(sign_char(Sign::positive) == '+');
}

TEST_CASE("Ratio reduces and compares exactly") {
  CHECK(Ratio{2, 6} == Ratio{1, 3});
  CHECK(Ratio{1, 3} < Ratio{1, 2});
  CHECK(Ratio{2, 3} > Ratio{1, 2});
  // A comparison that double arithmetic gets wrong: 1/3 vs 333333333/1000000000.
  CHECK(Ratio{333333333, 1000000000} < Ratio{1, 3});
  CHECK_THROWS_AS((Ratio{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS((Ratio{-1, 2}), std::invalid_argument);
}

TEST_CASE("from_edges builds sorted adjacency with sign per neighbor") {
  const SignedGraph g = SignedGraph::from_edges(
      4, {{0, 1, Sign::positive}, {1, 2, Sign::negative}, {0, 3, Sign::negative}});
  CHECK(g.node_count() == 4);
  CHECK(g.edges().size() == 3);
  REQUIRE(g.degree(0) == 2);
  CHECK(g.neighbors(0)[0] == SignedGraph::Neighbor{1, Sign::positive});
  CHECK(g.neighbors(0)[1] == SignedGraph::Neighbor{3, Sign::negative});
  CHECK(g.degree(2) == 1);
  CHECK(g.edge_sign(1, 2) == Sign::negative);
  CHECK(g.edge_sign(2, 1) == Sign::negative);  // query order does not matter
  CHECK_FALSE(g.edge_sign(0, 2).has_value());
  CHECK(g.edge_index(0, 3) == 1);  // canonical order: (0,1), (0,3), (1,2)
  CHECK_FALSE(g.edge_index(2, 3).has_value());
}

TEST_CASE("from_edges rejects malformed edge lists") {
  CHECK_THROWS_AS(SignedGraph::from_edges(3, {{1, 0, Sign::positive}}),
                  std::invalid_argument);  // not canonical
  CHECK_THROWS_AS(SignedGraph::from_edges(2, {{0, 2, Sign::positive}}),
                  std::invalid_argument);  // out of range
  CHECK_THROWS_AS(SignedGraph::from_edges(
                      3, {{0, 1, Sign::positive}, {0, 1, Sign::negative}}),
                  std::invalid_argument);  // duplicate pair
}

TEST_CASE("edge_counts and sign_flipped") {
  const SignedGraph g = SignedGraph::from_edges(
      4, {{0, 1, Sign::positive}, {1, 2, Sign::negative}, {2, 3, Sign::negative}});
  const EdgeCounts c = g.edge_counts();
  CHECK(c.total == 3);
  CHECK(c.positive == 1);
  CHECK(c.negative == 2);

  const SignedGraph f = g.sign_flipped();
  CHECK(f.node_count() == g.node_count());
  CHECK(f.edge_counts() == EdgeCounts{3, 2, 1});
  CHECK(f.edge_sign(0, 1) == Sign::negative);
  CHECK(f.edge_sign(1, 2) == Sign::positive);
  // Flipping twice restores the original.
  CHECK(f.sign_flipped().edges() == g.edges());
}

TEST_CASE("common_neighbors agrees with set intersection on random graphs") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const SignedGraph g = oracle::random_graph(40, 0.2, 0.3, rng);
    for (NodeId u = 0; u < 10; ++u) {
      for (NodeId v = u + 1; v < 10; ++v) {
        const auto got = common_neighbors(g, u, v);
        const auto want = oracle::common_neighbors(g, u, v);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i].node == want[i]);
          CHECK(got[i].sign_u == g.edge_sign(u, got[i].node));
          CHECK(got[i].sign_v == g.edge_sign(v, got[i].node));
        }
      }
    }
  }
}

TEST_CASE("ingest canonicalizes duplicates, conflicts, and junk records") {
  const auto recs = records({
      {0, 1, 2.5},    // edge 0-1 positive
      {1, 0, 1.0},    // duplicate of the same pair, same sign
      {1, 2, -3.0},   // edge 1-2 negative
      {2, 1, 4.0},    // conflicting sign: the pair is dropped
      {3, 3, 1.0},    // self-loop
      {0, 2, 0.0},    // zero weight
      {2, 3, -1.0},   // edge 2-3 negative
  });
  const IngestResult res = ingest(recs);
  CHECK(res.report.edges_in == 7);
  CHECK(res.report.dropped_self_loops == 1);
  CHECK(res.report.dropped_zero_weight == 1);
  CHECK(res.report.duplicates_merged == 1);
  CHECK(res.report.conflicts == 1);
  CHECK(res.report.nodes == 4);
  CHECK(res.report.edges_out == 2);
  CHECK(res.report.positive_edges == 1);
  CHECK(res.report.negative_edges == 1);
  CHECK(res.graph.edge_sign(0, 1) == Sign::positive);
  CHECK_FALSE(res.graph.has_edge(1, 2));  // conflicting pair dropped entirely
  CHECK(res.graph.edge_sign(2, 3) == Sign::negative);

  const std::string text = res.report.to_text();
  CHECK(text.find("conflicts 1") != std::string::npos);
  CHECK(text.find("edges_out 2") != std::string::npos);
}

TEST_CASE("ingest keeps ids that are already dense") {
  const auto recs = records({{2, 0, 1.0}, {1, 2, -1.0}});
  const IngestResult res = ingest(recs);
  CHECK(res.original_ids == std::vector<std::int64_t>{0, 1, 2});
  CHECK(res.graph.edge_sign(0, 2) == Sign::positive);
  CHECK(res.graph.edge_sign(1, 2) == Sign::negative);
}

TEST_CASE("ingest remaps sparse ids in first-appearance order") {
  const auto recs = records({{100, 7, 1.0}, {7, 42, -1.0}});
  const IngestResult res = ingest(recs);
  CHECK(res.original_ids == std::vector<std::int64_t>{100, 7, 42});
  CHECK(res.graph.node_count() == 3);
  CHECK(res.graph.edge_sign(0, 1) == Sign::positive);   // 100-7
  CHECK(res.graph.edge_sign(1, 2) == Sign::negative);   // 7-42
}

TEST_CASE("ingest throws when nothing survives") {
  CHECK_THROWS_AS(ingest(records({{1, 1, 1.0}, {0, 2, 0.0}})), EmptyEdgeSetError);
}

TEST_CASE("parse_edge_records handles whitespace, commas, comments, extra columns") {
  std::istringstream in(
      "# comment line\n"
      "0 1 4\n"
      "\n"
      "1,2,-1.5\n"
      "2 3 2.0 1407470400\n");  // trailing timestamp column ignored
  const auto recs = parse_edge_records(in, "test-input");
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].src == 0);
  CHECK(recs[0].dst == 1);
  CHECK(recs[0].weight == 4.0);
  CHECK(recs[1].weight == -1.5);
  CHECK(recs[2].src == 2);
  CHECK(recs[2].dst == 3);
}

TEST_CASE("parse_edge_records reports the offending line") {
  std::istringstream in("0 1 1\nnot numbers here\n");
  try {
    (void)parse_edge_records(in, "bad.txt");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.txt") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
}

TEST_CASE("serialize round-trips through save and load") {
  Rng rng(77);
  const SignedGraph g = oracle::random_graph(25, 0.3, 0.4, rng);
  const auto path = temp_file("csg_roundtrip.graph");
  save_graph(g, path.string());
  const SignedGraph back = load_graph(path.string());
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edges() == g.edges());
  std::filesystem::remove(path);

  // Serialized text is canonical: re-serializing the reload is identical.
  std::ostringstream first, second;
  g.serialize(first);
  back.serialize(second);
  CHECK(first.str() == second.str());
}

TEST_CASE("load_graph fails loudly on a missing file") {
  CHECK_THROWS_AS((void)load_graph("/nonexistent/definitely-not-here.graph"),
                  ParseError);
}
