#include <cmath>
#include <sstream>
#include <vector>

#include "csg/curriculum.hpp"
#include "csg/cycle_census.hpp"
#include "csg/tensor.hpp"
#include "doctest.h"

using namespace csg;

namespace {

PacingParams params(PacingKind kind, double lambda0, std::int64_t horizon) {
  PacingParams p;
  p.kind = kind;
  p.lambda0 = lambda0;
  p.horizon = horizon;
  return p;
}

// A difficulty map with the given (edge, score) rows; scores are built as
// unbalanced/total triangle counts.
DifficultyMap map_of(std::vector<std::pair<SignedEdge, Ratio>> rows) {
  std::vector<EdgeDifficulty> entries;
  for (auto& [edge, score] : rows) {
    EdgeDifficulty d;
    d.edge = edge;
    d.total_triangles = static_cast<std::uint64_t>(score.den());
    d.balanced_triangles = static_cast<std::uint64_t>(score.den() - score.num());
    entries.push_back(d);
  }
  std::sort(entries.begin(), entries.end(),
            [](const EdgeDifficulty& a, const EdgeDifficulty& b) { return a.edge < b.edge; });
  return DifficultyMap{std::move(entries)};
}

}  // namespace

TEST_CASE("every pacing family starts at lambda0 and saturates at the horizon") {
  for (const PacingKind kind :
       {PacingKind::linear, PacingKind::root, PacingKind::geometric}) {
    for (const double l0 : {0.05, 0.25, 0.6, 1.0}) {
      const PacingParams p = params(kind, l0, 20);
      CHECK(pacing_value(p, 0) == doctest::Approx(l0).epsilon(1e-12));
      CHECK(pacing_value(p, 20) == 1.0);   // exactly one at the horizon
      CHECK(pacing_value(p, 21) == 1.0);   // and beyond
      CHECK(pacing_value(p, 1000) == 1.0);
      double prev = 0.0;
      for (std::int64_t t = 0; t <= 25; ++t) {
        const double g = pacing_value(p, t);
        CHECK(g >= prev);
        CHECK(g <= 1.0);
        prev = g;
      }
    }
  }
}

TEST_CASE("closed-form pacing values at the halfway epoch") {
  // lambda0 = 0.25, T = 20, t = 10.
  CHECK(pacing_value(params(PacingKind::linear, 0.25, 20), 10) ==
        doctest::Approx(0.625).epsilon(1e-12));
  // sqrt(0.0625 + 0.9375 * 0.5) = sqrt(0.53125)
  CHECK(pacing_value(params(PacingKind::root, 0.25, 20), 10) ==
        doctest::Approx(std::sqrt(0.53125)).epsilon(1e-12));
  // 0.25^(1 - 0.5) = 0.5
  CHECK(pacing_value(params(PacingKind::geometric, 0.25, 20), 10) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("between the endpoints, root runs above linear and geometric below") {
  // Both families agree with linear at t = 0 and t = T. In between, root is
  // concave (above its chord, which is the linear family) and geometric is
  // convex (below it): root front-loads data, geometric back-loads it.
  const double l0 = 0.25;
  for (std::int64_t t = 1; t < 20; ++t) {
    const double lin = pacing_value(params(PacingKind::linear, l0, 20), t);
    const double rt = pacing_value(params(PacingKind::root, l0, 20), t);
    const double geo = pacing_value(params(PacingKind::geometric, l0, 20), t);
    CHECK(rt > lin);
    CHECK(geo < lin);
  }
}

TEST_CASE("pacing rejects bad parameters") {
  CHECK_THROWS_AS((void)pacing_value(params(PacingKind::linear, 0.0, 20), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pacing_value(params(PacingKind::linear, 1.2, 20), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pacing_value(params(PacingKind::linear, 0.5, 0), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pacing_value(params(PacingKind::linear, 0.5, 20), -1),
                  std::invalid_argument);
}

TEST_CASE("pacing kind names round-trip and reject unknowns") {
  for (const PacingKind kind :
       {PacingKind::linear, PacingKind::root, PacingKind::geometric}) {
    CHECK(parse_pacing_kind(pacing_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS((void)parse_pacing_kind("sigmoid"), std::invalid_argument);
}

TEST_CASE("build_schedule orders easiest first with deterministic tie-breaks") {
  const std::vector<SignedEdge> edges{
      {0, 1, Sign::positive}, {0, 2, Sign::positive}, {1, 2, Sign::negative},
      {2, 3, Sign::positive}, {0, 3, Sign::negative}};
  const DifficultyMap scores = map_of({
      {{0, 1, Sign::positive}, Ratio{1, 3}},
      {{0, 2, Sign::positive}, Ratio{0, 1}},
      {{1, 2, Sign::negative}, Ratio{1, 2}},
      {{2, 3, Sign::positive}, Ratio{1, 3}},   // ties with (0,1); (0,1) first
      {{0, 3, Sign::negative}, Ratio{0, 1}},   // ties with (0,2); (0,2) first
  });
  const CurriculumSchedule s =
      build_schedule(edges, scores, params(PacingKind::linear, 0.25, 20));
  const auto& ordered = s.ordered_edges();
  REQUIRE(ordered.size() == 5);
  CHECK(ordered[0] == SignedEdge{0, 2, Sign::positive});
  CHECK(ordered[1] == SignedEdge{0, 3, Sign::negative});
  CHECK(ordered[2] == SignedEdge{0, 1, Sign::positive});
  CHECK(ordered[3] == SignedEdge{2, 3, Sign::positive});
  CHECK(ordered[4] == SignedEdge{1, 2, Sign::negative});
}

TEST_CASE("build_schedule demands a score for every edge") {
  const std::vector<SignedEdge> edges{{0, 1, Sign::positive}};
  const DifficultyMap empty;
  CHECK_THROWS_AS(
      (void)build_schedule(edges, empty, params(PacingKind::linear, 0.25, 20)),
      std::invalid_argument);
}

TEST_CASE("prefix sizes take the ceiling and are clamped to the edge count") {
  std::vector<SignedEdge> edges;
  for (NodeId i = 0; i < 7; ++i) edges.push_back({i, static_cast<NodeId>(i + 10), Sign::positive});
  // horizon 2 with lambda0 0.5: g(0) = 0.5, g(1) = 0.75, g(2) = 1.
  const CurriculumSchedule s{std::vector<SignedEdge>(edges),
                             params(PacingKind::linear, 0.5, 2)};
  CHECK(s.prefix_size(0) == 4);  // ceil(3.5)
  CHECK(s.prefix_size(1) == 6);  // ceil(5.25)
  CHECK(s.prefix_size(2) == 7);
  CHECK(s.prefix_size(50) == 7);
  CHECK(s.subset_at(0).size() == 4);
  CHECK(s.subset_at(0).data() == s.ordered_edges().data());  // a true prefix
}

TEST_CASE("subsets are nested as epochs advance") {
  std::vector<SignedEdge> edges;
  for (NodeId i = 0; i < 23; ++i) edges.push_back({i, static_cast<NodeId>(i + 100), Sign::positive});
  const CurriculumSchedule s{std::move(edges), params(PacingKind::root, 0.1, 13)};
  for (std::int64_t t = 0; t < 13; ++t) {
    CHECK(s.prefix_size(t) <= s.prefix_size(t + 1));
  }
}

TEST_CASE("schedule CSV lists one row per epoch through the horizon") {
  std::vector<SignedEdge> edges;
  for (NodeId i = 0; i < 4; ++i) edges.push_back({i, static_cast<NodeId>(i + 5), Sign::positive});
  const CurriculumSchedule s{std::move(edges), params(PacingKind::linear, 0.5, 2)};
  std::ostringstream out;
  write_schedule_csv(s, out);
  CHECK(out.str() ==
        "epoch,prefix_len,g_value\n"
        "0,2,0.5\n"
        "1,3,0.75\n"
        "2,4,1\n");
}
