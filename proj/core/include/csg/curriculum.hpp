#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "csg/cycle_census.hpp"
#include "csg/signed_graph.hpp"
#include "csg/types.hpp"

namespace csg {

// Pacing function families. Each maps an epoch index t to the fraction of the
// training set (ordered easy-to-hard) that is visible at that epoch.
enum class PacingKind {
  linear,
  root,
  geometric,
};

std::string pacing_kind_name(PacingKind kind);
PacingKind parse_pacing_kind(const std::string& name);

struct PacingParams {
  PacingKind kind = PacingKind::linear;
  double lambda0 = 0.25;  // initial fraction, in (0, 1]
  std::int64_t horizon = 20;  // epochs until the full set is visible, >= 1

  void validate() const;  // throws std::invalid_argument on bad values
};

// g(t) for the given pacing family. Guarantees:
//   - g(t) == lambda0 at t == 0 for every family
//   - g(t) == 1 exactly for every t >= horizon
//   - monotonically non-decreasing in t
double pacing_value(const PacingParams& params, std::int64_t t);

// A full easy-to-hard ordering of the training edges plus the pacing rule
// that reveals prefixes of it.
class CurriculumSchedule {
 public:
  CurriculumSchedule() = default;
  CurriculumSchedule(std::vector<SignedEdge> ordered, PacingParams params)
      : ordered_(std::move(ordered)), params_(params) {}

  const std::vector<SignedEdge>& ordered_edges() const { return ordered_; }
  const PacingParams& params() const { return params_; }

  // Number of edges visible at epoch t: ceil(g(t) * |E|).
  std::size_t prefix_size(std::int64_t t) const;

  // The visible prefix at epoch t, a view into the stored ordering.
  std::span<const SignedEdge> subset_at(std::int64_t t) const;

 private:
  std::vector<SignedEdge> ordered_;
  PacingParams params_;
};

// Sorts edges by (difficulty score ascending, u, v) using exact rational
// comparison of the scores; ties in score never depend on floating point.
// Throws std::invalid_argument if an edge has no entry in `scores`.
CurriculumSchedule build_schedule(std::span<const SignedEdge> edges,
                                  const DifficultyMap& scores,
                                  const PacingParams& params);

// Writes one row per epoch: "epoch,prefix_len,g_value" (header included),
// for t in [0, params.horizon].
void write_schedule_csv(const CurriculumSchedule& schedule, std::ostream& out);

}  // namespace csg
