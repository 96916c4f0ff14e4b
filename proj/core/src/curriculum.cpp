#include "csg/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "csg/text.hpp"

namespace csg {

std::string pacing_kind_name(PacingKind kind) {
  switch (kind) {
    case PacingKind::linear:
      return "linear";
    case PacingKind::root:
      return "root";
    case PacingKind::geometric:
      return "geometric";
  }
  throw std::logic_error("unknown pacing kind");
}

PacingKind parse_pacing_kind(const std::string& name) {
  if (name == "linear") return PacingKind::linear;
  if (name == "root") return PacingKind::root;
  if (name == "geometric") return PacingKind::geometric;
  throw std::invalid_argument("unknown pacing function: " + name);
}

void PacingParams::validate() const {
  if (!(lambda0 > 0.0) || lambda0 > 1.0) {
    throw std::invalid_argument("pacing lambda0 must lie in (0, 1]");
  }
  if (horizon < 1) {
    throw std::invalid_argument("pacing horizon must be >= 1");
  }
}

double pacing_value(const PacingParams& params, std::int64_t t) {
  params.validate();
  if (t < 0) {
    throw std::invalid_argument("pacing epoch must be >= 0");
  }
  if (t >= params.horizon) return 1.0;
  const double frac = static_cast<double>(t) / static_cast<double>(params.horizon);
  const double l0 = params.lambda0;
  double g = 1.0;
  switch (params.kind) {
    case PacingKind::linear:
      g = l0 + (1.0 - l0) * frac;
      break;
    case PacingKind::root:
      g = std::sqrt(l0 * l0 + (1.0 - l0 * l0) * frac);
      break;
    case PacingKind::geometric:
      g = std::pow(l0, 1.0 - frac);
      break;
  }
  return std::min(g, 1.0);
}

std::size_t CurriculumSchedule::prefix_size(std::int64_t t) const {
  const double g = pacing_value(params_, t);
  const double m = static_cast<double>(ordered_.size());
  auto len = static_cast<std::size_t>(std::ceil(g * m));
  return std::min(len, ordered_.size());
}

std::span<const SignedEdge> CurriculumSchedule::subset_at(std::int64_t t) const {
  return {ordered_.data(), prefix_size(t)};
}

CurriculumSchedule build_schedule(std::span<const SignedEdge> edges,
                                  const DifficultyMap& scores,
                                  const PacingParams& params) {
  params.validate();
  struct Keyed {
    Ratio score;
    SignedEdge edge;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(edges.size());
  for (const SignedEdge& e : edges) {
    const EdgeDifficulty* d = scores.find(e.u, e.v);
    if (d == nullptr) {
      throw std::invalid_argument("no difficulty score for edge " +
                                  std::to_string(e.u) + "-" + std::to_string(e.v));
    }
    keyed.push_back({d->score(), e});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    const auto cmp = a.score <=> b.score;
    if (cmp != 0) return cmp < 0;
    if (a.edge.u != b.edge.u) return a.edge.u < b.edge.u;
    return a.edge.v < b.edge.v;
  });
  std::vector<SignedEdge> ordered;
  ordered.reserve(keyed.size());
  for (const Keyed& k : keyed) ordered.push_back(k.edge);
  return {std::move(ordered), params};
}

void write_schedule_csv(const CurriculumSchedule& schedule, std::ostream& out) {
  out << "epoch,prefix_len,g_value\n";
  for (std::int64_t t = 0; t <= schedule.params().horizon; ++t) {
    out << t << ',' << schedule.prefix_size(t) << ','
        << format_double(pacing_value(schedule.params(), t)) << '\n';
  }
}

}  // namespace csg
