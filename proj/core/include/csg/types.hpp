#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace csg {

/// Dense node index. Ids are contiguous in [0, n) after ingestion.
using NodeId = std::uint32_t;

/// Edge sign; never zero. Zero-weight records are dropped at ingestion.
enum class Sign : std::int8_t { positive = 1, negative = -1 };

[[nodiscard]] constexpr int sign_value(Sign s) noexcept { return static_cast<int>(s); }

[[nodiscard]] constexpr Sign flipped(Sign s) noexcept {
  return s == Sign::positive ? Sign::negative : Sign::positive;
}

/// Sign product: positive iff both factors agree.
[[nodiscard]] constexpr Sign operator*(Sign a, Sign b) noexcept {
  return a == b ? Sign::positive : Sign::negative;
}

[[nodiscard]] constexpr char sign_char(Sign s) noexcept {
  return s == Sign::positive ? '+' : '-';
}

/// Undirected signed edge in canonical orientation (u < v).
struct SignedEdge {
  NodeId u = 0;
  NodeId v = 0;
  Sign sign = Sign::positive;

  /// Builds the canonical form of {a, b}; throws on a self-loop.
  static SignedEdge canonical(NodeId a, NodeId b, Sign s) {
    if (a == b) throw std::invalid_argument("self-loop edge (" + std::to_string(a) + ")");
    return a < b ? SignedEdge{a, b, s} : SignedEdge{b, a, s};
  }

  [[nodiscard]] bool operator==(const SignedEdge&) const = default;
  // Orders by (u, v, sign); a valid graph never holds two signs for one pair.
  [[nodiscard]] auto operator<=>(const SignedEdge&) const = default;
};

/// Exact non-negative rational. Keeps curriculum ordering platform-independent:
/// difficulty scores are triangle-count ratios and compare by cross products,
/// never through floating point.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ <= 0) throw std::invalid_argument("Ratio: denominator must be positive");
    if (num_ < 0) throw std::invalid_argument("Ratio: negative value");
    if (const auto g = std::gcd(num_, den_); g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  [[nodiscard]] std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] double value() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  [[nodiscard]] bool operator==(const Ratio& o) const noexcept {
    return num_ == o.num_ && den_ == o.den_;
  }
  [[nodiscard]] std::strong_ordering operator<=>(const Ratio& o) const noexcept {
    using Wide = __int128;
    const Wide lhs = static_cast<Wide>(num_) * o.den_;
    const Wide rhs = static_cast<Wide>(o.num_) * den_;
    return lhs < rhs ? std::strong_ordering::less
         : lhs > rhs ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Record parse failure; the message carries source name and line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ingestion produced no usable edge.
class EmptyEdgeSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace csg
