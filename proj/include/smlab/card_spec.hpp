#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smlab {

/// Sign of a label: zero marks x = y; positive labels link elements that
/// semi-isolate each other; negative labels link them one way only.
enum class Sign { zero, positive, negative };

inline std::string to_string(Sign s) {
  switch (s) {
    case Sign::zero: return "zero";
    case Sign::positive: return "positive";
    case Sign::negative: return "negative";
  }
  return "?";
}

inline Sign sign_from_string(const std::string& s) {
  if (s == "zero") return Sign::zero;
  if (s == "positive") return Sign::positive;
  if (s == "negative") return Sign::negative;
  throw std::invalid_argument("unknown sign '" + s + "'");
}

/// Solution-set cardinality of a formula theta(a, y) for a fixed parameter a.
///
/// `Finite(k)` counts solutions. `Cofinite(m)` counts the elements of the
/// whole model that are NOT solutions. `InfiniteCoinfinite` only arises for
/// theories that are not strongly minimal.
class CardSpec {
 public:
  enum class Kind { finite, cofinite, infinite_coinfinite };

  static CardSpec finite(std::uint64_t k) { return {Kind::finite, k}; }
  static CardSpec cofinite(std::uint64_t excluded) { return {Kind::cofinite, excluded}; }
  static CardSpec infinite_coinfinite() { return {Kind::infinite_coinfinite, 0}; }

  Kind kind() const { return kind_; }
  std::uint64_t count() const { return count_; }

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_cofinite() const { return kind_ == Kind::cofinite; }
  bool is_infinite_coinfinite() const { return kind_ == Kind::infinite_coinfinite; }

  std::string str() const {
    switch (kind_) {
      case Kind::finite: return "Finite(" + std::to_string(count_) + ")";
      case Kind::cofinite: return "Cofinite(" + std::to_string(count_) + ")";
      case Kind::infinite_coinfinite: return "InfiniteCoinfinite";
    }
    return "?";
  }

  friend bool operator==(const CardSpec&, const CardSpec&) = default;

 private:
  CardSpec(Kind kind, std::uint64_t count) : kind_(kind), count_(count) {}

  Kind kind_;
  std::uint64_t count_;
};

}  // namespace smlab
