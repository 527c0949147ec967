#pragma once

#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>

namespace incwcet {

// Analysis values form a bounded lattice. The analyzer is written against
// this shape; instances that additionally support `accumulate` (extending a
// suffix value by an exact prefix cost) can drive the worst-case timing
// engine. Plugging in another instance is a compile-time substitution; a
// type without `accumulate` is rejected by the AccumulatingLattice check.
template <typename R>
concept QuantitativeLattice = requires(R a, R b) {
  { R::bottom() } -> std::same_as<R>;
  { R::top() } -> std::same_as<R>;
  { join(a, b) } -> std::same_as<R>;
  { meet(a, b) } -> std::same_as<R>;
  { leq(a, b) } -> std::same_as<bool>;
};

template <typename R>
concept AccumulatingLattice = QuantitativeLattice<R> && requires(R a, R b) {
  { accumulate(a, b) } -> std::same_as<R>;
};

// Worst-case cycle counts: naturals plus infinity, ordered by <=, joined by
// max. bottom = 0, top = infinity.
class WcetValue {
 public:
  constexpr WcetValue() = default;
  constexpr explicit WcetValue(uint64_t v) : raw_(v) {}

  static constexpr WcetValue bottom() { return WcetValue(0); }
  static constexpr WcetValue top() { return WcetValue(kInf); }
  static constexpr WcetValue infinity() { return top(); }

  constexpr bool is_infinite() const { return raw_ == kInf; }
  constexpr uint64_t value() const { return raw_; }

  friend constexpr bool operator==(WcetValue, WcetValue) = default;

 private:
  static constexpr uint64_t kInf = UINT64_MAX;
  uint64_t raw_ = 0;
};

constexpr bool leq(WcetValue a, WcetValue b) { return a.value() <= b.value(); }

constexpr WcetValue join(WcetValue a, WcetValue b) {
  return a.value() >= b.value() ? a : b;
}

constexpr WcetValue meet(WcetValue a, WcetValue b) {
  return a.value() <= b.value() ? a : b;
}

// Saturating addition: prefix extension of a suffix analysis. Infinity
// absorbs; bottom (0) is the identity.
constexpr WcetValue accumulate(WcetValue a, WcetValue b) {
  if (a.is_infinite() || b.is_infinite()) return WcetValue::infinity();
  uint64_t s = a.value() + b.value();
  if (s < a.value()) return WcetValue::infinity();
  return WcetValue(s);
}

static_assert(AccumulatingLattice<WcetValue>);

std::string to_string(WcetValue v);

inline std::ostream& operator<<(std::ostream& os, WcetValue v) {
  return os << to_string(v);
}

inline std::string to_string(WcetValue v) {
  return v.is_infinite() ? "inf" : std::to_string(v.value());
}

}  // namespace incwcet
