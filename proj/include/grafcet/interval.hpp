#pragma once

// Integer intervals with infinite bounds and a distinguished empty element.

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace grafcet {

class Bound {
 public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  constexpr Bound(std::int64_t v) : kind_(Kind::Finite), value_(v) {}  // NOLINT
  static constexpr Bound neg_inf() { return Bound(Kind::NegInf); }
  static constexpr Bound pos_inf() { return Bound(Kind::PosInf); }

  constexpr bool finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr Kind kind() const { return kind_; }
  constexpr std::int64_t value() const { return value_; }

  friend constexpr std::strong_ordering operator<=>(const Bound& a, const Bound& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }
  friend constexpr bool operator==(const Bound& a, const Bound& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

  // Saturating: overflowing results become the matching infinity.
  friend Bound operator+(const Bound& a, const Bound& b);
  friend Bound operator*(const Bound& a, const Bound& b);
  Bound operator-() const;

  std::string to_string() const;

 private:
  constexpr explicit Bound(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  std::int64_t value_;
};

class Interval {
 public:
  Interval() : Interval(bottom()) {}
  Interval(Bound lo, Bound hi);  // empty when lo > hi

  static Interval bottom();
  static Interval top();
  static Interval constant(std::int64_t v) { return Interval(v, v); }
  static Interval boolean() { return Interval(0, 1); }

  bool is_bottom() const { return bottom_; }
  bool is_top() const { return !bottom_ && lo_.is_neg_inf() && hi_.is_pos_inf(); }
  const Bound& lo() const { return lo_; }
  const Bound& hi() const { return hi_; }
  std::optional<std::int64_t> singleton() const;
  bool contains(std::int64_t v) const;

  Interval join(const Interval& o) const;
  Interval meet(const Interval& o) const;
  bool leq(const Interval& o) const;
  // Bounds that grew since `*this` jump to infinity.
  Interval widen(const Interval& next) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  Interval operator-() const;

  friend bool operator==(const Interval& a, const Interval& b);

  /// `[lo, hi]`, `-inf`/`+inf`, `bottom`.
  std::string to_string() const;
  /// `[lo,hi]`, the table form used in reports.
  std::string to_compact_string() const;

 private:
  struct BottomTag {};
  explicit Interval(BottomTag) : lo_(Bound::pos_inf()), hi_(Bound::neg_inf()), bottom_(true) {}
  Bound lo_;
  Bound hi_;
  bool bottom_;
};

inline Interval join(const Interval& a, const Interval& b) { return a.join(b); }
inline Interval meet(const Interval& a, const Interval& b) { return a.meet(b); }
inline bool leq(const Interval& a, const Interval& b) { return a.leq(b); }
inline Interval widen(const Interval& old, const Interval& next) { return old.widen(next); }

std::ostream& operator<<(std::ostream& os, const Interval& i);

}  // namespace grafcet
