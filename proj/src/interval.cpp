#include "grafcet/interval.hpp"

#include <algorithm>
#include <array>

namespace grafcet {

Bound operator+(const Bound& a, const Bound& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return Bound::neg_inf();
  if (a.is_pos_inf() || b.is_pos_inf()) return Bound::pos_inf();
  std::int64_t r = 0;
  if (__builtin_add_overflow(a.value(), b.value(), &r))
    return a.value() > 0 ? Bound::pos_inf() : Bound::neg_inf();
  return r;
}

Bound operator*(const Bound& a, const Bound& b) {
  auto sign = [](const Bound& x) -> int {
    if (x.is_neg_inf()) return -1;
    if (x.is_pos_inf()) return 1;
    return x.value() < 0 ? -1 : (x.value() > 0 ? 1 : 0);
  };
  if (a.finite() && b.finite()) {
    std::int64_t r = 0;
    if (!__builtin_mul_overflow(a.value(), b.value(), &r)) return r;
  }
  const int s = sign(a) * sign(b);
  if (s == 0) return 0;  // 0 * inf
  return s > 0 ? Bound::pos_inf() : Bound::neg_inf();
}

Bound Bound::operator-() const {
  if (is_neg_inf()) return pos_inf();
  if (is_pos_inf()) return neg_inf();
  if (value_ == INT64_MIN) return pos_inf();
  return -value_;
}

std::string Bound::to_string() const {
  if (is_neg_inf()) return "-inf";
  if (is_pos_inf()) return "+inf";
  return std::to_string(value_);
}

Interval::Interval(Bound lo, Bound hi) : lo_(lo), hi_(hi), bottom_(false) {
  if (lo_ > hi_ || lo_.is_pos_inf() || hi_.is_neg_inf()) *this = bottom();
}

Interval Interval::bottom() { return Interval(BottomTag{}); }
Interval Interval::top() { return Interval(Bound::neg_inf(), Bound::pos_inf()); }

std::optional<std::int64_t> Interval::singleton() const {
  if (!bottom_ && lo_.finite() && lo_ == hi_) return lo_.value();
  return std::nullopt;
}

bool Interval::contains(std::int64_t v) const {
  return !bottom_ && lo_ <= Bound(v) && Bound(v) <= hi_;
}

Interval Interval::join(const Interval& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  return Interval(std::min(lo_, o.lo_), std::max(hi_, o.hi_));
}

Interval Interval::meet(const Interval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return Interval(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
}

bool Interval::leq(const Interval& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  return o.lo_ <= lo_ && hi_ <= o.hi_;
}

Interval Interval::widen(const Interval& next) const {
  if (bottom_) return next;
  if (next.bottom_) return *this;
  return Interval(next.lo_ < lo_ ? Bound::neg_inf() : lo_,
                  next.hi_ > hi_ ? Bound::pos_inf() : hi_);
}

namespace {
// A finite bound pushed past the int64 range stays at the range edge instead
// of crossing to the opposite infinity, which would empty the interval.
Interval clamped(Bound lo, Bound hi) {
  if (lo.is_pos_inf()) lo = INT64_MAX;
  if (hi.is_neg_inf()) hi = INT64_MIN;
  return Interval(lo, hi);
}
}  // namespace

Interval operator+(const Interval& a, const Interval& b) {
  if (a.bottom_ || b.bottom_) return Interval::bottom();
  return clamped(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

Interval Interval::operator-() const {
  if (bottom_) return bottom();
  return clamped(-hi_, -lo_);
}

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.bottom_ || b.bottom_) return Interval::bottom();
  const std::array<Bound, 4> c{a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
  return clamped(*std::min_element(c.begin(), c.end()), *std::max_element(c.begin(), c.end()));
}

bool operator==(const Interval& a, const Interval& b) {
  if (a.bottom_ || b.bottom_) return a.bottom_ == b.bottom_;
  return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

std::string Interval::to_string() const {
  if (bottom_) return "bottom";
  return "[" + lo_.to_string() + ", " + hi_.to_string() + "]";
}

std::string Interval::to_compact_string() const {
  if (bottom_) return "bottom";
  return "[" + lo_.to_string() + "," + hi_.to_string() + "]";
}

std::ostream& operator<<(std::ostream& os, const Interval& i) { return os << i.to_string(); }

}  // namespace grafcet
