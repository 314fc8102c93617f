#include <gtest/gtest.h>

#include <vector>

#include "grafcet/interval.hpp"

using namespace grafcet;

namespace {

// Every interval with bounds drawn from {-inf, -2..2, +inf}, plus bottom.
std::vector<Interval> universe() {
  std::vector<Bound> bounds{Bound::neg_inf(), -2, -1, 0, 1, 2, Bound::pos_inf()};
  std::vector<Interval> out{Interval::bottom()};
  for (const auto& lo : bounds)
    for (const auto& hi : bounds) {
      Interval i(lo, hi);
      if (!i.is_bottom()) out.push_back(i);
    }
  return out;
}

std::vector<Interval> finite_universe() {
  std::vector<Interval> out;
  for (int lo = -3; lo <= 3; ++lo)
    for (int hi = lo; hi <= 3; ++hi) out.emplace_back(lo, hi);
  return out;
}

}  // namespace

TEST(Interval, JoinMeetLaws) {
  const auto u = universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      EXPECT_EQ(a.join(b), b.join(a));
      EXPECT_EQ(a.meet(b), b.meet(a));
      EXPECT_EQ(a.join(a.meet(b)), a);  // absorption
      EXPECT_EQ(a.meet(a.join(b)), a);
      EXPECT_EQ(a.leq(b), a.join(b) == b);
      EXPECT_EQ(a.leq(b), a.meet(b) == a);
      EXPECT_TRUE(a.leq(a.join(b)));
      EXPECT_TRUE(a.meet(b).leq(a));
      for (const auto& c : u) {
        EXPECT_EQ(a.join(b).join(c), a.join(b.join(c)));
        EXPECT_EQ(a.meet(b).meet(c), a.meet(b.meet(c)));
      }
    }
}

TEST(Interval, BottomAndTopAreIdentities) {
  for (const auto& a : universe()) {
    EXPECT_EQ(a.join(Interval::bottom()), a);
    EXPECT_EQ(a.meet(Interval::top()), a);
    EXPECT_EQ(a.join(a), a);
    EXPECT_EQ(a.meet(a), a);
    EXPECT_TRUE(Interval::bottom().leq(a));
    EXPECT_TRUE(a.leq(Interval::top()));
  }
}

TEST(Interval, LeqIsPartialOrder) {
  const auto u = universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      if (a.leq(b) && b.leq(a)) {
        EXPECT_EQ(a, b);
      }
      for (const auto& c : u)
        if (a.leq(b) && b.leq(c)) {
          EXPECT_TRUE(a.leq(c));
        }
    }
}

TEST(Interval, WideningUpperBoundsJoin) {
  const auto u = universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      EXPECT_TRUE(a.join(b).leq(a.widen(a.join(b))));
      EXPECT_TRUE(a.leq(a.widen(b)));
    }
}

TEST(Interval, WideningStabilizesIncreasingChains) {
  // [0,0], [0,1], [0,2], ... reaches a fixpoint after one widening step.
  Interval acc = Interval::constant(0);
  int steps = 0;
  for (int i = 1; i < 100; ++i) {
    const Interval next = acc.join(Interval(0, i));
    const Interval w = acc.widen(next);
    if (w == acc) break;
    acc = w;
    ++steps;
  }
  EXPECT_EQ(acc, Interval(0, Bound::pos_inf()));
  EXPECT_LE(steps, 2);
}

TEST(Interval, ArithmeticSoundByEnumeration) {
  const auto u = finite_universe();
  for (const auto& a : u)
    for (const auto& b : u)
      for (auto x = a.lo().value(); x <= a.hi().value(); ++x)
        for (auto y = b.lo().value(); y <= b.hi().value(); ++y) {
          EXPECT_TRUE((a + b).contains(x + y));
          EXPECT_TRUE((a - b).contains(x - y));
          EXPECT_TRUE((a * b).contains(x * y));
          EXPECT_TRUE((-a).contains(-x));
        }
}

TEST(Interval, ArithmeticIsExactOnSingletons) {
  EXPECT_EQ(Interval::constant(2) + Interval::constant(3), Interval::constant(5));
  EXPECT_EQ(Interval(0, 2) + Interval::constant(1), Interval(1, 3));
  EXPECT_EQ(Interval(-1, 2) * Interval(-3, 1), Interval(-6, 3));
}

TEST(Interval, InfiniteBounds) {
  const Interval up(0, Bound::pos_inf());
  EXPECT_EQ(up + Interval::constant(1), Interval(1, Bound::pos_inf()));
  EXPECT_EQ(up * Interval::constant(0), Interval::constant(0));
  EXPECT_EQ(up * Interval::constant(-1), Interval(Bound::neg_inf(), 0));
  EXPECT_EQ(-Interval::top(), Interval::top());
}

TEST(Interval, SaturatesOnOverflow) {
  const Interval big = Interval::constant(INT64_MAX);
  EXPECT_EQ((big + Interval::constant(1)).hi(), Bound::pos_inf());
  EXPECT_EQ((big * Interval::constant(2)).hi(), Bound::pos_inf());
  EXPECT_EQ((Interval::constant(INT64_MIN) - Interval::constant(1)).lo(), Bound::neg_inf());
}

TEST(Interval, Bottom) {
  EXPECT_TRUE(Interval(3, 1).is_bottom());
  EXPECT_TRUE((Interval::bottom() + Interval::constant(1)).is_bottom());
  EXPECT_FALSE(Interval::bottom().contains(0));
  EXPECT_EQ(Interval::bottom().to_string(), "bottom");
}

TEST(Interval, Rendering) {
  EXPECT_EQ(Interval(0, 3).to_string(), "[0, 3]");
  EXPECT_EQ(Interval(3, 3).to_compact_string(), "[3,3]");
  EXPECT_EQ(Interval(0, Bound::pos_inf()).to_compact_string(), "[0,+inf]");
  EXPECT_EQ(Interval::top().to_string(), "[-inf, +inf]");
}
