#include <gtest/gtest.h>

#include <map>

#include "grafcet/domain.hpp"
#include "support/random_model.hpp"

using namespace grafcet;

namespace {

LayoutPtr layout() {
  return std::make_shared<const VarLayout>(std::vector<std::string>{"k", "m", "f"},
                                           std::vector<Sort>{Sort::Integer, Sort::Integer, Sort::Boolean});
}

Grafcet vocabulary() { return grafcet::testing::ModelGen(0).grafcet(); }

// Step 1 is known active, step 2 known inactive, step 3 unknown.
DomainContext context(const Grafcet& g) {
  auto ctx = DomainContext::for_grafcet(g);
  ctx.step_truth = [](const StepRef& s) {
    return s.step == 1 ? Truth::True : s.step == 2 ? Truth::False : Truth::Unknown;
  };
  return ctx;
}

struct Point : Valuation {
  std::map<std::string, std::int64_t> vars;
  bool step3 = false, edge_value = false;
  std::int64_t value(const std::string& v) const override { return vars.at(v); }
  bool step_active(const StepRef& s) const override { return s.step == 1 || (s.step == 3 && step3); }
  bool edge(EdgeDir, const Expr&) const override { return edge_value; }
};

bool inside(const AbstractEnv& env, const Point& p) {
  if (env.is_bottom()) return false;
  return env.get(0).contains(p.vars.at("k")) && env.get(1).contains(p.vars.at("m")) &&
         env.get(2).contains(p.vars.at("f"));
}

AbstractEnv random_env(grafcet::testing::ModelGen& gen) {
  auto env = AbstractEnv::top(layout());
  auto range = [&] {
    const int lo = gen.pick(-2, 2);
    return Interval(lo, lo + gen.pick(0, 2));
  };
  env.set(0, range());
  env.set(1, range());
  const int f = gen.pick(0, 2);
  env.set(2, f == 2 ? Interval::boolean() : Interval::constant(f));
  return env;
}

// Every concrete point of `env` combined with every input valuation.
template <typename F>
void for_each_point(const AbstractEnv& env, F&& f) {
  Point p;
  auto lo = [&](std::size_t i) { return env.get(i).lo().value(); };
  auto hi = [&](std::size_t i) { return env.get(i).hi().value(); };
  for (auto k = lo(0); k <= hi(0); ++k)
    for (auto m = lo(1); m <= hi(1); ++m)
      for (auto fl = lo(2); fl <= hi(2); ++fl)
        for (int a = 0; a <= 1; ++a)
          for (int b = 0; b <= 1; ++b)
            for (int n = -1; n <= 3; ++n)
              for (int s = 0; s < 4; ++s) {
                p.vars = {{"k", k}, {"m", m}, {"f", fl}, {"a", a}, {"b", b}, {"n", n}};
                p.step3 = s & 1;
                p.edge_value = s & 2;
                f(p);
              }
}

}  // namespace

TEST(Domain, EnvLatticeOperations) {
  auto a = AbstractEnv::constant(layout(), 0);
  auto b = AbstractEnv::constant(layout(), 1);
  auto j = a.join(b);
  EXPECT_EQ(j.get(0), Interval(0, 1));
  EXPECT_TRUE(a.leq(j));
  EXPECT_TRUE(a.meet(b).is_bottom());
  EXPECT_TRUE(AbstractEnv::bottom(layout()).leq(a));
  EXPECT_EQ(AbstractEnv::bottom(layout()).join(a), a);
  auto grown = j;
  grown.set(0, Interval(0, 5));
  auto w = j.widen(grown);
  EXPECT_EQ(w.get(0), Interval(0, Bound::pos_inf()));
  // Boolean variables never widen past their sort.
  EXPECT_EQ(a.widen(j).get(2), Interval::boolean());
}

TEST(Domain, SettingBottomCollapsesEnv) {
  auto e = AbstractEnv::top(layout());
  e.set(1, Interval::bottom());
  EXPECT_TRUE(e.is_bottom());
  EXPECT_TRUE(e.get(0).is_bottom());
}

TEST(Domain, HavocRestoresSortBounds) {
  auto e = AbstractEnv::constant(layout(), 0).havoc({0, 2});
  EXPECT_EQ(e.get(0), Interval::top());
  EXPECT_EQ(e.get(1), Interval::constant(0));
  EXPECT_EQ(e.get(2), Interval::boolean());
}

TEST(Domain, AssignmentOfConstant) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  const auto e = assign(AbstractEnv::top(layout()), "k", Expr::integer(0), ctx);
  EXPECT_EQ(e.get(0), Interval::constant(0));
}

TEST(Domain, FilterContradictionIsBottom) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  const auto e = AbstractEnv::constant(layout(), 0);
  EXPECT_TRUE(filter(e, Expr::compare(CompareOp::Eq, Expr::var("k"), Expr::integer(1)), ctx).is_bottom());
}

TEST(Domain, FilterRefinesBothSides) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  auto e = AbstractEnv::top(layout());
  e.set(0, Interval(0, 10));
  e.set(1, Interval(5, 7));
  const auto r = filter(e, Expr::compare(CompareOp::Lt, Expr::var("k"), Expr::var("m")), ctx);
  EXPECT_EQ(r.get(0), Interval(0, 6));
  EXPECT_EQ(r.get(1), Interval(5, 7));
  const auto s = filter(e, Expr::compare(CompareOp::Gt, Expr::var("k"), Expr::var("m")), ctx);
  EXPECT_EQ(s.get(0), Interval(6, 10));
}

TEST(Domain, AndMeetsOrJoins) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  auto e = AbstractEnv::top(layout());
  e.set(0, Interval(0, 10));
  const auto lo = Expr::compare(CompareOp::Ge, Expr::var("k"), Expr::integer(3));
  const auto hi = Expr::compare(CompareOp::Le, Expr::var("k"), Expr::integer(5));
  EXPECT_EQ(filter(e, Expr::conj(lo, hi), ctx).get(0), Interval(3, 5));
  const auto low = Expr::compare(CompareOp::Le, Expr::var("k"), Expr::integer(1));
  const auto high = Expr::compare(CompareOp::Ge, Expr::var("k"), Expr::integer(8));
  EXPECT_EQ(filter(e, Expr::disj(low, high), ctx).get(0), Interval(0, 10));
  EXPECT_EQ(filter(e, Expr::negate(Expr::disj(low, high)), ctx).get(0), Interval(2, 7));
}

TEST(Domain, InputsAndEdgesAreUnconstrained) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  const auto e = AbstractEnv::constant(layout(), 0);
  EXPECT_EQ(filter(e, Expr::var("a"), ctx), e);
  EXPECT_EQ(filter(e, Expr::negate(Expr::var("a")), ctx), e);
  EXPECT_EQ(filter(e, Expr::edge(EdgeDir::Rising, Expr::var("a")), ctx), e);
  EXPECT_EQ(filter(e, Expr::negate(Expr::edge(EdgeDir::Rising, Expr::var("a"))), ctx), e);
  EXPECT_EQ(eval_arith(Expr::var("a"), e, ctx), Interval::boolean());
  EXPECT_EQ(eval_arith(Expr::var("n"), e, ctx), Interval::top());
}

TEST(Domain, StepAtomsUseContext) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  const auto e = AbstractEnv::constant(layout(), 0);
  EXPECT_EQ(filter(e, Expr::step("P", 1), ctx), e);
  EXPECT_TRUE(filter(e, Expr::step("P", 2), ctx).is_bottom());
  EXPECT_EQ(filter(e, Expr::step("P", 3), ctx), e);
  EXPECT_TRUE(filter(e, Expr::negate(Expr::step("P", 1)), ctx).is_bottom());
}

TEST(Domain, BooleanAssignmentOutOfSort) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  const auto e = AbstractEnv::constant(layout(), 0);
  EXPECT_TRUE(assign_sort_conflict(e, "f", Expr::integer(2), ctx));
  EXPECT_TRUE(assign(e, "f", Expr::integer(2), ctx).is_bottom());
  EXPECT_FALSE(assign_sort_conflict(e, "f", Expr::integer(1), ctx));
  auto wide = e;
  wide.set(0, Interval(0, 2));
  EXPECT_EQ(assign(wide, "f", Expr::var("k"), ctx).get(2), Interval::boolean());
}

TEST(Domain, BooleanSubtermsEvaluateToTruthRange) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  auto e = AbstractEnv::constant(layout(), 0);
  e.set(0, Interval(0, 2));
  const auto lt3 = Expr::compare(CompareOp::Lt, Expr::var("k"), Expr::integer(3));
  EXPECT_EQ(eval_arith(lt3, e, ctx), Interval::constant(1));
  const auto lt1 = Expr::compare(CompareOp::Lt, Expr::var("k"), Expr::integer(1));
  EXPECT_EQ(eval_arith(lt1, e, ctx), Interval::boolean());
}

// filter keeps every concrete point satisfying the condition.
TEST(Domain, FilterSoundByEnumeration) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  for (std::uint32_t seed = 0; seed < 400; ++seed) {
    grafcet::testing::ModelGen gen(seed, {.allow_edges = true});
    const auto env = random_env(gen);
    const auto cond = gen.condition(2);
    const auto filtered = filter(env, cond, ctx);
    for_each_point(env, [&](const Point& p) {
      if (holds(cond, p)) {
        ASSERT_TRUE(inside(filtered, p)) << cond.to_string() << " k=" << p.vars.at("k")
                                         << " m=" << p.vars.at("m") << " f=" << p.vars.at("f");
      }
    });
  }
}

// assign and eval_arith cover every concrete result.
TEST(Domain, AssignSoundByEnumeration) {
  const auto g = vocabulary();
  const auto ctx = context(g);
  for (std::uint32_t seed = 0; seed < 400; ++seed) {
    grafcet::testing::ModelGen gen(seed);
    const auto env = random_env(gen);
    const bool to_bool = gen.chance(0.3);
    const auto value = to_bool ? gen.condition(1) : gen.value(2);
    const std::string target = to_bool ? "f" : "k";
    const auto abstract = eval_arith(value, env, ctx);
    const auto after = assign(env, target, value, ctx);
    for_each_point(env, [&](const Point& p) {
      const auto v = evaluate(value, p);
      ASSERT_TRUE(abstract.contains(v)) << value.to_string();
      if (to_bool && v != 0 && v != 1) return;  // execution blocks on a sort violation
      Point q = p;
      q.vars[target] = v;
      ASSERT_TRUE(inside(after, q)) << target << " := " << value.to_string();
    });
  }
}
