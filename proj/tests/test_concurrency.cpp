#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "grafcet/concurrency.hpp"
#include "grafcet/oracle.hpp"
#include "support/corpus.hpp"
#include "support/random_model.hpp"

using namespace grafcet;
using grafcet::testing::load;
using grafcet::testing::parse_text;

namespace {

std::set<ConcurrencyRule> rules(const std::vector<ConcurrencyViolation>& vs) {
  std::set<ConcurrencyRule> out;
  for (const auto& v : vs) out.insert(v.rule);
  return out;
}

// Pairs of distinct steps that are active together in some situation.
std::set<std::pair<StepId, StepId>> co_active(const std::set<std::set<StepId>>& situations) {
  std::set<std::pair<StepId, StepId>> out;
  for (const auto& s : situations)
    for (auto a : s)
      for (auto b : s)
        if (a != b) out.emplace(a, b);
  return out;
}

}  // namespace

TEST(Concurrency, IntraStepDependence) {
  EXPECT_EQ(rules(check_intra_step(load("g1.grafcet").partials[0])),
            std::set<ConcurrencyRule>{ConcurrencyRule::IntraStepDep});
  const auto independent = parse_text(R"(
    internal int x, y;
    partial P { step 1 initial { store x := 0 on activation; store y := 1 on activation; } })");
  EXPECT_TRUE(check_intra_step(independent.partials[0]).empty());
  const auto read_after_write = parse_text(R"(
    internal int x, z;
    partial P { step 1 initial { store x := 0 on activation; store z := x on deactivation; } })");
  EXPECT_EQ(check_intra_step(read_after_write.partials[0]).size(), 1u);
}

TEST(Concurrency, EntryMultiplicity) {
  EXPECT_EQ(rules(check_entry_multiplicity(load("g2.grafcet"))),
            std::set<ConcurrencyRule>{ConcurrencyRule::MultiInitial});
  EXPECT_EQ(rules(check_entry_multiplicity(load("g3.grafcet"))),
            std::set<ConcurrencyRule>{ConcurrencyRule::MultiInitial});
  EXPECT_TRUE(check_entry_multiplicity(load("fig2.grafcet")).empty());
  const auto forced = parse_text(R"(
    input bool c;
    partial A { step 1 initial { force B to {1, 2}; } }
    partial B {
      step 1 initial
      step 2
      transition t : {1} -> {2} when c;
    })");
  EXPECT_EQ(rules(check_entry_multiplicity(forced)), std::set<ConcurrencyRule>{ConcurrencyRule::ForcedMulti});
}

TEST(Concurrency, SourceTransitions) {
  EXPECT_EQ(rules(check_source_transitions(load("g5.grafcet").partials[0])),
            std::set<ConcurrencyRule>{ConcurrencyRule::SourceTransition});
  EXPECT_TRUE(check_source_transitions(load("fig2.grafcet").partials[0]).empty());
  // g4 has a sink transition only.
  EXPECT_TRUE(check_source_transitions(load("g4.grafcet").partials[0]).empty());
}

TEST(Concurrency, ParallelBranchesAreConcurrent) {
  const auto g = load("g6.grafcet");
  const auto cs = concurrent_steps(g, g.partials[0]);
  for (auto [a, b] : {std::pair{2u, 3u}, {2u, 5u}, {4u, 3u}, {4u, 5u}}) {
    EXPECT_TRUE(cs.concurrent(a, b)) << a << "," << b;
    EXPECT_TRUE(cs.concurrent(b, a)) << b << "," << a;
  }
  EXPECT_FALSE(cs.concurrent(2, 4));
  EXPECT_FALSE(cs.concurrent(1, 2));
  EXPECT_FALSE(cs.concurrent(1, 5));
}

TEST(Concurrency, SequentialChainHasNoConcurrency) {
  const auto g = parse_text(R"(
    input bool c;
    partial P {
      step 1 initial
      step 2
      step 3
      transition t1 : {1} -> {2} when c;
      transition t2 : {2} -> {3} when c;
      transition t3 : {3} -> {1} when c;
    })");
  EXPECT_TRUE(concurrent_steps(g, g.partials[0]).empty());
}

// Oracle: brute-force enumeration of reachable situations.
TEST(Concurrency, DiamondMatchesMarkingEnumeration) {
  const auto g = parse_text(R"(
    input bool c;
    partial P {
      step 1 initial
      step 2
      step 3
      step 4
      transition split : {1} -> {2, 3} when c;
      transition join : {2, 3} -> {4} when c;
      transition back : {4} -> {1} when !c;
    })");
  const auto cs = concurrent_steps(g, g.partials[0]);
  EXPECT_TRUE(cs.concurrent(2, 3));
  EXPECT_FALSE(cs.concurrent(1, 2));
  EXPECT_FALSE(cs.concurrent(1, 4));
  EXPECT_FALSE(cs.concurrent(3, 4));
  const auto pairs = co_active(reachable_situations(g, g.partials[0]));
  EXPECT_EQ(pairs, (std::set<std::pair<StepId, StepId>>{{2, 3}, {3, 2}}));
}

TEST(Concurrency, ExclusiveConditionsDoNotSplit) {
  const auto g = parse_text(R"(
    input bool c;
    internal int k;
    partial P {
      step 1 initial { store k := k + 1 on activation; }
      step 2
      step 3
      transition a : {1} -> {2} when k < 3;
      transition b : {1} -> {3} when k >= 3;
      transition c2 : {2} -> {1} when c;
      transition c3 : {3} -> {1} when c;
    })");
  EXPECT_TRUE(conditions_exclusive(g, g.partials[0].transitions[0].condition,
                                   g.partials[0].transitions[1].condition));
  EXPECT_TRUE(concurrent_steps(g, g.partials[0]).empty());
  const auto inputs = parse_text(R"(
    input bool c, d;
    partial P {
      step 1 initial
      step 2
      step 3
      transition a : {1} -> {2} when c;
      transition b : {1} -> {3} when d;
    })");
  EXPECT_TRUE(concurrent_steps(inputs, inputs.partials[0]).concurrent(2, 3));
}

TEST(Concurrency, ParallelWrites) {
  const auto g6 = load("g6.grafcet");
  EXPECT_EQ(rules(check_parallel_writes(g6.partials[0], concurrent_steps(g6, g6.partials[0]))),
            std::set<ConcurrencyRule>{ConcurrencyRule::ParallelWrite});
  const auto g4 = load("g4.grafcet");
  EXPECT_EQ(rules(check_parallel_writes(g4.partials[0], concurrent_steps(g4, g4.partials[0]))),
            std::set<ConcurrencyRule>{ConcurrencyRule::ParallelWrite});
  const auto disjoint = parse_text(R"(
    input bool c;
    internal int x, y;
    partial P {
      step 1 initial
      step 2 { store x := 1 on activation; }
      step 3 { store y := 2 on activation; }
      step 4
      transition split : {1} -> {2, 3} when c;
      transition join : {2, 3} -> {4} when !c;
    })");
  EXPECT_TRUE(check_parallel_writes(disjoint.partials[0], concurrent_steps(disjoint, disjoint.partials[0])).empty());
  const auto read = parse_text(R"(
    input bool c;
    internal int x, y;
    partial P {
      step 1 initial
      step 2 { store x := 1 on activation; }
      step 3 { store y := x on activation; }
      step 4
      transition split : {1} -> {2, 3} when c;
      transition join : {2, 3} -> {4} when !c;
    })");
  EXPECT_EQ(rules(check_parallel_writes(read.partials[0], concurrent_steps(read, read.partials[0]))),
            std::set<ConcurrencyRule>{ConcurrencyRule::ParallelWrite});
}

TEST(Concurrency, CrossPartialWrites) {
  EXPECT_EQ(rules(check_cross_partial(load("g7.grafcet"))),
            std::set<ConcurrencyRule>{ConcurrencyRule::CrossPartialWrite});
  EXPECT_EQ(rules(check_cross_partial(load("g8.grafcet"))),
            std::set<ConcurrencyRule>{ConcurrencyRule::CrossPartialWrite});
  EXPECT_TRUE(check_cross_partial(load("g20.grafcet")).empty());
  const auto continuous = parse_text(R"(
    input bool c;
    output bool y;
    partial A { step 1 initial { do y if c; } }
    partial B { step 1 initial { do y; } })");
  EXPECT_TRUE(check_cross_partial(continuous).empty());
}

TEST(Concurrency, GateOnCorpus) {
  const std::vector<std::pair<std::string, ConcurrencyRule>> failing{
      {"g1.grafcet", ConcurrencyRule::IntraStepDep},     {"g2.grafcet", ConcurrencyRule::MultiInitial},
      {"g3.grafcet", ConcurrencyRule::MultiInitial},     {"g4.grafcet", ConcurrencyRule::ParallelWrite},
      {"g5.grafcet", ConcurrencyRule::SourceTransition}, {"g6.grafcet", ConcurrencyRule::ParallelWrite},
      {"g7.grafcet", ConcurrencyRule::CrossPartialWrite}, {"g8.grafcet", ConcurrencyRule::CrossPartialWrite}};
  for (const auto& [file, rule] : failing) {
    const auto r = gate(load(file));
    EXPECT_FALSE(r.passed) << file;
    EXPECT_TRUE(rules(r.violations).count(rule)) << file;
  }
  EXPECT_TRUE(gate(load("fig2.grafcet")).passed);
  EXPECT_TRUE(gate(load("g20.grafcet")).passed);
}

TEST(Concurrency, GateIsUnionOfChecks) {
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    const auto g = grafcet::testing::ModelGen(seed).grafcet();
    if (!validate(g).empty()) continue;
    const auto& p = g.partials[0];
    auto expected = check_intra_step(p);
    for (auto&& part : {check_source_transitions(p), check_parallel_writes(p, concurrent_steps(g, p)),
                        check_entry_multiplicity(g), check_cross_partial(g)})
      expected.insert(expected.end(), part.begin(), part.end());
    const auto r = gate(g);
    auto actual = r.violations;
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    EXPECT_EQ(actual, expected);
    EXPECT_EQ(r.passed, expected.empty());
    EXPECT_EQ(r.partial_ok("P"), expected.empty());
  }
}

TEST(Concurrency, IndependentOfDeclarationOrder) {
  std::mt19937 rng(7);
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    const auto g = grafcet::testing::ModelGen(seed).grafcet();
    if (!validate(g).empty()) continue;
    auto shuffled = g;
    auto& p = shuffled.partials[0];
    std::shuffle(p.steps.begin(), p.steps.end(), rng);
    std::shuffle(p.transitions.begin(), p.transitions.end(), rng);
    const auto a = gate(g), b = gate(shuffled);
    EXPECT_EQ(rules(a.violations), rules(b.violations));
    EXPECT_EQ(a.concurrent.at("P").sets(), b.concurrent.at("P").sets());
  }
}

// Over-approximation: simultaneously active pairs in explored situations are
// always in the relation. Conditions are replaced by inputs so that every
// enabled set of transitions may fire together.
TEST(Concurrency, SoundAgainstMarkingEnumeration) {
  int checked = 0;
  for (std::uint32_t seed = 0; seed < 400; ++seed) {
    auto g = grafcet::testing::ModelGen(seed, {.max_steps = 7}).grafcet();
    for (auto& t : g.partials[0].transitions) t.condition = Expr::var(seed % 2 ? "a" : "b");
    if (!validate(g).empty()) continue;
    const auto cs = concurrent_steps(g, g.partials[0]);
    for (auto [a, b] : co_active(reachable_situations(g, g.partials[0])))
      ASSERT_TRUE(cs.concurrent(a, b)) << "seed " << seed << ": " << a << "," << b;
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

// Same property with real conditions, against situations the concrete
// semantics reaches.
TEST(Concurrency, SoundAgainstConcreteSituations) {
  int checked = 0;
  OracleOptions o;
  o.depth = 5;
  o.input_max = 2;
  o.state_cap = 40000;
  for (std::uint32_t seed = 0; seed < 300; ++seed) {
    const auto g = grafcet::testing::ModelGen(seed).grafcet();
    if (!validate(g).empty()) continue;
    const auto cs = concurrent_steps(g, g.partials[0]);
    Observations obs;
    try {
      obs = concrete_oracle(g, g.partials[0], o);
    } catch (const StateCapError&) {
      continue;
    }
    for (auto [a, b] : co_active(obs.situations))
      ASSERT_TRUE(cs.concurrent(a, b)) << "seed " << seed << ": " << a << "," << b;
    ++checked;
  }
  EXPECT_GT(checked, 200);
}
