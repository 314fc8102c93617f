#pragma once

// Structural checks establishing that a partial Grafcet has no concurrent
// dependent reads/writes, so a sequential control-flow analysis applies.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "grafcet/model.hpp"

namespace grafcet {

enum class ConcurrencyRule {
  IntraStepDep,
  MultiInitial,
  SourceTransition,
  ParallelWrite,
  CrossPartialWrite,
  ForcedMulti,
};

const char* to_string(ConcurrencyRule rule);

struct ConcurrencyViolation {
  ConcurrencyRule rule;
  std::string partial;                // empty for Grafcet-wide findings
  std::vector<std::string> elements;  // offending steps, transitions, variables, partials
  std::string note;
  friend auto operator<=>(const ConcurrencyViolation&, const ConcurrencyViolation&) = default;
};

/// Symmetric, irreflexive may-be-simultaneously-active relation.
class ConcurrentStepSets {
 public:
  bool add(StepId a, StepId b);  // returns true if new
  bool concurrent(StepId a, StepId b) const;
  const std::set<StepId>& of(StepId s) const;
  const std::map<StepId, std::set<StepId>>& sets() const { return sets_; }
  bool empty() const;

 private:
  std::map<StepId, std::set<StepId>> sets_;
};

std::vector<ConcurrencyViolation> check_intra_step(const PartialGrafcet& p);
std::vector<ConcurrencyViolation> check_entry_multiplicity(const Grafcet& g);
std::vector<ConcurrencyViolation> check_source_transitions(const PartialGrafcet& p);

/// Over-approximates which pairs of steps of `p` can be active together.
/// Closure rules: entry and forced situations are pairwise concurrent; the
/// downstream steps of one transition are pairwise concurrent; a step
/// concurrent with every upstream step of a transition is concurrent with its
/// downstream steps; transitions sharing an upstream step whose conditions are
/// not provably exclusive may fire together.
ConcurrentStepSets concurrent_steps(const Grafcet& g, const PartialGrafcet& p);

/// True when no store satisfies both conditions (interval reasoning).
bool conditions_exclusive(const Grafcet& g, const Expr& a, const Expr& b);

/// Same-variable writes, or write/read races (in actions or in the conditions
/// of transitions leaving the concurrent step), on concurrent steps.
std::vector<ConcurrencyViolation> check_parallel_writes(const PartialGrafcet& p,
                                                        const ConcurrentStepSets& cs);

std::vector<ConcurrencyViolation> check_cross_partial(const Grafcet& g);

struct ConcurrencyReport {
  std::vector<ConcurrencyViolation> violations;
  std::map<std::string, bool> partial_passed;
  std::map<std::string, ConcurrentStepSets> concurrent;
  bool passed = true;

  bool partial_ok(const std::string& name) const;
};

ConcurrencyReport gate(const Grafcet& g);

}  // namespace grafcet
