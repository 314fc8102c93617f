#pragma once

// In-memory Grafcet: variables, partial Grafcets, steps, transitions, actions.

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "grafcet/expr.hpp"

namespace grafcet {

enum class VarKind { Input, Internal, Output };
enum class Sort { Boolean, Integer };

struct VariableDecl {
  std::string name;
  VarKind kind = VarKind::Internal;
  Sort sort = Sort::Integer;
  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

struct ContinuousAction {
  std::string target;
  Expr condition;  // `true` when unconditioned
  friend bool operator==(const ContinuousAction&, const ContinuousAction&) = default;
};

enum class TriggerKind { OnActivation, OnDeactivation, OnEvent };

struct StoredAction {
  std::string target;
  Expr value;
  TriggerKind trigger = TriggerKind::OnActivation;
  Expr event;  // only meaningful for OnEvent
  friend bool operator==(const StoredAction& a, const StoredAction& b) {
    return a.target == b.target && a.value == b.value && a.trigger == b.trigger &&
           (a.trigger != TriggerKind::OnEvent || a.event == b.event);
  }
};

enum class SituationKind { Star, Init, Explicit };

struct ForcingAction {
  std::string target_partial;
  SituationKind situation = SituationKind::Star;
  std::vector<StepId> steps;  // Explicit only
  friend bool operator==(const ForcingAction&, const ForcingAction&) = default;
};

using Action = std::variant<ContinuousAction, StoredAction, ForcingAction>;

struct Step {
  StepId id = 0;
  bool initial = false;
  bool marked = false;
  std::optional<std::string> encloses;
  std::vector<Action> actions;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Transition {
  std::string id;
  std::vector<StepId> upstream;
  std::vector<StepId> downstream;
  Expr condition;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct PartialGrafcet {
  std::string name;
  std::vector<Step> steps;
  std::vector<Transition> transitions;

  const Step* find_step(StepId id) const;
  const Transition* find_transition(const std::string& id) const;
  bool enclosed() const;  // has marked steps
  friend bool operator==(const PartialGrafcet&, const PartialGrafcet&) = default;
};

struct Grafcet {
  std::vector<VariableDecl> variables;
  std::vector<PartialGrafcet> partials;

  const VariableDecl* find_variable(const std::string& name) const;
  const PartialGrafcet* find_partial(const std::string& name) const;
  friend bool operator==(const Grafcet&, const Grafcet&) = default;
};

enum class ModelRule {
  EmptyGrafcet,
  EmptyTransition,
  UndeclaredVar,
  ContStoredOverlap,
  DuplicateVar,
  DuplicatePartial,
  DuplicateStep,
  DuplicateTransition,
  UnknownStep,
  UnknownPartial,
  EnclosesSelf,
  BadContinuousTarget,
  BadStoredTarget,
  SortMismatch,
  InitialAndMarked,
};

const char* to_string(ModelRule rule);

struct ModelError {
  ModelRule rule;
  std::string element;  // "partial/step 3", "partial/t1", variable name, ...
  std::string message;
  friend auto operator<=>(const ModelError&, const ModelError&) = default;
};

/// All invariant violations, sorted. Empty means admissible for analysis.
std::vector<ModelError> validate(const Grafcet& g);

/// Non-fatal findings (steps both initial and marked).
std::vector<ModelError> model_warnings(const Grafcet& g);

struct NodeRef {
  enum class Kind { Step, Transition } kind;
  StepId step = 0;
  std::string transition;

  static NodeRef of_step(StepId s) { return {Kind::Step, s, {}}; }
  static NodeRef of_transition(std::string t) { return {Kind::Transition, 0, std::move(t)}; }
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Arc structure: a step's successors are the transitions it enables, a
/// transition's successors are its downstream steps. Throws
/// std::out_of_range for unknown nodes.
std::set<NodeRef> successors(const PartialGrafcet& p, const NodeRef& n);

struct EntryPoints {
  std::set<StepId> entries;  // initial steps, or marked steps when enclosed
  std::set<StepId> forced;   // situations imposed by forcing orders from elsewhere
};

EntryPoints entry_nodes(const Grafcet& g, const PartialGrafcet& p);

// Read/write sets of a single action.
std::optional<std::string> written_variable(const Action& a);
std::set<std::string> read_variables(const Action& a);

/// Write/write on the same variable, or a read of the other's written variable.
bool depends_on(const Action& a, const Action& b);

/// Variables written by stored actions of `p`, in declaration order.
std::vector<std::string> tracked_variables(const Grafcet& g, const PartialGrafcet& p);

std::string step_label(const PartialGrafcet& p, StepId id);

}  // namespace grafcet
