#pragma once

// Control flow of a partial Grafcet with stored actions normalized into
// flow nodes: activation effects stay on their step, deactivation effects
// follow each downstream transition, event effects form an optional,
// repeatable branch before the step's downstream transitions.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "grafcet/concurrency.hpp"
#include "grafcet/domain.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

struct StepNode {
  StepId step;
  std::vector<StoredAction> on_activation;
};

struct TransitionNode {
  std::string transition;
  std::vector<StepId> upstream;
  Expr condition;
};

enum class ActionRole { Deactivation, Event };

struct ActionNode {
  std::string id;  // synthetic, unique in the flow
  ActionRole role;
  StepId owner;                 // step the action belongs to
  std::size_t action_index;     // position in the owner's action list
  std::string after_transition; // Deactivation only
  std::string target;
  Expr value;
  std::optional<Expr> guard;  // Event only
};

struct FlowNode {
  std::variant<StepNode, TransitionNode, ActionNode> v;

  bool is_step() const { return std::holds_alternative<StepNode>(v); }
  bool is_transition() const { return std::holds_alternative<TransitionNode>(v); }
  bool is_action() const { return std::holds_alternative<ActionNode>(v); }
  std::string id() const;
  std::string kind_name() const;  // "step", "transition", "action"
  std::string label() const;      // "Step 204", "Transition t201", "Action ..."
};

std::string step_node_id(StepId s);
std::string deactivation_node_id(const std::string& transition, StepId owner, std::size_t index);
std::string event_node_id(StepId owner, std::size_t index);

struct NormalizedFlow {
  std::string partial;
  std::vector<FlowNode> nodes;
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;
  std::vector<std::size_t> entries;  // step nodes seeded with zeros
  std::vector<std::size_t> forced;   // step nodes seeded with top
  std::set<std::pair<std::size_t, std::size_t>> back_edges;
  std::vector<std::size_t> order;  // reverse postorder from the entries, then the rest

  // A transition with several upstream steps meets one join-slot per upstream
  // step; every other node has a single slot.
  std::vector<std::size_t> slot_count;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_slot;

  // Steps known active whenever the node executes.
  std::vector<std::vector<StepId>> context_steps;
  ConcurrentStepSets concurrent;

  LayoutPtr layout;                            // tracked variables
  std::vector<DomainContext> contexts;         // per node
  std::vector<std::vector<std::size_t>> havoc; // per node: variables written concurrently

  std::optional<std::size_t> find(const std::string& id) const;
  std::optional<std::size_t> find_step(StepId s) const;
  std::optional<std::size_t> find_transition(const std::string& t) const;
  bool loop_head(std::size_t n) const;
};

NormalizedFlow normalize(const Grafcet& g, const PartialGrafcet& p);

}  // namespace grafcet
