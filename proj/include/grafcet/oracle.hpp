#pragma once

// Reference semantics used to validate the analysis: bounded explicit-state
// exploration of a partial Grafcet, path execution of its normalized flow,
// and enumeration of reachable situations.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "grafcet/flow.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

struct OracleOptions {
  std::int64_t input_min = 0;  // range of integer inputs; Boolean inputs are {0,1}
  std::int64_t input_max = 3;
  unsigned depth = 8;          // moves from the initial states; 0 explores to saturation
  std::size_t state_cap = 1'000'000;
};

class StateCapError : public std::runtime_error {
 public:
  explicit StateCapError(std::size_t cap)
      : std::runtime_error("STATE_CAP: more than " + std::to_string(cap) + " states") {}
};

using Store = std::vector<std::int64_t>;  // one value per tracked variable

/// Stores observed on entry to each flow node, keyed by flow node id.
struct Observations {
  std::vector<std::string> tracked;
  std::map<std::string, std::set<Store>> at;
  std::set<std::string> fired;  // transitions that fired at least once
  std::set<std::set<StepId>> situations;
  std::size_t states = 0;
  bool saturated = false;  // no unexplored state remained
};

/// Explicit-state semantics of one partial. A move changes the inputs, fires
/// a nonempty set of enabled transitions whose conditions hold, runs an event
/// action of an active step, or applies a forcing order targeting the partial.
/// Inputs are the untracked variables and the step atoms of other partials.
/// The store seen by a transition is recorded whenever it is enabled, by a
/// step when it is activated, by an event action whenever its step is active.
Observations concrete_oracle(const Grafcet& g, const PartialGrafcet& p, const OracleOptions& o = {});

/// Path semantics of the normalized flow: every node reached with some store,
/// inputs chosen freshly at each node, edges and unresolved step atoms free.
/// `max_length` bounds path length (0 runs to saturation).
Observations execute_flow(const Grafcet& g, const NormalizedFlow& f, const OracleOptions& o,
                          unsigned max_length);

/// Situations reachable from the entry situation and forced situations when
/// any nonempty set of enabled transitions may fire together (conditions
/// ignored).
std::set<std::set<StepId>> reachable_situations(const Grafcet& g, const PartialGrafcet& p,
                                                std::size_t cap = 100000);

}  // namespace grafcet
