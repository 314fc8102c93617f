#pragma once

// Worklist abstract interpretation of a partial Grafcet over its normalized
// control flow, and the diagnostics derived from the resulting environments.

#include <chrono>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grafcet/domain.hpp"
#include "grafcet/flow.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

enum class WorklistOrder { Priority, Fifo, Lifo };

struct AnalysisOptions {
  unsigned widen_delay = 3;        // growing joins tolerated at a loop head before widening
  bool narrow = true;              // one decreasing pass after stabilization
  std::size_t max_visits = 10000;  // node visits before ITERATION_LIMIT
  WorklistOrder order = WorklistOrder::Priority;
  bool unsound = false;            // set when the concurrency gate was overridden
  // Observes every ascending-phase update of a node's environment.
  std::function<void(std::size_t node, const AbstractEnv& env)> on_update;
};

class IterationLimitError : public std::runtime_error {
 public:
  IterationLimitError(std::string partial, std::size_t visits);
  const std::string& partial() const { return partial_; }
  std::size_t visits() const { return visits_; }

 private:
  std::string partial_;
  std::size_t visits_;
};

enum class DiagnosticKind { Unreachable, NeverFires, AlwaysFires, TransientStep, SortConflict };

const char* to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string node;  // flow node id
  std::string detail;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct AnalysisResult {
  NormalizedFlow flow;
  std::vector<AbstractEnv> env_before;  // indexed like flow.nodes
  std::vector<Diagnostic> diagnostics;
  std::size_t iterations = 0;  // node visits, both phases
  std::chrono::duration<double, std::milli> wall_time{0};
  bool unsound = false;
  bool enclosed = false;  // re-entry with stale values is not modeled

  const AbstractEnv& env(const std::string& node_id) const;  // throws std::out_of_range
};

/// Executes node `n` on `env` in the abstract domain.
AbstractEnv transfer(const NormalizedFlow& flow, std::size_t n, const AbstractEnv& env);

/// Entries start with every tracked variable at [0,0], forced entries at top;
/// joins at confluences, meets across the upstream steps of synchronizing
/// transitions, delayed widening at loop heads, then one narrowing pass.
/// Throws IterationLimitError when `max_visits` is exceeded.
AnalysisResult interpret(const Grafcet& g, const PartialGrafcet& p,
                         const AnalysisOptions& options = {});

std::vector<Diagnostic> detect_unreachable(const AnalysisResult& r);
std::vector<Diagnostic> detect_firing(const AnalysisResult& r);
std::vector<Diagnostic> detect_transient(const AnalysisResult& r);
std::vector<Diagnostic> detect_sort_conflicts(const AnalysisResult& r);

}  // namespace grafcet
