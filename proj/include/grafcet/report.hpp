#pragma once

// Text and JSON rendering of check/analyze results.

#include <optional>
#include <string>
#include <vector>

#include "grafcet/analysis.hpp"
#include "grafcet/concurrency.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

struct ModelSummary {
  std::size_t partials = 0, steps = 0, transitions = 0;
  std::size_t stored_actions = 0, continuous_actions = 0, forcing_actions = 0;
  std::size_t variables = 0;
};

ModelSummary summarize(const Grafcet& g);

struct PartialReport {
  std::string name;
  std::optional<AnalysisResult> result;  // empty when the gate blocked the analysis
  std::string error;                     // set on ITERATION_LIMIT
};

struct Report {
  std::string command;  // "check" or "analyze"
  std::string file;
  ModelSummary summary;
  std::vector<ModelError> warnings;
  ConcurrencyReport gate;
  std::vector<std::string> selected;  // partials the command covers
  std::vector<PartialReport> partials;
  double total_ms = 0;

  bool gate_failed() const;
  bool has_diagnostics() const;
  bool hit_limit() const;
};

enum class ReportFormat { Text, Json };

// JSON layout (schema_version 1):
//   command, file,
//   model {partials, steps, transitions, stored_actions, continuous_actions,
//          forcing_actions, variables},
//   warnings [{rule, element, message}],
//   gate {passed, partials {name: bool}, violations [{rule, partial, elements, note}]},
//   partials [{name, analyzed, unsound, enclosed, error, tracked [var],
//              nodes [{id, kind, label, env {var: [lo, hi] | "bottom"}}],
//              diagnostics [{kind, node, detail}], iterations, time_ms}],
//   timing {total_ms}
// Infinite bounds are the strings "-inf" and "+inf".
inline constexpr int kReportSchemaVersion = 1;

std::string emit_report(const Report& r, ReportFormat format);

/// Table rows in report order: steps, then transitions, then action nodes,
/// each in declaration order.
std::vector<std::size_t> table_order(const NormalizedFlow& flow);

}  // namespace grafcet
