#include "grafcet/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace grafcet {

ModelSummary summarize(const Grafcet& g) {
  ModelSummary s;
  s.partials = g.partials.size();
  s.variables = g.variables.size();
  for (const auto& p : g.partials) {
    s.steps += p.steps.size();
    s.transitions += p.transitions.size();
    for (const auto& st : p.steps)
      for (const auto& a : st.actions) {
        if (std::holds_alternative<StoredAction>(a)) ++s.stored_actions;
        else if (std::holds_alternative<ContinuousAction>(a)) ++s.continuous_actions;
        else ++s.forcing_actions;
      }
  }
  return s;
}

bool Report::gate_failed() const {
  for (const auto& p : selected)
    if (!gate.partial_ok(p)) return true;
  return false;
}

bool Report::has_diagnostics() const {
  for (const auto& p : partials)
    if (p.result && !p.result->diagnostics.empty()) return true;
  return false;
}

bool Report::hit_limit() const {
  for (const auto& p : partials)
    if (!p.error.empty()) return true;
  return false;
}

std::vector<std::size_t> table_order(const NormalizedFlow& flow) {
  std::vector<std::size_t> out;
  for (int pass = 0; pass < 3; ++pass)
    for (std::size_t i = 0; i < flow.nodes.size(); ++i) {
      const auto& n = flow.nodes[i];
      if ((pass == 0 && n.is_step()) || (pass == 1 && n.is_transition()) ||
          (pass == 2 && n.is_action()))
        out.push_back(i);
    }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

nlohmann::json bound_json(const Bound& b) {
  if (b.finite()) return b.value();
  return b.to_string();
}

nlohmann::json interval_json(const Interval& i) {
  if (i.is_bottom()) return "bottom";
  return nlohmann::json::array({bound_json(i.lo()), bound_json(i.hi())});
}

void text_table(std::ostream& os, const AnalysisResult& r) {
  const auto& layout = *r.flow.layout;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Step/Transition"};
  for (std::size_t v = 0; v < layout.size(); ++v) header.push_back(layout.name(v));
  rows.push_back(header);
  for (auto n : table_order(r.flow)) {
    std::vector<std::string> row{r.flow.nodes[n].label()};
    const auto& env = r.env_before[n];
    for (std::size_t v = 0; v < layout.size(); ++v)
      row.push_back(env.is_bottom() ? "bottom" : env.get(v).to_compact_string());
    if (layout.size() == 0) row.push_back(env.is_bottom() ? "bottom" : "reachable");
    rows.push_back(row);
  }
  if (layout.size() == 0) rows.front().push_back("(no tracked variables)");
  for (const auto& row : rows) os << join(row, " | ") << "\n";
}

}  // namespace

std::string emit_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = r.command;
    j["file"] = r.file;
    j["model"] = {{"partials", r.summary.partials},
                  {"steps", r.summary.steps},
                  {"transitions", r.summary.transitions},
                  {"stored_actions", r.summary.stored_actions},
                  {"continuous_actions", r.summary.continuous_actions},
                  {"forcing_actions", r.summary.forcing_actions},
                  {"variables", r.summary.variables}};
    j["warnings"] = nlohmann::json::array();
    for (const auto& w : r.warnings)
      j["warnings"].push_back({{"rule", to_string(w.rule)}, {"element", w.element}, {"message", w.message}});
    auto& gate = j["gate"];
    gate["passed"] = !r.gate_failed();
    gate["partials"] = nlohmann::json::object();
    for (const auto& p : r.selected) gate["partials"][p] = r.gate.partial_ok(p);
    gate["violations"] = nlohmann::json::array();
    for (const auto& v : r.gate.violations)
      gate["violations"].push_back({{"rule", to_string(v.rule)},
                                    {"partial", v.partial},
                                    {"elements", v.elements},
                                    {"note", v.note}});
    j["partials"] = nlohmann::json::array();
    for (const auto& p : r.partials) {
      nlohmann::json pj;
      pj["name"] = p.name;
      pj["analyzed"] = p.result.has_value();
      pj["unsound"] = p.result && p.result->unsound;
      pj["enclosed"] = p.result && p.result->enclosed;
      pj["error"] = p.error;
      pj["tracked"] = nlohmann::json::array();
      pj["nodes"] = nlohmann::json::array();
      pj["diagnostics"] = nlohmann::json::array();
      pj["iterations"] = p.result ? p.result->iterations : 0;
      pj["time_ms"] = p.result ? p.result->wall_time.count() : 0.0;
      if (p.result) {
        const auto& res = *p.result;
        const auto& layout = *res.flow.layout;
        pj["tracked"] = layout.names();
        for (auto n : table_order(res.flow)) {
          nlohmann::json env = nlohmann::json::object();
          for (std::size_t v = 0; v < layout.size(); ++v)
            env[layout.name(v)] = interval_json(res.env_before[n].get(v));
          pj["nodes"].push_back({{"id", res.flow.nodes[n].id()},
                                 {"kind", res.flow.nodes[n].kind_name()},
                                 {"label", res.flow.nodes[n].label()},
                                 {"reachable", !res.env_before[n].is_bottom()},
                                 {"env", env}});
        }
        for (const auto& d : res.diagnostics)
          pj["diagnostics"].push_back({{"kind", to_string(d.kind)}, {"node", d.node}, {"detail", d.detail}});
      }
      j["partials"].push_back(pj);
    }
    j["timing"] = {{"total_ms", r.total_ms}};
    return j.dump(2) + "\n";
  }

  std::ostringstream os;
  const auto& s = r.summary;
  os << r.file << ": " << s.partials << " partials, " << s.steps << " steps, " << s.transitions
     << " transitions, " << s.stored_actions << " stored actions, " << s.continuous_actions
     << " continuous actions, " << s.forcing_actions << " forcing actions, " << s.variables
     << " variables\n";
  for (const auto& w : r.warnings)
    os << "warning: " << to_string(w.rule) << " " << w.element << ": " << w.message << "\n";
  os << "concurrency gate: " << (r.gate_failed() ? "FAILED" : "passed") << "\n";
  for (const auto& v : r.gate.violations)
    os << "  " << to_string(v.rule) << " " << (v.partial.empty() ? "*" : v.partial) << " ["
       << join(v.elements, ", ") << "]: " << v.note << "\n";
  for (const auto& p : r.partials) {
    os << "\npartial " << p.name;
    if (!p.result) {
      os << (p.error.empty() ? ": not analyzed (concurrency gate)" : ": " + p.error) << "\n";
      continue;
    }
    const auto& res = *p.result;
    os << " (" << res.iterations << " node visits, " << res.wall_time.count() << " ms)";
    if (res.unsound) os << " UNSOUND: concurrency gate overridden";
    os << "\n";
    if (res.enclosed)
      os << "note: entered at marked steps with variables at 0; re-entry with retained values is not modeled\n";
    text_table(os, res);
    for (const auto& d : res.diagnostics) os << to_string(d.kind) << " " << d.node << ": " << d.detail << "\n";
  }
  os << "\ntotal " << r.total_ms << " ms\n";
  return os.str();
}

}  // namespace grafcet
