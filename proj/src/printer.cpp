#include <sstream>

#include "grafcet/syntax.hpp"

namespace grafcet {

namespace {

std::string steps(const std::vector<StepId>& ids) {
  std::string out = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + std::to_string(ids[i]);
  return out + "}";
}

void print_action(std::ostream& os, const Action& a) {
  if (const auto* c = std::get_if<ContinuousAction>(&a)) {
    os << "do " << c->target;
    if (!(c->condition == Expr::boolean(true))) os << " if " << c->condition.to_string();
  } else if (const auto* s = std::get_if<StoredAction>(&a)) {
    os << "store " << s->target << " := " << s->value.to_string() << " on ";
    switch (s->trigger) {
      case TriggerKind::OnActivation: os << "activation"; break;
      case TriggerKind::OnDeactivation: os << "deactivation"; break;
      case TriggerKind::OnEvent: os << "event " << s->event.to_string(); break;
    }
  } else {
    const auto& f = std::get<ForcingAction>(a);
    os << "force " << f.target_partial << " to ";
    switch (f.situation) {
      case SituationKind::Star: os << "*"; break;
      case SituationKind::Init: os << "init"; break;
      case SituationKind::Explicit: os << steps(f.steps); break;
    }
  }
  os << ";";
}

}  // namespace

std::string print_grafcet(const Grafcet& g) {
  std::ostringstream os;
  for (const auto& v : g.variables) {
    os << (v.kind == VarKind::Input ? "input" : v.kind == VarKind::Internal ? "internal" : "output")
       << (v.sort == Sort::Boolean ? " bool " : " int ") << v.name << ";\n";
  }
  for (const auto& p : g.partials) {
    os << "\npartial " << p.name << " {\n";
    for (const auto& s : p.steps) {
      os << "  step " << s.id;
      if (s.initial) os << " initial";
      if (s.marked) os << " marked";
      if (s.encloses) os << " encloses " << *s.encloses;
      if (s.actions.empty()) {
        os << ";\n";
        continue;
      }
      os << " {\n";
      for (const auto& a : s.actions) {
        os << "    ";
        print_action(os, a);
        os << "\n";
      }
      os << "  }\n";
    }
    for (const auto& t : p.transitions)
      os << "  transition " << t.id << " : " << steps(t.upstream) << " -> " << steps(t.downstream)
         << " when " << t.condition.to_string() << ";\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace grafcet
