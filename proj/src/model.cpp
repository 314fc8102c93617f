#include "grafcet/model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace grafcet {

const Step* PartialGrafcet::find_step(StepId id) const {
  auto it = std::find_if(steps.begin(), steps.end(), [&](const Step& s) { return s.id == id; });
  return it == steps.end() ? nullptr : &*it;
}

const Transition* PartialGrafcet::find_transition(const std::string& id) const {
  auto it = std::find_if(transitions.begin(), transitions.end(),
                         [&](const Transition& t) { return t.id == id; });
  return it == transitions.end() ? nullptr : &*it;
}

bool PartialGrafcet::enclosed() const {
  return std::any_of(steps.begin(), steps.end(), [](const Step& s) { return s.marked; });
}

const VariableDecl* Grafcet::find_variable(const std::string& name) const {
  auto it = std::find_if(variables.begin(), variables.end(),
                         [&](const VariableDecl& v) { return v.name == name; });
  return it == variables.end() ? nullptr : &*it;
}

const PartialGrafcet* Grafcet::find_partial(const std::string& name) const {
  auto it = std::find_if(partials.begin(), partials.end(),
                         [&](const PartialGrafcet& p) { return p.name == name; });
  return it == partials.end() ? nullptr : &*it;
}

const char* to_string(ModelRule rule) {
  switch (rule) {
    case ModelRule::EmptyGrafcet: return "EMPTY_GRAFCET";
    case ModelRule::EmptyTransition: return "EMPTY_TRANSITION";
    case ModelRule::UndeclaredVar: return "UNDECLARED_VAR";
    case ModelRule::ContStoredOverlap: return "CONT_STORED_OVERLAP";
    case ModelRule::DuplicateVar: return "DUPLICATE_VAR";
    case ModelRule::DuplicatePartial: return "DUPLICATE_PARTIAL";
    case ModelRule::DuplicateStep: return "DUPLICATE_STEP";
    case ModelRule::DuplicateTransition: return "DUPLICATE_TRANSITION";
    case ModelRule::UnknownStep: return "UNKNOWN_STEP";
    case ModelRule::UnknownPartial: return "UNKNOWN_PARTIAL";
    case ModelRule::EnclosesSelf: return "ENCLOSES_SELF";
    case ModelRule::BadContinuousTarget: return "BAD_CONTINUOUS_TARGET";
    case ModelRule::BadStoredTarget: return "BAD_STORED_TARGET";
    case ModelRule::SortMismatch: return "SORT_MISMATCH";
    case ModelRule::InitialAndMarked: return "INITIAL_AND_MARKED";
  }
  return "?";
}

std::string step_label(const PartialGrafcet& p, StepId id) {
  return p.name + "/step " + std::to_string(id);
}

namespace {

class Validator {
 public:
  explicit Validator(const Grafcet& g) : g_(g) {}

  std::vector<ModelError> run() {
    if (g_.partials.empty()) add(ModelRule::EmptyGrafcet, "grafcet", "no partial Grafcet");
    check_unique_names();
    for (const auto& p : g_.partials) check_partial(p);
    check_overlap();
    std::sort(errors_.begin(), errors_.end());
    errors_.erase(std::unique(errors_.begin(), errors_.end()), errors_.end());
    return std::move(errors_);
  }

 private:
  void add(ModelRule rule, std::string element, std::string message) {
    errors_.push_back({rule, std::move(element), std::move(message)});
  }

  void check_unique_names() {
    std::set<std::string> seen;
    for (const auto& v : g_.variables)
      if (!seen.insert(v.name).second)
        add(ModelRule::DuplicateVar, v.name, "variable declared more than once");
    seen.clear();
    for (const auto& p : g_.partials)
      if (!seen.insert(p.name).second)
        add(ModelRule::DuplicatePartial, p.name, "partial Grafcet declared more than once");
  }

  void check_partial(const PartialGrafcet& p) {
    std::set<StepId> step_ids;
    for (const auto& s : p.steps)
      if (!step_ids.insert(s.id).second)
        add(ModelRule::DuplicateStep, step_label(p, s.id), "duplicate step id");
    std::set<std::string> tids;
    for (const auto& t : p.transitions)
      if (!tids.insert(t.id).second)
        add(ModelRule::DuplicateTransition, p.name + "/" + t.id, "duplicate transition id");

    for (const auto& s : p.steps) {
      const auto where = step_label(p, s.id);
      if (s.encloses) {
        if (*s.encloses == p.name)
          add(ModelRule::EnclosesSelf, where, "step encloses its own partial Grafcet");
        else if (!g_.find_partial(*s.encloses))
          add(ModelRule::UnknownPartial, where, "encloses unknown partial " + *s.encloses);
      }
      for (const auto& a : s.actions) check_action(p, where, a);
    }

    for (const auto& t : p.transitions) {
      const auto where = p.name + "/" + t.id;
      if (t.upstream.empty() && t.downstream.empty())
        add(ModelRule::EmptyTransition, where, "transition has neither upstream nor downstream steps");
      for (auto id : t.upstream)
        if (!p.find_step(id))
          add(ModelRule::UnknownStep, where, "unknown upstream step " + std::to_string(id));
      for (auto id : t.downstream)
        if (!p.find_step(id))
          add(ModelRule::UnknownStep, where, "unknown downstream step " + std::to_string(id));
      check_bool(where, t.condition);
    }
  }

  void check_action(const PartialGrafcet& p, const std::string& where, const Action& a) {
    if (const auto* c = std::get_if<ContinuousAction>(&a)) {
      const auto* v = g_.find_variable(c->target);
      if (!v)
        add(ModelRule::UndeclaredVar, where, "undeclared variable " + c->target);
      else if (v->kind != VarKind::Output || v->sort != Sort::Boolean)
        add(ModelRule::BadContinuousTarget, where,
            "continuous action target " + c->target + " is not a Boolean output");
      check_bool(where, c->condition);
    } else if (const auto* st = std::get_if<StoredAction>(&a)) {
      const auto* v = g_.find_variable(st->target);
      if (!v)
        add(ModelRule::UndeclaredVar, where, "undeclared variable " + st->target);
      else if (v->kind == VarKind::Input)
        add(ModelRule::BadStoredTarget, where, "stored action writes input " + st->target);
      check_int(where, st->value);
      if (st->trigger == TriggerKind::OnEvent) check_bool(where, st->event);
    } else {
      const auto& f = std::get<ForcingAction>(a);
      const auto* target = g_.find_partial(f.target_partial);
      if (!target) {
        add(ModelRule::UnknownPartial, where, "forcing order targets unknown " + f.target_partial);
        return;
      }
      for (auto id : f.steps)
        if (!target->find_step(id))
          add(ModelRule::UnknownStep, where,
              "forced situation names unknown step " + std::to_string(id) + " of " + target->name);
      (void)p;
    }
  }

  void check_ref(const std::string& where, const Expr& e) {
    if (const auto* v = e.as<VarRef>()) {
      if (!g_.find_variable(v->name))
        add(ModelRule::UndeclaredVar, where, "undeclared variable " + v->name);
    } else if (const auto* s = e.as<StepRef>()) {
      const auto* target = g_.find_partial(s->partial);
      if (!target)
        add(ModelRule::UnknownPartial, where, "step atom names unknown partial " + s->partial);
      else if (!target->find_step(s->step))
        add(ModelRule::UnknownStep, where,
            "step atom names unknown step " + std::to_string(s->step) + " of " + s->partial);
    }
  }

  // Boolean-sorted position.
  void check_bool(const std::string& where, const Expr& e) {
    check_ref(where, e);
    if (const auto* c = e.as<IntConst>()) {
      if (c->value != 0 && c->value != 1)
        add(ModelRule::SortMismatch, where, "integer constant in Boolean position");
    } else if (const auto* v = e.as<VarRef>()) {
      const auto* decl = g_.find_variable(v->name);
      if (decl && decl->sort != Sort::Boolean)
        add(ModelRule::SortMismatch, where, "integer variable " + v->name + " in Boolean position");
    } else if (const auto* ed = e.as<EdgeAtom>()) {
      check_bool(where, ed->operand);
    } else if (const auto* cmp = e.as<Compare>()) {
      check_int(where, cmp->lhs);
      check_int(where, cmp->rhs);
    } else if (const auto* n = e.as<Not>()) {
      check_bool(where, n->operand);
    } else if (const auto* a = e.as<And>()) {
      check_bool(where, a->lhs);
      check_bool(where, a->rhs);
    } else if (const auto* o = e.as<Or>()) {
      check_bool(where, o->lhs);
      check_bool(where, o->rhs);
    } else if (e.is<Arith>()) {
      add(ModelRule::SortMismatch, where, "arithmetic expression in Boolean position");
    }
  }

  // Integer-sorted position; Boolean subterms count as 0/1.
  void check_int(const std::string& where, const Expr& e) {
    if (const auto* a = e.as<Arith>()) {
      check_int(where, a->lhs);
      check_int(where, a->rhs);
    } else if (e.is<VarRef>() || e.is<IntConst>()) {
      check_ref(where, e);
    } else {
      check_bool(where, e);
    }
  }

  void check_overlap() {
    std::map<std::string, std::string> continuous, stored;
    for (const auto& p : g_.partials)
      for (const auto& s : p.steps)
        for (const auto& a : s.actions) {
          if (const auto* c = std::get_if<ContinuousAction>(&a))
            continuous.emplace(c->target, p.name);
          else if (const auto* st = std::get_if<StoredAction>(&a))
            stored.emplace(st->target, p.name);
        }
    for (const auto& [var, where] : continuous) {
      auto it = stored.find(var);
      if (it != stored.end())
        add(ModelRule::ContStoredOverlap, var,
            "written by a continuous action in " + where + " and a stored action in " +
                it->second);
    }
  }

  const Grafcet& g_;
  std::vector<ModelError> errors_;
};

void collect_reads(const Expr& e, std::set<std::string>& out) {
  auto fv = free_vars(e);
  out.insert(fv.vars.begin(), fv.vars.end());
}

}  // namespace

std::vector<ModelError> validate(const Grafcet& g) { return Validator(g).run(); }

std::vector<ModelError> model_warnings(const Grafcet& g) {
  std::vector<ModelError> out;
  for (const auto& p : g.partials)
    for (const auto& s : p.steps)
      if (s.initial && s.marked)
        out.push_back({ModelRule::InitialAndMarked, step_label(p, s.id),
                       "step is both initial and marked"});
  std::sort(out.begin(), out.end());
  return out;
}

std::set<NodeRef> successors(const PartialGrafcet& p, const NodeRef& n) {
  std::set<NodeRef> out;
  if (n.kind == NodeRef::Kind::Step) {
    if (!p.find_step(n.step)) throw std::out_of_range("unknown step " + std::to_string(n.step));
    for (const auto& t : p.transitions)
      if (std::find(t.upstream.begin(), t.upstream.end(), n.step) != t.upstream.end())
        out.insert(NodeRef::of_transition(t.id));
  } else {
    const auto* t = p.find_transition(n.transition);
    if (!t) throw std::out_of_range("unknown transition " + n.transition);
    for (auto id : t->downstream) out.insert(NodeRef::of_step(id));
  }
  return out;
}

EntryPoints entry_nodes(const Grafcet& g, const PartialGrafcet& p) {
  EntryPoints ep;
  const bool enclosed = p.enclosed();
  for (const auto& s : p.steps)
    if (enclosed ? s.marked : s.initial) ep.entries.insert(s.id);

  for (const auto& q : g.partials)
    for (const auto& s : q.steps)
      for (const auto& a : s.actions) {
        const auto* f = std::get_if<ForcingAction>(&a);
        if (!f || f->target_partial != p.name) continue;
        if (f->situation == SituationKind::Explicit) {
          for (auto id : f->steps)
            if (p.find_step(id)) ep.forced.insert(id);
        } else if (f->situation == SituationKind::Init) {
          // Re-initialising keeps the accumulated variable values.
          for (const auto& st : p.steps)
            if (st.initial) ep.forced.insert(st.id);
        }
      }
  return ep;
}

std::optional<std::string> written_variable(const Action& a) {
  if (const auto* c = std::get_if<ContinuousAction>(&a)) return c->target;
  if (const auto* s = std::get_if<StoredAction>(&a)) return s->target;
  return std::nullopt;
}

std::set<std::string> read_variables(const Action& a) {
  std::set<std::string> out;
  if (const auto* c = std::get_if<ContinuousAction>(&a)) {
    collect_reads(c->condition, out);
  } else if (const auto* s = std::get_if<StoredAction>(&a)) {
    collect_reads(s->value, out);
    if (s->trigger == TriggerKind::OnEvent) collect_reads(s->event, out);
  }
  return out;
}

bool depends_on(const Action& a, const Action& b) {
  const auto wa = written_variable(a);
  const auto wb = written_variable(b);
  if (wa && wb && *wa == *wb) return true;
  if (wa && read_variables(b).count(*wa)) return true;
  if (wb && read_variables(a).count(*wb)) return true;
  return false;
}

std::vector<std::string> tracked_variables(const Grafcet& g, const PartialGrafcet& p) {
  std::set<std::string> written;
  for (const auto& s : p.steps)
    for (const auto& a : s.actions)
      if (const auto* st = std::get_if<StoredAction>(&a)) written.insert(st->target);
  std::vector<std::string> out;
  for (const auto& v : g.variables)
    if (v.kind != VarKind::Input && written.count(v.name)) out.push_back(v.name);
  return out;
}

}  // namespace grafcet
