#include "grafcet/concurrency.hpp"

#include <algorithm>

#include "grafcet/domain.hpp"

namespace grafcet {

const char* to_string(ConcurrencyRule rule) {
  switch (rule) {
    case ConcurrencyRule::IntraStepDep: return "INTRA_STEP_DEP";
    case ConcurrencyRule::MultiInitial: return "MULTI_INITIAL";
    case ConcurrencyRule::SourceTransition: return "SOURCE_TRANSITION";
    case ConcurrencyRule::ParallelWrite: return "PARALLEL_WRITE";
    case ConcurrencyRule::CrossPartialWrite: return "CROSS_PARTIAL_WRITE";
    case ConcurrencyRule::ForcedMulti: return "FORCED_MULTI";
  }
  return "?";
}

bool ConcurrentStepSets::add(StepId a, StepId b) {
  if (a == b) return false;
  const bool fresh = sets_[a].insert(b).second;
  sets_[b].insert(a);
  return fresh;
}

bool ConcurrentStepSets::concurrent(StepId a, StepId b) const {
  auto it = sets_.find(a);
  return it != sets_.end() && it->second.count(b) > 0;
}

const std::set<StepId>& ConcurrentStepSets::of(StepId s) const {
  static const std::set<StepId> kEmpty;
  auto it = sets_.find(s);
  return it == sets_.end() ? kEmpty : it->second;
}

bool ConcurrentStepSets::empty() const {
  return std::all_of(sets_.begin(), sets_.end(), [](const auto& kv) { return kv.second.empty(); });
}

namespace {

std::vector<const StoredAction*> stored_actions(const Step& s) {
  std::vector<const StoredAction*> out;
  for (const auto& a : s.actions)
    if (const auto* st = std::get_if<StoredAction>(&a)) out.push_back(st);
  return out;
}

bool contains(const std::vector<StepId>& v, StepId s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::vector<ConcurrencyViolation> check_intra_step(const PartialGrafcet& p) {
  std::vector<ConcurrencyViolation> out;
  for (const auto& s : p.steps) {
    const auto stored = stored_actions(s);
    std::set<std::string> vars;
    for (std::size_t i = 0; i < stored.size(); ++i)
      for (std::size_t j = i + 1; j < stored.size(); ++j)
        if (depends_on(Action{*stored[i]}, Action{*stored[j]})) {
          vars.insert(stored[i]->target);
          vars.insert(stored[j]->target);
        }
    if (vars.empty()) continue;
    std::vector<std::string> elements{step_label(p, s.id)};
    elements.insert(elements.end(), vars.begin(), vars.end());
    out.push_back({ConcurrencyRule::IntraStepDep, p.name, std::move(elements),
                   "stored actions of one step depend on each other; their order is unspecified"});
  }
  return out;
}

std::vector<ConcurrencyViolation> check_entry_multiplicity(const Grafcet& g) {
  std::vector<ConcurrencyViolation> out;
  for (const auto& p : g.partials) {
    std::vector<std::string> initial, marked;
    for (const auto& s : p.steps) {
      if (s.initial) initial.push_back(step_label(p, s.id));
      if (s.marked) marked.push_back(step_label(p, s.id));
    }
    if (initial.size() > 1)
      out.push_back({ConcurrencyRule::MultiInitial, p.name, initial, "more than one initial step"});
    if (marked.size() > 1)
      out.push_back({ConcurrencyRule::MultiInitial, p.name, marked, "more than one marked step"});
  }
  for (const auto& q : g.partials)
    for (const auto& s : q.steps)
      for (const auto& a : s.actions) {
        const auto* f = std::get_if<ForcingAction>(&a);
        if (!f || f->situation != SituationKind::Explicit || f->steps.size() <= 1) continue;
        std::vector<std::string> elements{step_label(q, s.id)};
        for (auto id : f->steps) elements.push_back(f->target_partial + "/step " + std::to_string(id));
        out.push_back({ConcurrencyRule::ForcedMulti, f->target_partial, std::move(elements),
                       "forcing order activates several steps at once"});
      }
  return out;
}

std::vector<ConcurrencyViolation> check_source_transitions(const PartialGrafcet& p) {
  std::vector<ConcurrencyViolation> out;
  for (const auto& t : p.transitions)
    if (t.upstream.empty())
      out.push_back({ConcurrencyRule::SourceTransition, p.name, {p.name + "/" + t.id},
                     "source transition can activate its downstream steps at any time"});
  return out;
}

bool conditions_exclusive(const Grafcet& g, const Expr& a, const Expr& b) {
  auto fa = free_vars(a);
  auto fb = free_vars(b);
  fa.vars.insert(fb.vars.begin(), fb.vars.end());
  std::vector<std::string> names;
  std::vector<Sort> sorts;
  for (const auto& v : fa.vars) {
    const auto* decl = g.find_variable(v);
    names.push_back(v);
    sorts.push_back(decl ? decl->sort : Sort::Integer);
  }
  const auto layout = std::make_shared<const VarLayout>(std::move(names), std::move(sorts));
  const auto ctx = DomainContext::for_grafcet(g);
  // Refinement is order-sensitive (x != 4 refines nothing until x is known),
  // so both orders are tried.
  const auto top = AbstractEnv::top(layout);
  return filter(filter(top, a, ctx), b, ctx).is_bottom() ||
         filter(filter(top, b, ctx), a, ctx).is_bottom();
}

ConcurrentStepSets concurrent_steps(const Grafcet& g, const PartialGrafcet& p) {
  ConcurrentStepSets cs;
  auto pairwise = [&](const auto& steps) {
    for (auto a : steps)
      for (auto b : steps) cs.add(a, b);
  };

  const auto ep = entry_nodes(g, p);
  pairwise(ep.entries);
  for (const auto& q : g.partials)
    for (const auto& s : q.steps)
      for (const auto& a : s.actions)
        if (const auto* f = std::get_if<ForcingAction>(&a);
            f && f->target_partial == p.name && f->situation == SituationKind::Explicit)
          pairwise(f->steps);
  for (const auto& t : p.transitions) pairwise(t.downstream);

  // Conflicting transitions that the standard's evolution rules may fire in
  // the same instant.
  std::vector<std::pair<const Transition*, const Transition*>> conflicts;
  for (std::size_t i = 0; i < p.transitions.size(); ++i)
    for (std::size_t j = i + 1; j < p.transitions.size(); ++j) {
      const auto& t1 = p.transitions[i];
      const auto& t2 = p.transitions[j];
      const bool share = std::any_of(t1.upstream.begin(), t1.upstream.end(),
                                     [&](StepId s) { return contains(t2.upstream, s); });
      if (share && !conditions_exclusive(g, t1.condition, t2.condition))
        conflicts.emplace_back(&t1, &t2);
    }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& t : p.transitions) {
      for (const auto& s : p.steps) {
        if (contains(t.upstream, s.id)) continue;
        const bool with_all = std::all_of(t.upstream.begin(), t.upstream.end(),
                                          [&](StepId u) { return cs.concurrent(s.id, u); });
        if (!with_all) continue;
        for (auto d : t.downstream) changed |= cs.add(s.id, d);
      }
    }
    for (const auto& [t1, t2] : conflicts) {
      const bool co_enabled = std::all_of(t1->upstream.begin(), t1->upstream.end(), [&](StepId u) {
        return std::all_of(t2->upstream.begin(), t2->upstream.end(),
                           [&](StepId v) { return u == v || cs.concurrent(u, v); });
      });
      if (!co_enabled) continue;
      for (auto a : t1->downstream)
        for (auto b : t2->downstream) changed |= cs.add(a, b);
    }
  }
  return cs;
}

std::vector<ConcurrencyViolation> check_parallel_writes(const PartialGrafcet& p,
                                                        const ConcurrentStepSets& cs) {
  std::set<ConcurrencyViolation> found;
  auto report = [&](StepId a, StepId b, const std::string& var, const std::string& what) {
    auto [x, y] = std::minmax(a, b);
    found.insert({ConcurrencyRule::ParallelWrite, p.name,
                  {step_label(p, x), step_label(p, y), var},
                  what + " on " + var + " from concurrent steps"});
  };

  for (const auto& s : p.steps) {
    for (auto other_id : cs.of(s.id)) {
      const auto* other = p.find_step(other_id);
      if (!other) continue;
      for (const auto* a : stored_actions(s)) {
        for (const auto* b : stored_actions(*other)) {
          if (a->target == b->target) report(s.id, other_id, a->target, "write/write");
          else if (read_variables(Action{*b}).count(a->target))
            report(s.id, other_id, a->target, "write/read");
        }
        for (const auto& t : p.transitions)
          if (contains(t.upstream, other_id) && !contains(t.upstream, s.id) &&
              free_vars(t.condition).vars.count(a->target))
            report(s.id, other_id, a->target, "write/read via transition " + t.id);
      }
    }
  }
  return {found.begin(), found.end()};
}

std::vector<ConcurrencyViolation> check_cross_partial(const Grafcet& g) {
  std::map<std::string, std::set<std::string>> writers;
  for (const auto& p : g.partials)
    for (const auto& s : p.steps)
      for (const auto& a : s.actions)
        if (const auto* st = std::get_if<StoredAction>(&a)) writers[st->target].insert(p.name);
  std::vector<ConcurrencyViolation> out;
  for (const auto& [var, partials] : writers) {
    if (partials.size() < 2) continue;
    std::vector<std::string> elements{var};
    elements.insert(elements.end(), partials.begin(), partials.end());
    out.push_back({ConcurrencyRule::CrossPartialWrite, "", std::move(elements),
                   var + " is written by stored actions in several partial Grafcets"});
  }
  return out;
}

bool ConcurrencyReport::partial_ok(const std::string& name) const {
  auto it = partial_passed.find(name);
  return it != partial_passed.end() && it->second;
}

ConcurrencyReport gate(const Grafcet& g) {
  ConcurrencyReport r;
  auto append = [&](std::vector<ConcurrencyViolation> v) {
    r.violations.insert(r.violations.end(), v.begin(), v.end());
  };
  for (const auto& p : g.partials) {
    r.partial_passed[p.name] = true;
    append(check_intra_step(p));
    append(check_source_transitions(p));
    auto cs = concurrent_steps(g, p);
    append(check_parallel_writes(p, cs));
    r.concurrent.emplace(p.name, std::move(cs));
  }
  append(check_entry_multiplicity(g));
  const auto cross = check_cross_partial(g);
  for (const auto& v : cross)
    for (std::size_t i = 1; i < v.elements.size(); ++i) r.partial_passed[v.elements[i]] = false;
  append(cross);

  for (const auto& v : r.violations)
    if (!v.partial.empty()) r.partial_passed[v.partial] = false;
  r.passed = r.violations.empty();
  return r;
}

}  // namespace grafcet
