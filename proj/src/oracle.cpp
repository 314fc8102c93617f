#include "grafcet/oracle.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

namespace grafcet {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

class HookValuation : public Valuation {
 public:
  std::function<std::int64_t(const std::string&)> var;
  std::function<bool(const StepRef&)> step;
  std::function<bool(EdgeDir, const Expr&)> edge_fn;

  std::int64_t value(const std::string& v) const override { return var(v); }
  bool step_active(const StepRef& s) const override { return step(s); }
  bool edge(EdgeDir d, const Expr& e) const override { return edge_fn(d, e); }
};

// Calls `f` with every vector in the product of the closed ranges.
void for_each_combination(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges,
                          const std::function<void(const std::vector<std::int64_t>&)>& f) {
  std::vector<std::int64_t> cur;
  for (const auto& r : ranges) {
    if (r.first > r.second) return;
    cur.push_back(r.first);
  }
  while (true) {
    f(cur);
    std::size_t i = 0;
    for (; i < cur.size(); ++i) {
      if (cur[i] < ranges[i].second) {
        ++cur[i];
        break;
      }
      cur[i] = ranges[i].first;
    }
    if (i == cur.size()) return;
  }
}

std::pair<std::int64_t, std::int64_t> range_of(Sort s, const OracleOptions& o) {
  return s == Sort::Boolean ? std::pair<std::int64_t, std::int64_t>{0, 1}
                            : std::pair{o.input_min, o.input_max};
}

// Whether a value may be stored into a variable of the given sort.
bool fits(Sort s, std::int64_t v) { return s == Sort::Integer || v == 0 || v == 1; }

std::vector<const Expr*> expressions_of(const PartialGrafcet& p) {
  std::vector<const Expr*> out;
  for (const auto& t : p.transitions) out.push_back(&t.condition);
  for (const auto& s : p.steps)
    for (const auto& a : s.actions)
      if (const auto* st = std::get_if<StoredAction>(&a)) {
        out.push_back(&st->value);
        if (st->trigger == TriggerKind::OnEvent) out.push_back(&st->event);
      }
  return out;
}

bool has_edges(const PartialGrafcet& p) {
  for (const auto* e : expressions_of(p))
    if (contains_edge(*e)) return true;
  return false;
}

// Situations forcing orders elsewhere in the Grafcet can impose on `p`.
std::vector<std::set<StepId>> forced_situations(const Grafcet& g, const PartialGrafcet& p) {
  std::set<std::set<StepId>> out;
  for (const auto& q : g.partials)
    for (const auto& s : q.steps)
      for (const auto& a : s.actions) {
        const auto* f = std::get_if<ForcingAction>(&a);
        if (!f || f->target_partial != p.name) continue;
        if (f->situation == SituationKind::Explicit) {
          out.insert({f->steps.begin(), f->steps.end()});
        } else if (f->situation == SituationKind::Init) {
          std::set<StepId> init;
          for (const auto& st : p.steps)
            if (st.initial) init.insert(st.id);
          out.insert(init);
        }
      }
  return {out.begin(), out.end()};
}

std::vector<std::size_t> enabled(const PartialGrafcet& p, const std::vector<bool>& active,
                                 const std::map<StepId, std::size_t>& step_index) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.transitions.size(); ++i) {
    const auto& t = p.transitions[i];
    if (std::all_of(t.upstream.begin(), t.upstream.end(),
                    [&](StepId u) { return active[step_index.at(u)]; }))
      out.push_back(i);
  }
  return out;
}

class Explorer {
 public:
  Explorer(const Grafcet& g, const PartialGrafcet& p, const OracleOptions& o)
      : g_(g), p_(p), o_(o), edges_(has_edges(p)) {
    obs_.tracked = tracked_variables(g, p);
    for (std::size_t i = 0; i < obs_.tracked.size(); ++i) {
      tracked_[obs_.tracked[i]] = i;
      tracked_sort_.push_back(g.find_variable(obs_.tracked[i])->sort);
    }
    for (std::size_t i = 0; i < p.steps.size(); ++i) step_index_[p.steps[i].id] = i;
    std::set<std::string> vars;
    std::set<StepRef> foreign;
    for (const auto* e : expressions_of(p)) {
      const auto fv = free_vars(*e);
      for (const auto& v : fv.vars)
        if (!tracked_.count(v)) vars.insert(v);
      for (const auto& s : fv.steps)
        if (s.partial != p.name) foreign.insert(s);
    }
    for (const auto& v : vars) {
      input_index_[v] = input_ranges_.size();
      input_ranges_.push_back(range_of(g.find_variable(v)->sort, o));
    }
    for (const auto& s : foreign) {
      foreign_index_[s] = input_ranges_.size();
      input_ranges_.push_back({0, 1});
    }
    forced_ = forced_situations(g, p);
  }

  Observations run() {
    const auto ep = entry_nodes(g_, p_);
    std::vector<bool> active(p_.steps.size(), false);
    for (auto s : ep.entries) active[step_index_.at(s)] = true;
    const Store zeros(obs_.tracked.size(), 0);

    std::vector<State> frontier;
    for_each_combination(input_ranges_, [&](const std::vector<std::int64_t>& in) {
      State s{active, zeros, in, in};
      if (activate(s, ep.entries)) push(frontier, std::move(s));
    });
    for (unsigned d = 0; !frontier.empty(); ++d) {
      const bool expand = o_.depth == 0 || d < o_.depth;
      std::vector<State> next;
      for (const auto& s : frontier) {
        observe(s);
        if (expand) successors(s, next);
      }
      if (!expand) break;
      frontier = std::move(next);
    }
    obs_.saturated = frontier.empty();
    obs_.states = visited_.size();
    return std::move(obs_);
  }

 private:
  struct State {
    std::vector<bool> active;
    Store store;
    std::vector<std::int64_t> inputs;
    std::vector<std::int64_t> prev;
  };

  void push(std::vector<State>& out, State s) {
    if (!edges_) s.prev.clear();
    std::vector<std::int64_t> key(s.active.begin(), s.active.end());
    key.insert(key.end(), s.store.begin(), s.store.end());
    key.insert(key.end(), s.inputs.begin(), s.inputs.end());
    key.insert(key.end(), s.prev.begin(), s.prev.end());
    if (!visited_.insert(std::move(key)).second) return;
    if (visited_.size() > o_.state_cap) throw StateCapError(o_.state_cap);
    out.push_back(std::move(s));
  }

  HookValuation valuation(const std::vector<bool>& active, const Store& store,
                          const std::vector<std::int64_t>& inputs,
                          const std::vector<std::int64_t>& prev) const {
    HookValuation v;
    auto lookup = [this, &store](const std::vector<std::int64_t>& in) {
      return [this, &store, &in](const std::string& name) -> std::int64_t {
        if (auto it = tracked_.find(name); it != tracked_.end()) return store[it->second];
        return in[input_index_.at(name)];
      };
    };
    auto steps = [this, &active](const std::vector<std::int64_t>& in) {
      return [this, &active, &in](const StepRef& r) -> bool {
        if (r.partial == p_.name) return active[step_index_.at(r.step)];
        return in[foreign_index_.at(r)] != 0;
      };
    };
    v.var = lookup(inputs);
    v.step = steps(inputs);
    v.edge_fn = [this, &prev, &inputs, lookup, steps](EdgeDir dir, const Expr& e) {
      if (prev.empty()) return false;
      HookValuation before, now;
      before.var = lookup(prev);
      before.step = steps(prev);
      now.var = lookup(inputs);
      now.step = steps(inputs);
      before.edge_fn = now.edge_fn = [](EdgeDir, const Expr&) { return false; };
      const bool was = holds(e, before), is = holds(e, now);
      return dir == EdgeDir::Rising ? (!was && is) : (was && !is);
    };
    return v;
  }

  // Executes a stored action in place; false when the value does not fit the sort.
  bool store_into(Store& store, const StoredAction& a, const Valuation& v) const {
    const auto i = tracked_.at(a.target);
    const auto value = evaluate(a.value, v);
    if (!fits(tracked_sort_[i], value)) return false;
    store[i] = value;
    return true;
  }

  void observe(const State& s) {
    std::set<StepId> situation;
    for (const auto& step : p_.steps)
      if (s.active[step_index_.at(step.id)]) situation.insert(step.id);
    obs_.situations.insert(std::move(situation));
    for (auto t : enabled(p_, s.active, step_index_)) obs_.at[p_.transitions[t].id].insert(s.store);
    for (const auto& step : p_.steps) {
      if (!s.active[step_index_.at(step.id)]) continue;
      for (std::size_t i = 0; i < step.actions.size(); ++i) {
        const auto* st = std::get_if<StoredAction>(&step.actions[i]);
        if (st && st->trigger == TriggerKind::OnEvent) obs_.at[event_node_id(step.id, i)].insert(s.store);
      }
    }
  }

  void successors(const State& s, std::vector<State>& out) {
    // Input changes.
    for_each_combination(input_ranges_, [&](const std::vector<std::int64_t>& in) {
      if (in != s.inputs) push(out, {s.active, s.store, in, s.inputs});
    });

    const auto v = valuation(s.active, s.store, s.inputs, s.prev);

    // Event actions.
    for (const auto& step : p_.steps) {
      if (!s.active[step_index_.at(step.id)]) continue;
      for (const auto& a : step.actions) {
        const auto* st = std::get_if<StoredAction>(&a);
        if (!st || st->trigger != TriggerKind::OnEvent || !holds(st->event, v)) continue;
        State n = s;
        if (store_into(n.store, *st, v)) push(out, std::move(n));
      }
    }

    // Firing any nonempty set of firable transitions together.
    std::vector<std::size_t> firable;
    for (auto t : enabled(p_, s.active, step_index_))
      if (holds(p_.transitions[t].condition, v)) firable.push_back(t);
    if (firable.size() > 16) firable.resize(16);
    for (std::uint32_t mask = 1; mask < (1u << firable.size()); ++mask) {
      std::vector<std::size_t> set;
      for (std::size_t k = 0; k < firable.size(); ++k)
        if (mask & (1u << k)) set.push_back(firable[k]);
      fire(s, set, v, out);
    }

    // Forcing orders from other partials.
    for (const auto& f : forced_) {
      State n = s;
      std::fill(n.active.begin(), n.active.end(), false);
      for (auto id : f) n.active[step_index_.at(id)] = true;
      if (activate(n, f)) push(out, std::move(n));
    }
  }

  // Records the store at each newly activated step, then runs their
  // activation actions against the new situation.
  bool activate(State& n, const std::set<StepId>& steps) {
    for (auto d : steps) obs_.at[step_node_id(d)].insert(n.store);
    Store updated = n.store;
    for (const auto& step : p_.steps) {
      if (!steps.count(step.id)) continue;
      for (const auto& a : step.actions) {
        const auto* st = std::get_if<StoredAction>(&a);
        if (!st || st->trigger != TriggerKind::OnActivation) continue;
        // Later activation actions see earlier effects.
        const auto cur = valuation(n.active, updated, n.inputs, n.prev);
        if (!store_into(updated, *st, cur)) return false;
      }
    }
    n.store = std::move(updated);
    return true;
  }

  void fire(const State& s, const std::vector<std::size_t>& set, const Valuation&,
            std::vector<State>& out) {
    State n = s;
    std::set<StepId> left, entered;
    for (auto ti : set) {
      const auto& t = p_.transitions[ti];
      for (auto u : t.upstream) {
        if (!left.insert(u).second) continue;
        const auto& step = *p_.find_step(u);
        for (std::size_t i = 0; i < step.actions.size(); ++i) {
          const auto* st = std::get_if<StoredAction>(&step.actions[i]);
          if (!st || st->trigger != TriggerKind::OnDeactivation) continue;
          obs_.at[deactivation_node_id(t.id, u, i)].insert(n.store);
          const auto cur = valuation(s.active, n.store, n.inputs, n.prev);
          if (!store_into(n.store, *st, cur)) return;
        }
      }
      entered.insert(t.downstream.begin(), t.downstream.end());
      obs_.fired.insert(t.id);
    }
    for (auto u : left) n.active[step_index_.at(u)] = false;
    for (auto d : entered) n.active[step_index_.at(d)] = true;
    if (activate(n, entered)) push(out, std::move(n));
  }

  const Grafcet& g_;
  const PartialGrafcet& p_;
  const OracleOptions& o_;
  bool edges_;
  Observations obs_;
  std::map<std::string, std::size_t> tracked_;
  std::vector<Sort> tracked_sort_;
  std::map<StepId, std::size_t> step_index_;
  std::map<std::string, std::size_t> input_index_;
  std::map<StepRef, std::size_t> foreign_index_;
  std::vector<std::pair<std::int64_t, std::int64_t>> input_ranges_;
  std::vector<std::set<StepId>> forced_;
  std::unordered_set<std::vector<std::int64_t>, VecHash> visited_;
};

}  // namespace

Observations concrete_oracle(const Grafcet& g, const PartialGrafcet& p, const OracleOptions& o) {
  return Explorer(g, p, o).run();
}

Observations execute_flow(const Grafcet& g, const NormalizedFlow& f, const OracleOptions& o,
                          unsigned max_length) {
  Observations obs;
  obs.tracked = f.layout->names();
  const auto& layout = *f.layout;
  std::map<std::string, std::size_t> tracked;
  for (std::size_t i = 0; i < layout.size(); ++i) tracked[layout.name(i)] = i;

  // Free choices at a node: untracked variables, edge atoms, unresolved step atoms.
  struct Choices {
    std::map<std::string, std::size_t> vars, edges;
    std::map<StepRef, std::size_t> steps;
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  };
  std::vector<Choices> choices(f.nodes.size());
  for (std::size_t n = 0; n < f.nodes.size(); ++n) {
    std::vector<Expr> exprs;
    std::visit([&](const auto& node) {
      using T = std::decay_t<decltype(node)>;
      if constexpr (std::is_same_v<T, StepNode>) {
        for (const auto& a : node.on_activation) exprs.push_back(a.value);
      } else if constexpr (std::is_same_v<T, TransitionNode>) {
        exprs.push_back(node.condition);
      } else {
        exprs.push_back(node.value);
        if (node.guard) exprs.push_back(*node.guard);
      }
    }, f.nodes[n].v);
    auto& c = choices[n];
    std::function<void(const Expr&)> edges = [&](const Expr& e) {
      if (e.is<EdgeAtom>()) {
        c.edges.emplace(e.to_string(), 0);
        return;
      }
      std::visit([&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Not>) edges(node.operand);
        else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, And> ||
                           std::is_same_v<T, Or> || std::is_same_v<T, Arith>) {
          edges(node.lhs);
          edges(node.rhs);
        }
      }, e.node().v);
    };
    for (const auto& e : exprs) {
      const auto fv = free_vars(e);
      for (const auto& v : fv.vars)
        if (!tracked.count(v) && !c.vars.count(v)) {
          c.vars[v] = c.ranges.size();
          c.ranges.push_back(range_of(g.find_variable(v)->sort, o));
        }
      for (const auto& s : fv.steps)
        if (f.contexts[n].step(s) == Truth::Unknown && !c.steps.count(s)) {
          c.steps[s] = c.ranges.size();
          c.ranges.push_back({0, 1});
        }
      edges(e);
    }
    for (auto& [k, idx] : c.edges) {
      idx = c.ranges.size();
      c.ranges.push_back({0, 1});
    }
  }

  // Runs `body` once per choice valuation of node `n` over `store`.
  auto with_choices = [&](std::size_t n, const Store& store,
                          const std::function<void(const Valuation&)>& body) {
    const auto& c = choices[n];
    for_each_combination(c.ranges, [&](const std::vector<std::int64_t>& pick) {
      HookValuation v;
      v.var = [&](const std::string& name) -> std::int64_t {
        if (auto it = tracked.find(name); it != tracked.end()) return store[it->second];
        return pick[c.vars.at(name)];
      };
      v.step = [&](const StepRef& r) {
        const auto t = f.contexts[n].step(r);
        return t == Truth::Unknown ? pick[c.steps.at(r)] != 0 : t == Truth::True;
      };
      v.edge_fn = [&](EdgeDir dir, const Expr& e) {
        return pick[c.edges.at(Expr::edge(dir, e).to_string())] != 0;
      };
      body(v);
    });
  };

  auto assign_into = [&](Store& s, const std::string& target, const Expr& value, const Valuation& v) {
    const auto i = tracked.at(target);
    const auto x = evaluate(value, v);
    if (!fits(layout.sort(i), x)) return false;
    s[i] = x;
    return true;
  };

  std::set<std::pair<std::size_t, Store>> visited;
  std::vector<std::pair<std::size_t, Store>> frontier;
  auto push = [&](std::vector<std::pair<std::size_t, Store>>& out, std::size_t n, const Store& s) {
    // Variables written concurrently arrive with any value of their sort range.
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (auto i : f.havoc[n]) ranges.push_back(range_of(layout.sort(i), o));
    for_each_combination(ranges, [&](const std::vector<std::int64_t>& h) {
      Store t = s;
      for (std::size_t k = 0; k < h.size(); ++k) t[f.havoc[n][k]] = h[k];
      if (visited.emplace(n, t).second) {
        if (visited.size() > o.state_cap) throw StateCapError(o.state_cap);
        out.emplace_back(n, std::move(t));
      }
    });
  };
  const Store zeros(layout.size(), 0);
  for (auto n : f.entries) push(frontier, n, zeros);
  for (auto n : f.forced) push(frontier, n, zeros);

  for (unsigned len = 0; !frontier.empty(); ++len) {
    for (const auto& [n, s] : frontier) obs.at[f.nodes[n].id()].insert(s);
    if (max_length != 0 && len >= max_length) break;
    std::vector<std::pair<std::size_t, Store>> next;
    for (const auto& [n, s] : frontier) {
      std::set<Store> outs;
      with_choices(n, s, [&](const Valuation& v) {
        Store t = s;
        if (const auto* step = std::get_if<StepNode>(&f.nodes[n].v)) {
          for (const auto& a : step->on_activation)
            if (!assign_into(t, a.target, a.value, v)) return;
        } else if (const auto* tr = std::get_if<TransitionNode>(&f.nodes[n].v)) {
          if (!holds(tr->condition, v)) return;
        } else {
          const auto& a = std::get<ActionNode>(f.nodes[n].v);
          if (a.guard && !holds(*a.guard, v)) return;
          if (!assign_into(t, a.target, a.value, v)) return;
        }
        outs.insert(std::move(t));
      });
      for (const auto& t : outs) {
        if (const auto* tr = std::get_if<TransitionNode>(&f.nodes[n].v)) obs.fired.insert(tr->transition);
        for (auto succ : f.succ[n]) push(next, succ, t);
      }
    }
    frontier = std::move(next);
  }
  obs.saturated = frontier.empty();
  obs.states = visited.size();
  return obs;
}

std::set<std::set<StepId>> reachable_situations(const Grafcet& g, const PartialGrafcet& p,
                                                std::size_t cap) {
  std::map<StepId, std::size_t> step_index;
  for (std::size_t i = 0; i < p.steps.size(); ++i) step_index[p.steps[i].id] = i;
  const auto ep = entry_nodes(g, p);
  const auto forced = forced_situations(g, p);

  std::set<std::set<StepId>> seen;
  std::vector<std::set<StepId>> work;
  auto push = [&](const std::set<StepId>& s) {
    if (!seen.insert(s).second) return;
    if (seen.size() > cap) throw StateCapError(cap);
    work.push_back(s);
  };
  push(ep.entries);
  while (!work.empty()) {
    const auto cur = work.back();
    work.pop_back();
    for (const auto& f : forced) push(f);
    std::vector<bool> active(p.steps.size(), false);
    for (auto s : cur) active[step_index.at(s)] = true;
    auto en = enabled(p, active, step_index);
    if (en.size() > 16) en.resize(16);
    for (std::uint32_t mask = 1; mask < (1u << en.size()); ++mask) {
      std::set<StepId> next = cur, entered;
      for (std::size_t k = 0; k < en.size(); ++k) {
        if (!(mask & (1u << k))) continue;
        const auto& t = p.transitions[en[k]];
        for (auto u : t.upstream) next.erase(u);
        entered.insert(t.downstream.begin(), t.downstream.end());
      }
      next.insert(entered.begin(), entered.end());
      push(next);
    }
  }
  return seen;
}

}  // namespace grafcet
