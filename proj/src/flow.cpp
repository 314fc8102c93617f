#include "grafcet/flow.hpp"

#include <algorithm>

namespace grafcet {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool contains(const std::vector<StepId>& v, StepId s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}
}  // namespace

std::string step_node_id(StepId s) { return std::to_string(s); }

std::string deactivation_node_id(const std::string& transition, StepId owner, std::size_t index) {
  return transition + ":deact:" + std::to_string(owner) + "#" + std::to_string(index);
}

std::string event_node_id(StepId owner, std::size_t index) {
  return std::to_string(owner) + ":event#" + std::to_string(index);
}

std::string FlowNode::id() const {
  return std::visit(overloaded{
                        [](const StepNode& s) { return step_node_id(s.step); },
                        [](const TransitionNode& t) { return t.transition; },
                        [](const ActionNode& a) { return a.id; },
                    },
                    v);
}

std::string FlowNode::kind_name() const {
  return is_step() ? "step" : is_transition() ? "transition" : "action";
}

std::string FlowNode::label() const {
  return std::visit(overloaded{
                        [](const StepNode& s) { return "Step " + std::to_string(s.step); },
                        [](const TransitionNode& t) { return "Transition " + t.transition; },
                        [](const ActionNode& a) { return "Action " + a.id; },
                    },
                    v);
}

std::optional<std::size_t> NormalizedFlow::find(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id() == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> NormalizedFlow::find_step(StepId s) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (const auto* n = std::get_if<StepNode>(&nodes[i].v); n && n->step == s) return i;
  return std::nullopt;
}

std::optional<std::size_t> NormalizedFlow::find_transition(const std::string& t) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (const auto* n = std::get_if<TransitionNode>(&nodes[i].v); n && n->transition == t)
      return i;
  return std::nullopt;
}

bool NormalizedFlow::loop_head(std::size_t n) const {
  return std::any_of(back_edges.begin(), back_edges.end(),
                     [n](const auto& e) { return e.second == n; });
}

namespace {

void add_edge(NormalizedFlow& f, std::size_t from, std::size_t to) {
  if (std::find(f.succ[from].begin(), f.succ[from].end(), to) != f.succ[from].end()) return;
  f.succ[from].push_back(to);
  f.pred[to].push_back(from);
}

// Iterative DFS from the seeds: back edges and reverse postorder.
void order_nodes(NormalizedFlow& f) {
  const auto n = f.nodes.size();
  enum Color { White, Grey, Black };
  std::vector<Color> color(n, White);
  std::vector<std::size_t> postorder;
  std::vector<std::size_t> roots = f.entries;
  roots.insert(roots.end(), f.forced.begin(), f.forced.end());
  for (auto root : roots) {
    if (color[root] != White) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < f.succ[node].size()) {
        const auto s = f.succ[node][next++];
        if (color[s] == White) {
          color[s] = Grey;
          stack.emplace_back(s, 0);
        } else if (color[s] == Grey) {
          f.back_edges.emplace(node, s);
        }
      } else {
        color[node] = Black;
        postorder.push_back(node);
        stack.pop_back();
      }
    }
  }
  f.order.assign(postorder.rbegin(), postorder.rend());
  for (std::size_t i = 0; i < n; ++i)
    if (color[i] == White) f.order.push_back(i);
}

}  // namespace

NormalizedFlow normalize(const Grafcet& g, const PartialGrafcet& p) {
  NormalizedFlow f;
  f.partial = p.name;

  std::map<StepId, std::size_t> step_node;
  std::map<StepId, std::vector<std::size_t>> event_nodes;
  for (const auto& s : p.steps) {
    StepNode node{s.id, {}};
    for (const auto& a : s.actions)
      if (const auto* st = std::get_if<StoredAction>(&a);
          st && st->trigger == TriggerKind::OnActivation)
        node.on_activation.push_back(*st);
    step_node[s.id] = f.nodes.size();
    f.nodes.push_back({std::move(node)});
    f.context_steps.push_back({s.id});
  }
  std::map<std::string, std::size_t> transition_node;
  for (const auto& t : p.transitions) {
    transition_node[t.id] = f.nodes.size();
    f.nodes.push_back({TransitionNode{t.id, t.upstream, t.condition}});
    f.context_steps.push_back(t.upstream);
  }
  for (const auto& s : p.steps)
    for (std::size_t i = 0; i < s.actions.size(); ++i) {
      const auto* st = std::get_if<StoredAction>(&s.actions[i]);
      if (!st || st->trigger != TriggerKind::OnEvent) continue;
      event_nodes[s.id].push_back(f.nodes.size());
      f.nodes.push_back({ActionNode{event_node_id(s.id, i), ActionRole::Event, s.id, i, {},
                                    st->target, st->value, st->event}});
      f.context_steps.push_back({s.id});
    }

  f.succ.resize(f.nodes.size());
  f.pred.resize(f.nodes.size());

  // Step -> (event branch)* -> downstream transitions.
  for (const auto& s : p.steps) {
    std::vector<std::size_t> sources{step_node[s.id]};
    const auto& events = event_nodes[s.id];
    sources.insert(sources.end(), events.begin(), events.end());
    for (auto src : sources) {
      for (auto ev : events) add_edge(f, src, ev);
      for (const auto& t : p.transitions)
        if (contains(t.upstream, s.id)) add_edge(f, src, transition_node[t.id]);
    }
  }

  // Transition -> deactivation effects of its upstream steps -> downstream steps.
  for (const auto& t : p.transitions) {
    std::size_t last = transition_node[t.id];
    for (auto u : t.upstream) {
      const auto* step = p.find_step(u);
      if (!step) continue;
      for (std::size_t i = 0; i < step->actions.size(); ++i) {
        const auto* st = std::get_if<StoredAction>(&step->actions[i]);
        if (!st || st->trigger != TriggerKind::OnDeactivation) continue;
        const auto id = f.nodes.size();
        f.nodes.push_back({ActionNode{deactivation_node_id(t.id, u, i), ActionRole::Deactivation,
                                      u, i, t.id, st->target, st->value, std::nullopt}});
        f.context_steps.push_back(t.upstream);
        f.succ.emplace_back();
        f.pred.emplace_back();
        add_edge(f, last, id);
        last = id;
      }
    }
    for (auto d : t.downstream)
      if (step_node.count(d)) add_edge(f, last, step_node[d]);
  }

  // Join slots for synchronizing transitions.
  f.slot_count.assign(f.nodes.size(), 1);
  for (const auto& t : p.transitions) {
    if (t.upstream.size() < 2) continue;
    const auto tn = transition_node[t.id];
    f.slot_count[tn] = t.upstream.size();
    for (std::size_t k = 0; k < t.upstream.size(); ++k) {
      const auto u = t.upstream[k];
      if (!step_node.count(u)) continue;
      f.edge_slot[{step_node[u], tn}] = k;
      for (auto ev : event_nodes[u]) f.edge_slot[{ev, tn}] = k;
    }
  }

  const auto ep = entry_nodes(g, p);
  for (auto s : ep.entries)
    if (step_node.count(s)) f.entries.push_back(step_node[s]);
  for (auto s : ep.forced)
    if (step_node.count(s)) f.forced.push_back(step_node[s]);
  order_nodes(f);

  f.concurrent = concurrent_steps(g, p);

  const auto tracked = tracked_variables(g, p);
  std::vector<Sort> sorts;
  for (const auto& v : tracked) sorts.push_back(g.find_variable(v)->sort);
  f.layout = std::make_shared<const VarLayout>(tracked, std::move(sorts));

  // Variables written by steps that may be active alongside each node.
  std::map<StepId, std::set<std::size_t>> writes;
  for (const auto& s : p.steps)
    for (const auto& a : s.actions)
      if (const auto* st = std::get_if<StoredAction>(&a))
        if (auto i = f.layout->index(st->target)) writes[s.id].insert(*i);

  const auto base = DomainContext::for_grafcet(g);
  for (std::size_t n = 0; n < f.nodes.size(); ++n) {
    std::set<std::size_t> h;
    for (auto c : f.context_steps[n])
      for (auto other : f.concurrent.of(c)) {
        const auto& w = writes[other];
        h.insert(w.begin(), w.end());
      }
    f.havoc.emplace_back(h.begin(), h.end());

    DomainContext ctx = base;
    const bool deactivating = std::holds_alternative<ActionNode>(f.nodes[n].v) &&
                              std::get<ActionNode>(f.nodes[n].v).role == ActionRole::Deactivation;
    ctx.step_truth = [partial = p.name, known = f.context_steps[n], cs = f.concurrent,
                      steps = [&] {
                        std::set<StepId> ids;
                        for (const auto& s : p.steps) ids.insert(s.id);
                        return ids;
                      }(),
                      deactivating](const StepRef& r) {
      if (r.partial != partial || !steps.count(r.step) || known.empty()) return Truth::Unknown;
      if (contains(known, r.step)) return deactivating ? Truth::Unknown : Truth::True;
      for (auto k : known)
        if (cs.concurrent(k, r.step)) return Truth::Unknown;
      return Truth::False;
    };
    f.contexts.push_back(std::move(ctx));
  }
  return f;
}

}  // namespace grafcet
