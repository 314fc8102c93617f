#include "grafcet/analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace grafcet {

IterationLimitError::IterationLimitError(std::string partial, std::size_t visits)
    : std::runtime_error("ITERATION_LIMIT: analysis of " + partial + " exceeded " +
                         std::to_string(visits) + " node visits"),
      partial_(std::move(partial)),
      visits_(visits) {}

const char* to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::Unreachable: return "UNREACHABLE";
    case DiagnosticKind::NeverFires: return "NEVER_FIRES";
    case DiagnosticKind::AlwaysFires: return "ALWAYS_FIRES";
    case DiagnosticKind::TransientStep: return "TRANSIENT_STEP";
    case DiagnosticKind::SortConflict: return "SORT_CONFLICT";
  }
  return "?";
}

const AbstractEnv& AnalysisResult::env(const std::string& node_id) const {
  auto n = flow.find(node_id);
  if (!n) throw std::out_of_range("no flow node " + node_id);
  return env_before[*n];
}

AbstractEnv transfer(const NormalizedFlow& flow, std::size_t n, const AbstractEnv& env) {
  if (env.is_bottom()) return env;
  const auto& ctx = flow.contexts[n];
  const auto& node = flow.nodes[n].v;
  if (const auto* s = std::get_if<StepNode>(&node)) {
    AbstractEnv out = env;
    for (const auto& a : s->on_activation) out = assign(out, a.target, a.value, ctx);
    return out;
  }
  if (const auto* t = std::get_if<TransitionNode>(&node)) return filter(env, t->condition, ctx);
  const auto& a = std::get<ActionNode>(node);
  const auto guarded = a.guard ? filter(env, *a.guard, ctx) : env;
  return assign(guarded, a.target, a.value, ctx);
}

namespace {

class Worklist {
 public:
  Worklist(WorklistOrder order, const std::vector<std::size_t>& rpo, std::size_t n)
      : order_(order), rank_(n), queued_(n, false) {
    for (std::size_t i = 0; i < rpo.size(); ++i) rank_[rpo[i]] = i;
  }

  void push(std::size_t n) {
    if (queued_[n]) return;
    queued_[n] = true;
    if (order_ == WorklistOrder::Priority) prio_.emplace(rank_[n], n);
    else items_.push_back(n);
  }

  bool empty() const { return order_ == WorklistOrder::Priority ? prio_.empty() : items_.empty(); }

  std::size_t poll() {
    std::size_t n = 0;
    switch (order_) {
      case WorklistOrder::Priority:
        n = prio_.begin()->second;
        prio_.erase(prio_.begin());
        break;
      case WorklistOrder::Fifo:
        n = items_.front();
        items_.pop_front();
        break;
      case WorklistOrder::Lifo:
        n = items_.back();
        items_.pop_back();
        break;
    }
    queued_[n] = false;
    return n;
  }

 private:
  WorklistOrder order_;
  std::vector<std::size_t> rank_;
  std::vector<bool> queued_;
  std::deque<std::size_t> items_;
  std::set<std::pair<std::size_t, std::size_t>> prio_;
};

class Fixpoint {
 public:
  Fixpoint(const NormalizedFlow& flow, const AnalysisOptions& options)
      : f_(flow), opt_(options) {
    const auto n = f_.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      slots_.emplace_back(f_.slot_count[i], AbstractEnv::bottom(f_.layout));
      growth_.emplace_back(f_.slot_count[i], 0u);
    }
  }

  std::vector<AbstractEnv> run() {
    Worklist w(opt_.order, f_.order, f_.nodes.size());
    for (std::size_t i = 0; i < f_.nodes.size(); ++i) {
      auto s = seed(i);
      if (s.is_bottom()) continue;
      slots_[i][0] = s;
      w.push(i);
    }

    while (!w.empty()) {
      const auto n = w.poll();
      visit();
      const auto e = transfer(f_, n, env(n));
      if (e.is_bottom()) continue;
      for (auto s : f_.succ[n]) {
        const auto k = slot(n, s);
        const auto c = e.havoc(f_.havoc[s]);
        auto& cur = slots_[s][k];
        if (c.leq(cur)) continue;
        auto next = cur.join(c);
        if (f_.loop_head(s) && ++growth_[s][k] > opt_.widen_delay) next = cur.widen(next);
        cur = std::move(next);
        if (opt_.on_update) opt_.on_update(s, env(s));
        w.push(s);
      }
    }

    if (opt_.narrow) narrow();

    std::vector<AbstractEnv> out;
    for (std::size_t i = 0; i < f_.nodes.size(); ++i) out.push_back(env(i));
    return out;
  }

  std::size_t visits() const { return visits_; }

 private:
  void visit() {
    if (++visits_ > opt_.max_visits) throw IterationLimitError(f_.partial, opt_.max_visits);
  }

  AbstractEnv seed(std::size_t n) const {
    auto s = AbstractEnv::bottom(f_.layout);
    if (std::count(f_.entries.begin(), f_.entries.end(), n))
      s = s.join(AbstractEnv::constant(f_.layout, 0));
    if (std::count(f_.forced.begin(), f_.forced.end(), n))
      s = s.join(AbstractEnv::top(f_.layout));
    return s.havoc(f_.havoc[n]);
  }

  std::size_t slot(std::size_t from, std::size_t to) const {
    auto it = f_.edge_slot.find({from, to});
    return it == f_.edge_slot.end() ? 0 : it->second;
  }

  AbstractEnv env(std::size_t n) const {
    AbstractEnv e = slots_[n][0];
    for (std::size_t k = 1; k < slots_[n].size(); ++k) e = e.meet(slots_[n][k]);
    return e;
  }

  // One decreasing (Gauss-Seidel) pass in reverse postorder.
  void narrow() {
    for (auto n : f_.order) {
      visit();
      for (std::size_t k = 0; k < slots_[n].size(); ++k) {
        auto contrib = k == 0 ? seed(n) : AbstractEnv::bottom(f_.layout);
        for (auto p : f_.pred[n])
          if (slot(p, n) == k) contrib = contrib.join(transfer(f_, p, env(p)).havoc(f_.havoc[n]));
        slots_[n][k] = slots_[n][k].meet(contrib);
      }
    }
  }

  const NormalizedFlow& f_;
  const AnalysisOptions& opt_;
  std::vector<std::vector<AbstractEnv>> slots_;
  std::vector<std::vector<unsigned>> growth_;
  std::size_t visits_ = 0;
};

bool determinate(const Expr& cond, const DomainContext& ctx, const VarLayout& layout) {
  if (contains_edge(cond)) return false;
  const auto fv = free_vars(cond);
  for (const auto& v : fv.vars)
    if (!layout.index(v)) return false;
  for (const auto& s : fv.steps)
    if (ctx.step(s) == Truth::Unknown) return false;
  return true;
}

// `env` re-expressed over `layout`, whose leading variables are env's own;
// the extra variables start at their sort bound.
AbstractEnv extend(const AbstractEnv& env, const LayoutPtr& layout) {
  if (env.is_bottom()) return AbstractEnv::bottom(layout);
  auto out = AbstractEnv::top(layout);
  for (std::size_t i = 0; i < env.size(); ++i) out.set(i, env.get(i));
  return out;
}

LayoutPtr extended_layout(const NormalizedFlow& f, const std::vector<const Expr*>& exprs) {
  std::vector<std::string> names = f.layout->names();
  std::vector<Sort> sorts;
  for (std::size_t i = 0; i < f.layout->size(); ++i) sorts.push_back(f.layout->sort(i));
  std::set<std::string> seen(names.begin(), names.end());
  const auto& ctx = f.contexts.front();
  for (const auto* e : exprs)
    for (const auto& v : free_vars(*e).vars)
      if (seen.insert(v).second) {
        names.push_back(v);
        sorts.push_back(ctx.sort_of ? ctx.sort_of(v).value_or(Sort::Integer) : Sort::Integer);
      }
  return std::make_shared<const VarLayout>(std::move(names), std::move(sorts));
}

}  // namespace

AnalysisResult interpret(const Grafcet& g, const PartialGrafcet& p, const AnalysisOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AnalysisResult r;
  r.flow = normalize(g, p);
  r.unsound = options.unsound;
  r.enclosed = p.enclosed();
  Fixpoint fp(r.flow, options);
  r.env_before = fp.run();
  r.iterations = fp.visits();

  for (auto&& part : {detect_unreachable(r), detect_firing(r), detect_transient(r),
                      detect_sort_conflicts(r)})
    r.diagnostics.insert(r.diagnostics.end(), part.begin(), part.end());
  r.wall_time = std::chrono::steady_clock::now() - start;
  return r;
}

std::vector<Diagnostic> detect_unreachable(const AnalysisResult& r) {
  std::vector<Diagnostic> out;
  for (auto n : r.flow.order)
    if (r.env_before[n].is_bottom())
      out.push_back({DiagnosticKind::Unreachable, r.flow.nodes[n].id(),
                     r.flow.nodes[n].label() + " is never reached"});
  return out;
}

std::vector<Diagnostic> detect_firing(const AnalysisResult& r) {
  std::vector<Diagnostic> out;
  const auto& f = r.flow;
  for (auto n : f.order) {
    const auto* t = std::get_if<TransitionNode>(&f.nodes[n].v);
    const auto& env = r.env_before[n];
    if (!t || env.is_bottom()) continue;
    const auto& ctx = f.contexts[n];
    if (filter(env, t->condition, ctx).is_bottom()) {
      out.push_back({DiagnosticKind::NeverFires, t->transition,
                     "condition " + t->condition.to_string() + " cannot hold when enabled"});
    } else if (determinate(t->condition, ctx, *f.layout) &&
               filter(env, Expr::negate(t->condition), ctx).is_bottom()) {
      out.push_back({DiagnosticKind::AlwaysFires, t->transition,
                     "condition " + t->condition.to_string() + " holds whenever enabled"});
    }
  }
  return out;
}

std::vector<Diagnostic> detect_transient(const AnalysisResult& r) {
  std::vector<Diagnostic> out;
  const auto& f = r.flow;
  for (auto sn : f.order) {
    const auto* step = std::get_if<StepNode>(&f.nodes[sn].v);
    if (!step) continue;
    std::vector<std::string> pairs;
    for (auto tin : f.order) {
      const auto* in = std::get_if<TransitionNode>(&f.nodes[tin].v);
      if (!in || contains_edge(in->condition) || r.env_before[tin].is_bottom()) continue;
      // Deactivation chain from the incoming transition to the step.
      std::vector<std::size_t> chain;
      std::size_t cur = tin;
      bool reaches = false;
      while (true) {
        if (std::count(f.succ[cur].begin(), f.succ[cur].end(), sn)) reaches = true;
        auto next = std::find_if(f.succ[cur].begin(), f.succ[cur].end(),
                                 [&](std::size_t s) { return f.nodes[s].is_action(); });
        if (next == f.succ[cur].end()) break;
        cur = *next;
        chain.push_back(cur);
      }
      if (!reaches) continue;
      for (auto tout : f.succ[sn]) {
        const auto* outt = std::get_if<TransitionNode>(&f.nodes[tout].v);
        if (!outt || contains_edge(outt->condition)) continue;
        const auto layout = extended_layout(f, {&in->condition, &outt->condition});
        auto e = filter(extend(r.env_before[tin], layout), in->condition, f.contexts[tin]);
        for (auto a : chain) e = transfer(f, a, e);
        e = transfer(f, sn, e.havoc(f.havoc[sn]));
        e = filter(e, outt->condition, f.contexts[tout]);
        if (!e.is_bottom()) pairs.push_back(in->transition + " -> " + outt->transition);
      }
    }
    if (pairs.empty()) continue;
    std::string detail = "may fire through in one situation:";
    for (const auto& p : pairs) detail += " " + p + ";";
    detail.pop_back();
    out.push_back({DiagnosticKind::TransientStep, f.nodes[sn].id(), detail});
  }
  return out;
}

std::vector<Diagnostic> detect_sort_conflicts(const AnalysisResult& r) {
  std::vector<Diagnostic> out;
  const auto& f = r.flow;
  for (auto n : f.order) {
    auto env = r.env_before[n];
    if (env.is_bottom()) continue;
    const auto& ctx = f.contexts[n];
    auto check = [&](const std::string& target, const Expr& value) {
      if (assign_sort_conflict(env, target, value, ctx))
        out.push_back({DiagnosticKind::SortConflict, f.nodes[n].id(),
                       "Boolean " + target + " assigned " + value.to_string() + " = " +
                           eval_arith(value, env, ctx).to_string()});
      env = assign(env, target, value, ctx);
    };
    if (const auto* s = std::get_if<StepNode>(&f.nodes[n].v)) {
      for (const auto& a : s->on_activation) check(a.target, a.value);
    } else if (const auto* a = std::get_if<ActionNode>(&f.nodes[n].v)) {
      if (a->guard) env = filter(env, *a->guard, ctx);
      check(a->target, a->value);
    }
  }
  return out;
}

}  // namespace grafcet
