#include "grafcet/domain.hpp"

#include <cassert>

namespace grafcet {

VarLayout::VarLayout(std::vector<std::string> names, std::vector<Sort> sorts)
    : names_(std::move(names)), sorts_(std::move(sorts)) {
  assert(names_.size() == sorts_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<std::size_t> VarLayout::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Interval sort_bound(Sort s) { return s == Sort::Boolean ? Interval::boolean() : Interval::top(); }

AbstractEnv AbstractEnv::bottom(LayoutPtr layout) {
  AbstractEnv e;
  e.values_.assign(layout->size(), Interval::bottom());
  e.layout_ = std::move(layout);
  e.bottom_ = true;
  return e;
}

AbstractEnv AbstractEnv::constant(LayoutPtr layout, std::int64_t v) {
  AbstractEnv e;
  e.values_.assign(layout->size(), Interval::constant(v));
  e.layout_ = std::move(layout);
  e.bottom_ = false;
  return e;
}

AbstractEnv AbstractEnv::top(LayoutPtr layout) {
  AbstractEnv e;
  for (std::size_t i = 0; i < layout->size(); ++i) e.values_.push_back(sort_bound(layout->sort(i)));
  e.layout_ = std::move(layout);
  e.bottom_ = false;
  return e;
}

Interval AbstractEnv::get(std::size_t i) const {
  return bottom_ ? Interval::bottom() : values_[i];
}

std::optional<Interval> AbstractEnv::get(const std::string& name) const {
  if (!layout_) return std::nullopt;
  auto i = layout_->index(name);
  if (!i) return std::nullopt;
  return get(*i);
}

void AbstractEnv::set(std::size_t i, const Interval& v) {
  if (bottom_) return;
  if (v.is_bottom()) {
    for (auto& x : values_) x = Interval::bottom();
    bottom_ = true;
    return;
  }
  values_[i] = v;
}

AbstractEnv AbstractEnv::join(const AbstractEnv& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  AbstractEnv r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = values_[i].join(o.values_[i]);
  return r;
}

AbstractEnv AbstractEnv::meet(const AbstractEnv& o) const {
  if (bottom_) return *this;
  if (o.bottom_) return o;
  AbstractEnv r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    r.set(i, values_[i].meet(o.values_[i]));
    if (r.bottom_) break;
  }
  return r;
}

bool AbstractEnv::leq(const AbstractEnv& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!values_[i].leq(o.values_[i])) return false;
  return true;
}

AbstractEnv AbstractEnv::widen(const AbstractEnv& next) const {
  if (bottom_) return next;
  if (next.bottom_) return *this;
  AbstractEnv r = *this;
  for (std::size_t i = 0; i < values_.size(); ++i)
    r.values_[i] = values_[i].widen(next.values_[i]).meet(sort_bound(layout_->sort(i)));
  return r;
}

AbstractEnv AbstractEnv::havoc(const std::vector<std::size_t>& indices) const {
  if (bottom_ || indices.empty()) return *this;
  AbstractEnv r = *this;
  for (auto i : indices) r.values_[i] = sort_bound(layout_->sort(i));
  return r;
}

bool operator==(const AbstractEnv& a, const AbstractEnv& b) {
  if (a.bottom_ || b.bottom_) return a.bottom_ == b.bottom_;
  return a.values_ == b.values_;
}

DomainContext DomainContext::for_grafcet(const Grafcet& g) {
  std::unordered_map<std::string, Sort> sorts;
  for (const auto& v : g.variables) sorts.emplace(v.name, v.sort);
  DomainContext ctx;
  ctx.sort_of = [sorts = std::move(sorts)](const std::string& n) -> std::optional<Sort> {
    auto it = sorts.find(n);
    if (it == sorts.end()) return std::nullopt;
    return it->second;
  };
  return ctx;
}

Interval DomainContext::untracked(const std::string& var) const {
  if (sort_of) {
    if (auto s = sort_of(var)) return sort_bound(*s);
  }
  return Interval::top();
}

Truth DomainContext::step(const StepRef& s) const {
  return step_truth ? step_truth(s) : Truth::Unknown;
}

namespace {

bool may_hold(CompareOp op, const Interval& l, const Interval& r) {
  switch (op) {
    case CompareOp::Eq: return !l.meet(r).is_bottom();
    case CompareOp::Ne: {
      auto a = l.singleton();
      auto b = r.singleton();
      return !(a && b && *a == *b);
    }
    case CompareOp::Lt: return l.lo() < r.hi();
    case CompareOp::Le: return l.lo() <= r.hi();
    case CompareOp::Gt: return l.hi() > r.lo();
    case CompareOp::Ge: return l.hi() >= r.lo();
  }
  return true;
}

// Values of x for which `x op y` may hold for some y in `other`.
Interval refine(const Interval& x, CompareOp op, const Interval& other) {
  switch (op) {
    case CompareOp::Eq: return x.meet(other);
    case CompareOp::Ne: {
      auto c = other.singleton();
      if (!c) return x;
      if (x.singleton() == c) return Interval::bottom();
      if (x.lo() == Bound(*c)) return Interval(Bound(*c) + Bound(1), x.hi());
      if (x.hi() == Bound(*c)) return Interval(x.lo(), Bound(*c) + Bound(-1));
      return x;
    }
    case CompareOp::Lt: return x.meet(Interval(Bound::neg_inf(), other.hi() + Bound(-1)));
    case CompareOp::Le: return x.meet(Interval(Bound::neg_inf(), other.hi()));
    case CompareOp::Gt: return x.meet(Interval(other.lo() + Bound(1), Bound::pos_inf()));
    case CompareOp::Ge: return x.meet(Interval(other.lo(), Bound::pos_inf()));
  }
  return x;
}

std::optional<std::size_t> tracked_index(const Expr& e, const AbstractEnv& env) {
  const auto* v = e.as<VarRef>();
  if (!v || !env.layout()) return std::nullopt;
  return env.layout()->index(v->name);
}

AbstractEnv filter_compare(const AbstractEnv& env, const Compare& c, const DomainContext& ctx) {
  const auto l = eval_arith(c.lhs, env, ctx);
  const auto r = eval_arith(c.rhs, env, ctx);
  if (l.is_bottom() || r.is_bottom() || !may_hold(c.op, l, r))
    return AbstractEnv::bottom(env.layout());
  AbstractEnv out = env;
  if (auto i = tracked_index(c.lhs, env)) out.set(*i, out.get(*i).meet(refine(l, c.op, r)));
  if (auto j = tracked_index(c.rhs, env)) out.set(*j, out.get(*j).meet(refine(r, mirror(c.op), l)));
  return out;
}

// `cond` must already have its negations pushed to the atoms.
AbstractEnv filter_normalized(const AbstractEnv& env, const Expr& cond, const DomainContext& ctx) {
  if (env.is_bottom()) return env;
  const auto& layout = env.layout();
  if (const auto* b = cond.as<BoolConst>()) return b->value ? env : AbstractEnv::bottom(layout);
  if (const auto* s = cond.as<StepRef>())
    return ctx.step(*s) == Truth::False ? AbstractEnv::bottom(layout) : env;
  if (const auto* n = cond.as<Not>()) {
    if (const auto* s = n->operand.as<StepRef>())
      return ctx.step(*s) == Truth::True ? AbstractEnv::bottom(layout) : env;
    return env;  // negated edge: unconstrained
  }
  if (cond.is<EdgeAtom>()) return env;
  if (const auto* a = cond.as<And>())
    return filter_normalized(env, a->lhs, ctx).meet(filter_normalized(env, a->rhs, ctx));
  if (const auto* o = cond.as<Or>())
    return filter_normalized(env, o->lhs, ctx).join(filter_normalized(env, o->rhs, ctx));
  if (const auto* c = cond.as<Compare>()) return filter_compare(env, *c, ctx);
  return env;
}

}  // namespace

Interval eval_arith(const Expr& e, const AbstractEnv& env, const DomainContext& ctx) {
  if (env.is_bottom()) return Interval::bottom();
  if (const auto* c = e.as<IntConst>()) return Interval::constant(c->value);
  if (const auto* b = e.as<BoolConst>()) return Interval::constant(b->value ? 1 : 0);
  if (const auto* v = e.as<VarRef>()) {
    if (auto i = env.layout()->index(v->name)) return env.get(*i);
    return ctx.untracked(v->name);
  }
  if (const auto* s = e.as<StepRef>()) {
    switch (ctx.step(*s)) {
      case Truth::True: return Interval::constant(1);
      case Truth::False: return Interval::constant(0);
      case Truth::Unknown: return Interval::boolean();
    }
  }
  if (e.is<EdgeAtom>()) return Interval::boolean();
  if (const auto* a = e.as<Arith>()) {
    const auto l = eval_arith(a->lhs, env, ctx);
    const auto r = eval_arith(a->rhs, env, ctx);
    switch (a->op) {
      case ArithOp::Add: return l + r;
      case ArithOp::Sub: return l - r;
      case ArithOp::Mul: return l * r;
    }
  }
  // Boolean-valued subterm: decide which truth values remain possible.
  const bool may_true = !filter(env, e, ctx).is_bottom();
  const bool may_false = !filter(env, Expr::negate(e), ctx).is_bottom();
  return Interval(may_false ? 0 : 1, may_true ? 1 : 0);
}

AbstractEnv filter(const AbstractEnv& env, const Expr& cond, const DomainContext& ctx) {
  return filter_normalized(env, push_negations(cond), ctx);
}

AbstractEnv assign(const AbstractEnv& env, const std::string& target, const Expr& value,
                   const DomainContext& ctx) {
  if (env.is_bottom()) return env;
  auto i = env.layout()->index(target);
  if (!i) return env;
  AbstractEnv out = env;
  out.set(*i, eval_arith(value, env, ctx).meet(sort_bound(env.layout()->sort(*i))));
  return out;
}

bool assign_sort_conflict(const AbstractEnv& env, const std::string& target, const Expr& value,
                          const DomainContext& ctx) {
  if (env.is_bottom()) return false;
  auto i = env.layout()->index(target);
  if (!i) return false;
  const auto v = eval_arith(value, env, ctx);
  return !v.is_bottom() && v.meet(sort_bound(env.layout()->sort(*i))).is_bottom();
}

}  // namespace grafcet
