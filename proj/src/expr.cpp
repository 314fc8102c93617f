#include "grafcet/expr.hpp"

#include <type_traits>

namespace grafcet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Expr::Expr() : node_(std::make_shared<const ExprNode>(ExprNode{BoolConst{true}})) {}

Expr Expr::integer(std::int64_t value) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{IntConst{value}}));
}
Expr Expr::boolean(bool value) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{BoolConst{value}}));
}
Expr Expr::var(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{VarRef{std::move(name)}}));
}
Expr Expr::step(std::string partial, StepId step) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{StepRef{std::move(partial), step}}));
}
Expr Expr::edge(EdgeDir dir, Expr operand) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{EdgeAtom{dir, std::move(operand)}}));
}
Expr Expr::compare(CompareOp op, Expr lhs, Expr rhs) {
  return Expr(
      std::make_shared<const ExprNode>(ExprNode{Compare{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Not{std::move(operand)}}));
}
Expr Expr::conj(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{And{std::move(lhs), std::move(rhs)}}));
}
Expr Expr::disj(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Or{std::move(lhs), std::move(rhs)}}));
}
Expr Expr::arith(ArithOp op, Expr lhs, Expr rhs) {
  return Expr(
      std::make_shared<const ExprNode>(ExprNode{Arith{op, std::move(lhs), std::move(rhs)}}));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->v.index() != b.node_->v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node_->v);
        if constexpr (std::is_same_v<T, IntConst> || std::is_same_v<T, BoolConst>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, StepRef>) {
          return x == y;
        } else if constexpr (std::is_same_v<T, EdgeAtom>) {
          return x.dir == y.dir && x.operand == y.operand;
        } else if constexpr (std::is_same_v<T, Not>) {
          return x.operand == y.operand;
        } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith>) {
          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
        } else {
          return x.lhs == y.lhs && x.rhs == y.rhs;
        }
      },
      a.node_->v);
}

const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

const char* to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
  }
  return "?";
}

CompareOp flip(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return CompareOp::Ne;
    case CompareOp::Ne: return CompareOp::Eq;
    case CompareOp::Lt: return CompareOp::Ge;
    case CompareOp::Le: return CompareOp::Gt;
    case CompareOp::Gt: return CompareOp::Le;
    case CompareOp::Ge: return CompareOp::Lt;
  }
  return op;
}

CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

namespace {

// Binding strength used by the printer; mirrors the parser's grammar levels.
enum Prec { kOr = 1, kAnd, kCompare, kAdd, kMul, kUnary, kAtom };

int precedence(const Expr& e) {
  return std::visit(overloaded{
                        [](const Or&) { return int(kOr); },
                        [](const And&) { return int(kAnd); },
                        [](const Compare&) { return int(kCompare); },
                        [](const Arith& a) { return a.op == ArithOp::Mul ? int(kMul) : int(kAdd); },
                        [](const Not&) { return int(kUnary); },
                        [](const IntConst& c) { return c.value < 0 ? int(kUnary) : int(kAtom); },
                        [](const auto&) { return int(kAtom); },
                    },
                    e.node().v);
}

std::string print(const Expr& e);

std::string wrap(const Expr& e, bool parens) {
  return parens ? "(" + print(e) + ")" : print(e);
}

std::string binary(const Expr& lhs, const char* op, const Expr& rhs, int prec) {
  return wrap(lhs, precedence(lhs) < prec) + " " + op + " " + wrap(rhs, precedence(rhs) <= prec);
}

std::string print(const Expr& e) {
  return std::visit(
      overloaded{
          [](const IntConst& c) { return std::to_string(c.value); },
          [](const BoolConst& c) { return std::string(c.value ? "true" : "false"); },
          [](const VarRef& v) { return v.name; },
          [](const StepRef& s) { return "step(" + s.partial + ", " + std::to_string(s.step) + ")"; },
          [](const EdgeAtom& a) {
            return std::string(a.dir == EdgeDir::Rising ? "rising(" : "falling(") +
                   print(a.operand) + ")";
          },
          [](const Compare& c) { return binary(c.lhs, to_string(c.op), c.rhs, kCompare); },
          [](const Not& n) { return "!" + wrap(n.operand, precedence(n.operand) < kUnary); },
          [](const And& a) { return binary(a.lhs, "&", a.rhs, kAnd); },
          [](const Or& o) { return binary(o.lhs, "|", o.rhs, kOr); },
          [](const Arith& a) {
            return binary(a.lhs, to_string(a.op), a.rhs, a.op == ArithOp::Mul ? kMul : kAdd);
          },
      },
      e.node().v);
}

void collect(const Expr& e, FreeVars& out) {
  std::visit(overloaded{
                 [&](const VarRef& v) { out.vars.insert(v.name); },
                 [&](const StepRef& s) { out.steps.insert(s); },
                 [&](const EdgeAtom& a) { collect(a.operand, out); },
                 [&](const Not& n) { collect(n.operand, out); },
                 [&](const Compare& c) {
                   collect(c.lhs, out);
                   collect(c.rhs, out);
                 },
                 [&](const And& a) {
                   collect(a.lhs, out);
                   collect(a.rhs, out);
                 },
                 [&](const Or& o) {
                   collect(o.lhs, out);
                   collect(o.rhs, out);
                 },
                 [&](const Arith& a) {
                   collect(a.lhs, out);
                   collect(a.rhs, out);
                 },
                 [](const auto&) {},
             },
             e.node().v);
}

Expr push(const Expr& e, bool negated) {
  return std::visit(
      overloaded{
          [&](const IntConst& c) { return Expr::boolean((c.value != 0) != negated); },
          [&](const BoolConst& c) { return Expr::boolean(c.value != negated); },
          [&](const VarRef&) {
            return Expr::compare(negated ? CompareOp::Eq : CompareOp::Ne, e, Expr::integer(0));
          },
          [&](const StepRef&) { return negated ? Expr::negate(e) : e; },
          [&](const EdgeAtom&) { return negated ? Expr::negate(e) : e; },
          [&](const Compare& c) {
            return negated ? Expr::compare(flip(c.op), c.lhs, c.rhs) : e;
          },
          [&](const Not& n) { return push(n.operand, !negated); },
          [&](const And& a) {
            auto l = push(a.lhs, negated);
            auto r = push(a.rhs, negated);
            return negated ? Expr::disj(std::move(l), std::move(r))
                           : Expr::conj(std::move(l), std::move(r));
          },
          [&](const Or& o) {
            auto l = push(o.lhs, negated);
            auto r = push(o.rhs, negated);
            return negated ? Expr::conj(std::move(l), std::move(r))
                           : Expr::disj(std::move(l), std::move(r));
          },
          [&](const Arith&) {
            return Expr::compare(negated ? CompareOp::Eq : CompareOp::Ne, e, Expr::integer(0));
          },
      },
      e.node().v);
}

bool compare_values(CompareOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

}  // namespace

std::string Expr::to_string() const { return print(*this); }

FreeVars free_vars(const Expr& e) {
  FreeVars out;
  collect(e, out);
  return out;
}

bool contains_edge(const Expr& e) {
  return std::visit(overloaded{
                        [](const EdgeAtom&) { return true; },
                        [](const Not& n) { return contains_edge(n.operand); },
                        [](const Compare& c) { return contains_edge(c.lhs) || contains_edge(c.rhs); },
                        [](const And& a) { return contains_edge(a.lhs) || contains_edge(a.rhs); },
                        [](const Or& o) { return contains_edge(o.lhs) || contains_edge(o.rhs); },
                        [](const Arith& a) { return contains_edge(a.lhs) || contains_edge(a.rhs); },
                        [](const auto&) { return false; },
                    },
                    e.node().v);
}

Expr push_negations(const Expr& e) { return push(e, false); }

std::int64_t evaluate(const Expr& e, const Valuation& val) {
  return std::visit(
      overloaded{
          [](const IntConst& c) { return c.value; },
          [](const BoolConst& c) { return std::int64_t{c.value}; },
          [&](const VarRef& v) { return val.value(v.name); },
          [&](const StepRef& s) { return std::int64_t{val.step_active(s)}; },
          [&](const EdgeAtom& a) { return std::int64_t{val.edge(a.dir, a.operand)}; },
          [&](const Compare& c) {
            return std::int64_t{compare_values(c.op, evaluate(c.lhs, val), evaluate(c.rhs, val))};
          },
          [&](const Not& n) { return std::int64_t{!holds(n.operand, val)}; },
          [&](const And& a) { return std::int64_t{holds(a.lhs, val) && holds(a.rhs, val)}; },
          [&](const Or& o) { return std::int64_t{holds(o.lhs, val) || holds(o.rhs, val)}; },
          [&](const Arith& a) {
            const auto l = evaluate(a.lhs, val);
            const auto r = evaluate(a.rhs, val);
            switch (a.op) {
              case ArithOp::Add: return l + r;
              case ArithOp::Sub: return l - r;
              case ArithOp::Mul: return l * r;
            }
            return std::int64_t{0};
          },
      },
      e.node().v);
}

}  // namespace grafcet
