#pragma once

// Condition and value expressions over input, internal, output and step
// variables. Expressions are immutable trees with shared structure.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>

namespace grafcet {

using StepId = std::uint32_t;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul };
enum class EdgeDir { Rising, Falling };

struct ExprNode;

class Expr {
 public:
  Expr();  // BoolConst(true)

  static Expr integer(std::int64_t value);
  static Expr boolean(bool value);
  static Expr var(std::string name);
  static Expr step(std::string partial, StepId step);
  static Expr edge(EdgeDir dir, Expr operand);
  static Expr compare(CompareOp op, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);
  static Expr conj(Expr lhs, Expr rhs);
  static Expr disj(Expr lhs, Expr rhs);
  static Expr arith(ArithOp op, Expr lhs, Expr rhs);

  const ExprNode& node() const { return *node_; }

  template <typename T>
  const T* as() const;

  template <typename T>
  bool is() const { return as<T>() != nullptr; }

  friend bool operator==(const Expr& a, const Expr& b);

  // Concrete syntax with minimal parentheses; parses back to an equal tree.
  std::string to_string() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct IntConst {
  std::int64_t value;
};
struct BoolConst {
  bool value;
};
struct VarRef {
  std::string name;
};
struct StepRef {
  std::string partial;
  StepId step;
  friend auto operator<=>(const StepRef&, const StepRef&) = default;
};
struct EdgeAtom {
  EdgeDir dir;
  Expr operand;
};
struct Compare {
  CompareOp op;
  Expr lhs, rhs;
};
struct Not {
  Expr operand;
};
struct And {
  Expr lhs, rhs;
};
struct Or {
  Expr lhs, rhs;
};
struct Arith {
  ArithOp op;
  Expr lhs, rhs;
};

struct ExprNode {
  std::variant<IntConst, BoolConst, VarRef, StepRef, EdgeAtom, Compare, Not, And, Or, Arith> v;
};

template <typename T>
const T* Expr::as() const {
  return std::get_if<T>(&node_->v);
}

struct FreeVars {
  std::set<std::string> vars;
  std::set<StepRef> steps;
};

/// Identifiers syntactically occurring in `e`, including edge operands.
FreeVars free_vars(const Expr& e);

bool contains_edge(const Expr& e);

/// Rewrites a Boolean-sorted expression so that Not only wraps StepRef and
/// EdgeAtom atoms. Comparisons under a negation are flipped, variables and
/// arithmetic in Boolean position become `e != 0` (positive) or `e = 0`
/// (negated), constants are folded.
Expr push_negations(const Expr& e);

CompareOp flip(CompareOp op);    // negation: < becomes >=
CompareOp mirror(CompareOp op);  // operand swap: < becomes >

const char* to_string(CompareOp op);
const char* to_string(ArithOp op);

/// Concrete evaluation hooks. Boolean results are 0/1; Boolean positions treat
/// any nonzero value as true.
class Valuation {
 public:
  virtual ~Valuation() = default;
  virtual std::int64_t value(const std::string& var) const = 0;
  virtual bool step_active(const StepRef& step) const = 0;
  virtual bool edge(EdgeDir dir, const Expr& operand) const = 0;
};

std::int64_t evaluate(const Expr& e, const Valuation& val);
inline bool holds(const Expr& e, const Valuation& val) { return evaluate(e, val) != 0; }

}  // namespace grafcet
