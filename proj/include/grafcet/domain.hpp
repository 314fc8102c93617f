#pragma once

// Abstract environments over the interval lattice and the transfer
// primitives used by the fixpoint: interval evaluation, condition filtering
// and assignment.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grafcet/expr.hpp"
#include "grafcet/interval.hpp"
#include "grafcet/model.hpp"

namespace grafcet {

/// Names and sorts of the variables an environment tracks.
class VarLayout {
 public:
  VarLayout() = default;
  VarLayout(std::vector<std::string> names, std::vector<Sort> sorts);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Sort sort(std::size_t i) const { return sorts_[i]; }
  std::optional<std::size_t> index(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::vector<Sort> sorts_;
  std::unordered_map<std::string, std::size_t> index_;
};

using LayoutPtr = std::shared_ptr<const VarLayout>;

/// Full range of a sort: [0,1] for Booleans, top for integers.
Interval sort_bound(Sort s);

class AbstractEnv {
 public:
  AbstractEnv() = default;

  static AbstractEnv bottom(LayoutPtr layout);
  static AbstractEnv constant(LayoutPtr layout, std::int64_t v);  // every variable at [v,v]
  static AbstractEnv top(LayoutPtr layout);                         // sort bounds

  const LayoutPtr& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }
  bool is_bottom() const { return bottom_; }

  // Bottom environments report Bottom for every variable.
  Interval get(std::size_t i) const;
  std::optional<Interval> get(const std::string& name) const;

  // Binding any variable to Bottom makes the whole environment Bottom.
  void set(std::size_t i, const Interval& v);

  AbstractEnv join(const AbstractEnv& o) const;
  AbstractEnv meet(const AbstractEnv& o) const;
  bool leq(const AbstractEnv& o) const;
  AbstractEnv widen(const AbstractEnv& next) const;  // Boolean variables stay within [0,1]

  /// Rebinds the listed variables to their sort bound.
  AbstractEnv havoc(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const AbstractEnv& a, const AbstractEnv& b);

 private:
  LayoutPtr layout_;
  std::vector<Interval> values_;
  bool bottom_ = true;
};

enum class Truth { False, True, Unknown };

/// What an expression's free identifiers mean outside the environment.
/// Variables absent from the layout are nondeterministic over their sort; step
/// atoms are resolved by `step_truth` (Unknown when unset).
struct DomainContext {
  std::function<std::optional<Sort>(const std::string&)> sort_of;
  std::function<Truth(const StepRef&)> step_truth;

  static DomainContext for_grafcet(const Grafcet& g);
  Interval untracked(const std::string& var) const;
  Truth step(const StepRef& s) const;
};

/// Sound interval for an integer-sorted expression (Boolean subterms as 0/1).
Interval eval_arith(const Expr& e, const AbstractEnv& env, const DomainContext& ctx);

/// Restriction of `env` to the states where `cond` may hold. And becomes meet,
/// Or becomes join, comparisons refine the variable side, edges and step atoms
/// that cannot be resolved leave the environment unchanged.
AbstractEnv filter(const AbstractEnv& env, const Expr& cond, const DomainContext& ctx);

/// `target := value`, clamped to the target's sort. A Boolean target receiving
/// a value outside [0,1] yields Bottom.
AbstractEnv assign(const AbstractEnv& env, const std::string& target, const Expr& value,
                   const DomainContext& ctx);

/// True when `assign` would produce Bottom purely because of the sort clamp.
bool assign_sort_conflict(const AbstractEnv& env, const std::string& target, const Expr& value,
                          const DomainContext& ctx);

}  // namespace grafcet
