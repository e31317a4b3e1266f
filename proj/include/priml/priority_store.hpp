#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "priml/ast.hpp"

namespace priml {

// Hypotheses available to constraint entailment: priority variables in scope
// and assumed lhs <= rhs pairs (from polymorphic binders' constraints).
struct EntailContext {
  std::vector<Ident> prio_vars;
  std::vector<std::pair<Priority, Priority>> assumed;

  bool has_var(Ident v) const;
  void push_var(Ident v) { prio_vars.push_back(v); }
  void assume(const Constraint &c);
};

// The program's priority constants with their partial order. `bot` is always
// present and below every constant. Closure is maintained by Warshall's
// algorithm after each insertion.
class PartialOrder {
 public:
  PartialOrder();

  void declare_priority(Ident name, SourceSpan span = {});
  void declare_order(Ident lo, Ident hi, SourceSpan span = {});

  bool declared(Ident name) const;
  const std::vector<Ident> &consts() const { return consts_; }
  const std::vector<std::pair<Ident, Ident>> &edges() const { return edges_; }

  // Reflexive-transitive order on constants.
  bool leq(Ident lo, Ident hi) const;
  bool strictly_less(Ident lo, Ident hi) const {
    return lo != hi && leq(lo, hi);
  }

  // Deterministic linear extension; ties broken by declaration order.
  std::vector<Ident> total_order() const;
  // Index into total_order(), cached for schedulers.
  int total_index(Ident name) const;

 private:
  std::vector<Ident> consts_;  // declaration order, bot first
  std::unordered_map<Ident, int> index_;
  std::vector<std::pair<Ident, Ident>> edges_;
  std::vector<std::vector<bool>> closure_;
  mutable std::vector<Ident> total_cache_;
  mutable std::unordered_map<Ident, int> total_index_cache_;

  void recompute_total() const;
};

// Fig-7 entailment: hyp (ctx.assumed), assume (store order), refl, trans,
// conj. Distinct atoms not related by any hypothesis are incomparable.
bool entails(const PartialOrder &store, const EntailContext &ctx,
             const Constraint &goal);
bool entails_leq(const PartialOrder &store, const EntailContext &ctx,
                 const Priority &lo, const Priority &hi);

// Loads the store into a context: every constant becomes a hypothetical atom
// with bot <= c and the declared edges assumed.
EntailContext ctxify(const PartialOrder &store);

}  // namespace priml
