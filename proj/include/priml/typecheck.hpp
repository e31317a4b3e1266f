#pragma once

#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "priml/ast.hpp"
#include "priml/priority_store.hpp"

namespace priml {

// Thread signature: a ~ tau @ rho entries in insertion order.
class Signature {
 public:
  struct Entry {
    Ident id;
    TypePtr ret_type;
    Priority prio;  // always a constant
  };

  void add(Ident id, TypePtr ret_type, Priority prio);
  const Entry *find(Ident id) const;
  const std::vector<Entry> &entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<Ident, size_t> index_;
};

struct TypeContext {
  std::vector<std::pair<Ident, TypePtr>> vars;
  EntailContext entail;

  const TypePtr *lookup(Ident x) const;
};

// The `v val Sigma` judgment: e is in the value subclass and every thread
// name occurring in it (anywhere, including under cmd values) is in sig.
bool value_check(const ExprPtr &e, const Signature &sig);

// Fig-5 expression typing; syntax-directed synthesis (all binders are
// annotated post-elaboration).
TypePtr type_expr(const PartialOrder &store, const Signature &sig,
                  TypeContext &ctx, const ExprPtr &e);

// Fig-6 command typing at a given priority.
TypePtr type_cmd(const PartialOrder &store, const Signature &sig,
                 TypeContext &ctx, const CmdPtr &m, const Priority &at);

// Thread pool typing in normal form: every thread types under the ambient
// signature extended with the whole pool's signature (Concat's mutual
// reference). Returns the signature the pool introduces.
struct PoolThread {
  Ident id;
  Priority prio;
  TypePtr ret_type;
  CmdPtr cmd;
};
Signature type_threadpool(const PartialOrder &store, const Signature &ambient,
                          const std::vector<PoolThread> &threads);

// Actions of the labelled transition system.
enum class ActionKind { Silent, SyncFrom, RetOf };

struct Action {
  ActionKind kind = ActionKind::Silent;
  Ident thread;   // b in b?v / b!v
  ExprPtr value;  // closed value
};

void type_action(const PartialOrder &store, const Signature &sig,
                 const Action &act);

}  // namespace priml
