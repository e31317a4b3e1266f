#pragma once

#include <tuple>
#include <unordered_map>

#include "priml/surface.hpp"
#include "priml/typecheck.hpp"

namespace priml {

// Elaboration is the surface static semantics: it type-directs the
// translation and rejects ill-typed programs. Priority binders are renamed
// to fresh base_k names (visible in diagnostics, e.g. p_1).
struct ElabContext {
  TypeContext types;
  // Parallel to types.vars: marks entries that are fix binders. A reference
  // to one elaborates to `let g = f in g` so that unfolding never places the
  // fix expression in a value position.
  std::vector<char> fix_flags;
  std::unordered_map<Ident, Ident> prio_rename;  // surface var -> core var
  const PartialOrder *store = nullptr;
  FreshNames *fresh = nullptr;

  void push_var(Ident x, TypePtr t, bool is_fix = false);
  void pop_var();
  bool is_fix_ref(Ident x) const;
};

Priority resolve_prio(const ElabContext &ctx, Ident name, SourceSpan span);
TypePtr elab_type(const ElabContext &ctx, const STypePtr &t);

std::pair<ExprPtr, TypePtr> elab_expr(ElabContext &ctx, const SExprPtr &e);
std::tuple<Ident, ExprPtr, TypePtr> elab_decl(ElabContext &ctx,
                                              const SDeclPtr &d);
std::pair<CmdPtr, TypePtr> elab_cmd(ElabContext &ctx, const SCmdPtr &m,
                                    const Priority &at);

struct ElabResult {
  CmdPtr main;
  TypePtr main_type;
  PartialOrder store;
  // Top-level binding names with their types, for --dump-types.
  std::vector<std::pair<Ident, TypePtr>> bindings;
};

ElabResult elab_program(const SProgram &p);

}  // namespace priml
