#include "priml/elaborate.hpp"

#include <fmt/core.h>

#include <functional>

#include "priml/pretty.hpp"

namespace priml {


void ElabContext::push_var(Ident x, TypePtr t, bool is_fix) {
  types.vars.emplace_back(x, std::move(t));
  fix_flags.push_back(is_fix ? 1 : 0);
}

void ElabContext::pop_var() {
  types.vars.pop_back();
  fix_flags.pop_back();
}

bool ElabContext::is_fix_ref(Ident x) const {
  for (size_t i = types.vars.size(); i-- > 0;)
    if (types.vars[i].first == x) return fix_flags[i] != 0;
  return false;
}

Priority resolve_prio(const ElabContext &ctx, Ident name, SourceSpan span) {
  auto it = ctx.prio_rename.find(name);
  if (it != ctx.prio_rename.end()) return prio_var(it->second);
  if (ctx.store->declared(name)) return prio_const(name);
  fail(errcode::UnknownPriority, span,
       fmt::format("unknown priority {}", str(name)));
}

TypePtr elab_type(const ElabContext &ctx, const STypePtr &t) {
  if (!t) return nullptr;
  switch (t->kind) {
    case TypeKind::Unit:
      return t_unit();
    case TypeKind::Nat:
      return t_nat();
    case TypeKind::Arrow:
      return t_arrow(elab_type(ctx, t->a), elab_type(ctx, t->b));
    case TypeKind::Prod:
      return t_prod(elab_type(ctx, t->a), elab_type(ctx, t->b));
    case TypeKind::Sum:
      return t_sum(elab_type(ctx, t->a), elab_type(ctx, t->b));
    case TypeKind::Thread:
      return t_thread(elab_type(ctx, t->a),
                      resolve_prio(ctx, t->prio, t->span));
    case TypeKind::Cmd:
      return t_cmd(elab_type(ctx, t->a), resolve_prio(ctx, t->prio, t->span));
    default:
      fail(errcode::Type, t->span, "unsupported surface type");
  }
}

namespace {

[[noreturn]] void mismatch(SourceSpan span, const std::string &expected,
                           const TypePtr &found) {
  fail(errcode::Type, span,
       fmt::format("type mismatch at {}: expected {}, found {}", span.render(),
                   expected, show(found)));
}

void require(ElabContext &ctx, const Priority &lo, const Priority &hi,
             SourceSpan span) {
  if (!entails_leq(*ctx.store, ctx.types.entail, lo, hi))
    fail(errcode::PrioInversion, span,
         fmt::format("constraint violated at {}: {} <= {}", span.render(),
                     show(lo), show(hi)));
}

// 2/3-cps normalization: constructors take values, so non-value operands are
// let-bound first.
ExprPtr bind_value(ElabContext &ctx, const ExprPtr &e, SourceSpan span,
                   const std::function<ExprPtr(ExprPtr)> &k) {
  if (is_value(e)) return k(e);
  Ident tmp = ctx.fresh->fresh("v");
  return e_let(tmp, e, k(e_var(tmp, span)), span);
}

std::pair<ExprPtr, TypePtr> elab_instr(ElabContext &ctx, const SInstr &i,
                                       const Priority &at, CmdPtr *out);

}  // namespace

std::pair<ExprPtr, TypePtr> elab_expr(ElabContext &ctx, const SExprPtr &e) {
  switch (e->kind) {
    case SExprKind::Var: {
      const TypePtr *t = ctx.types.lookup(e->var);
      if (!t)
        fail(errcode::Unbound, e->span,
             fmt::format("unbound variable {}", str(e->var)));
      if (ctx.is_fix_ref(e->var)) {
        // A recursive reference unfolds at runtime to the fix expression,
        // which is not a value; the let keeps value positions valued.
        Ident g = ctx.fresh->fresh("g");
        return {e_let(g, e_var(e->var, e->span), e_var(g, e->span), e->span),
                *t};
      }
      return {e_var(e->var, e->span), *t};
    }
    case SExprKind::Unit:
      return {e_unit(e->span), t_unit()};
    case SExprKind::Num:
      return {e_num(e->num, e->span), t_nat()};
    case SExprKind::Input:
      return {e_input(e->span), t_nat()};
    case SExprKind::Fn: {
      if (!e->type)
        fail(errcode::Type, e->span,
             fmt::format(
                 "parameter {} needs a type annotation: fn ({} : ty) => ...",
                 str(e->var), str(e->var)));
      TypePtr param = elab_type(ctx, e->type);
      ctx.push_var(e->var, param);
      auto [body, bt] = elab_expr(ctx, e->e1);
      ctx.pop_var();
      return {e_fun(e->var, param, body, e->span), t_arrow(param, bt)};
    }
    case SExprKind::Fix: {
      TypePtr ann = elab_type(ctx, e->type);
      ctx.push_var(e->var, ann, /*is_fix=*/true);
      auto [body, bt] = elab_expr(ctx, e->e1);
      ctx.pop_var();
      if (!type_equal(bt, ann)) mismatch(e->e1->span, show(ann), bt);
      return {e_fix(e->var, ann, body, e->span), ann};
    }
    case SExprKind::App: {
      auto [f, tf] = elab_expr(ctx, e->e1);
      if (tf->kind != TypeKind::Arrow) mismatch(e->e1->span, "a function", tf);
      auto [arg, ta] = elab_expr(ctx, e->e2);
      if (!type_equal(ta, tf->a)) mismatch(e->e2->span, show(tf->a), ta);
      ExprPtr out = bind_value(ctx, f, e->span, [&](ExprPtr vf) {
        return bind_value(ctx, arg, e->span, [&](ExprPtr va) {
          return e_app(vf, va, e->span);
        });
      });
      return {out, tf->b};
    }
    case SExprKind::Pair: {
      auto [l, tl] = elab_expr(ctx, e->e1);
      auto [r, tr] = elab_expr(ctx, e->e2);
      ExprPtr out = bind_value(ctx, l, e->span, [&](ExprPtr vl) {
        return bind_value(ctx, r, e->span, [&](ExprPtr vr) {
          return e_pair(vl, vr, e->span);
        });
      });
      return {out, t_prod(tl, tr)};
    }
    case SExprKind::Fst: {
      auto [v, t] = elab_expr(ctx, e->e1);
      if (t->kind != TypeKind::Prod) mismatch(e->e1->span, "a pair", t);
      ExprPtr out = bind_value(ctx, v, e->span,
                               [&](ExprPtr vv) { return e_fst(vv, e->span); });
      return {out, t->a};
    }
    case SExprKind::Snd: {
      auto [v, t] = elab_expr(ctx, e->e1);
      if (t->kind != TypeKind::Prod) mismatch(e->e1->span, "a pair", t);
      ExprPtr out = bind_value(ctx, v, e->span,
                               [&](ExprPtr vv) { return e_snd(vv, e->span); });
      return {out, t->b};
    }
    case SExprKind::Inl:
    case SExprKind::Inr: {
      TypePtr sum = elab_type(ctx, e->type);
      if (sum->kind != TypeKind::Sum)
        fail(errcode::Type, e->span,
             fmt::format("injection annotation must be a sum type, got {}",
                         show(sum)));
      auto [v, t] = elab_expr(ctx, e->e1);
      const TypePtr &want = e->kind == SExprKind::Inl ? sum->a : sum->b;
      if (!type_equal(t, want)) mismatch(e->e1->span, show(want), t);
      bool left = e->kind == SExprKind::Inl;
      ExprPtr out = bind_value(ctx, v, e->span, [&](ExprPtr vv) {
        return left ? e_inl(vv, sum, e->span) : e_inr(vv, sum, e->span);
      });
      return {out, sum};
    }
    case SExprKind::Case: {
      auto [scrut, ts] = elab_expr(ctx, e->e1);
      if (ts->kind != TypeKind::Sum) mismatch(e->e1->span, "a sum value", ts);
      ctx.push_var(e->var, ts->a);
      auto [l, tl] = elab_expr(ctx, e->e2);
      ctx.pop_var();
      ctx.push_var(e->var2, ts->b);
      auto [r, tr] = elab_expr(ctx, e->e3);
      ctx.pop_var();
      if (!type_equal(tl, tr)) mismatch(e->e3->span, show(tl), tr);
      ExprPtr out = bind_value(ctx, scrut, e->span, [&](ExprPtr vs) {
        return e_case(vs, e->var, l, e->var2, r, e->span);
      });
      return {out, tl};
    }
    case SExprKind::Ifz: {
      auto [scrut, ts] = elab_expr(ctx, e->e1);
      if (ts->kind != TypeKind::Nat) mismatch(e->e1->span, "nat", ts);
      auto [z, tz] = elab_expr(ctx, e->e2);
      ctx.push_var(e->var, t_nat());
      auto [nz, tnz] = elab_expr(ctx, e->e3);
      ctx.pop_var();
      if (!type_equal(tz, tnz)) mismatch(e->e3->span, show(tz), tnz);
      ExprPtr out = bind_value(ctx, scrut, e->span, [&](ExprPtr vs) {
        return e_ifz(vs, z, e->var, nz, e->span);
      });
      return {out, tz};
    }
    case SExprKind::Let: {
      // Each declaration becomes application of a lambda wrapping the rest.
      std::function<std::pair<ExprPtr, TypePtr>(size_t)> go =
          [&](size_t i) -> std::pair<ExprPtr, TypePtr> {
        if (i == e->decls.size()) return elab_expr(ctx, e->e1);
        auto [x, bound, tb] = elab_decl(ctx, e->decls[i]);
        ctx.push_var(x, tb);
        auto [rest, tr] = go(i + 1);
        ctx.pop_var();
        ExprPtr out = bind_value(ctx, bound, e->span, [&](ExprPtr vb) {
          return e_app(e_fun(x, tb, rest, e->span), vb, e->span);
        });
        return {out, tr};
      };
      return go(0);
    }
    case SExprKind::CmdExpr: {
      Priority p = resolve_prio(ctx, e->prio, e->span);
      auto [m, t] = elab_cmd(ctx, e->cmd, p);
      return {e_cmd(p, m, e->span), t_cmd(t, p)};
    }
    case SExprKind::PrApp: {
      Priority p = resolve_prio(ctx, e->prio, e->span);
      auto [v, t] = elab_expr(ctx, e->e1);
      if (t->kind != TypeKind::Forall)
        mismatch(e->e1->span, "a priority-polymorphic value", t);
      Constraint inst = subst_prio(p, t->var, t->constraint);
      for (const auto &[lo, hi] : inst.conjuncts) require(ctx, lo, hi, e->span);
      TypePtr rt = subst_prio(p, t->var, t->a);
      ExprPtr out = bind_value(ctx, v, e->span, [&](ExprPtr vv) {
        return e_prapp(vv, p, e->span);
      });
      return {out, rt};
    }
    case SExprKind::Output: {
      auto [v, t] = elab_expr(ctx, e->e1);
      if (t->kind != TypeKind::Nat) mismatch(e->e1->span, "nat", t);
      ExprPtr out = bind_value(
          ctx, v, e->span, [&](ExprPtr vv) { return e_output(vv, e->span); });
      return {out, t_unit()};
    }
  }
  fail(errcode::Type, e->span, "unreachable surface expression");
}

namespace {

std::pair<CmdPtr, TypePtr> elab_instr_cmd(ElabContext &ctx, const SInstr &i,
                                          const Priority &at) {
  switch (i.kind) {
    case SInstrKind::Do: {
      auto [e, t] = elab_expr(ctx, i.expr);
      if (t->kind != TypeKind::Cmd)
        mismatch(i.expr->span, "an encapsulated command", t);
      if (!(t->prio == at))
        mismatch(i.expr->span,
                 fmt::format("a command at priority {}", show(at)), t);
      Ident x = ctx.fresh->fresh("r");
      return {c_bind(e, x, c_ret(e_var(x, i.span), i.span), i.span), t->a};
    }
    case SInstrKind::Sync: {
      auto [e, t] = elab_expr(ctx, i.expr);
      if (t->kind != TypeKind::Thread)
        mismatch(i.expr->span, "a thread handle", t);
      require(ctx, at, t->prio, i.span);
      return {c_sync(e, i.span), t->a};
    }
    case SInstrKind::Spawn: {
      Priority p = resolve_prio(ctx, i.spawn_prio, i.span);
      auto [m, t] = elab_cmd(ctx, i.spawn_body, p);
      return {c_spawn(p, t, m, i.span), t_thread(t, p)};
    }
    case SInstrKind::Ret: {
      auto [e, t] = elab_expr(ctx, i.expr);
      return {c_ret(e, i.span), t};
    }
  }
  fail(errcode::Type, i.span, "unreachable instruction");
}

}  // namespace

std::pair<CmdPtr, TypePtr> elab_cmd(ElabContext &ctx, const SCmdPtr &m,
                                    const Priority &at) {
  std::function<std::pair<CmdPtr, TypePtr>(size_t)> go =
      [&](size_t i) -> std::pair<CmdPtr, TypePtr> {
    const SCmd::Step &step = m->steps[i];
    if (i + 1 == m->steps.size()) return elab_instr_cmd(ctx, step.instr, at);
    auto [mi, ti] = elab_instr_cmd(ctx, step.instr, at);
    Ident x = step.binder ? *step.binder : ctx.fresh->fresh("u");
    ctx.push_var(x, ti);
    auto [rest, tr] = go(i + 1);
    ctx.pop_var();
    return {c_bind(e_cmd(at, mi, step.instr.span), x, rest, step.instr.span),
            tr};
  };
  return go(0);
}

std::tuple<Ident, ExprPtr, TypePtr> elab_decl(ElabContext &ctx,
                                              const SDeclPtr &d) {
  switch (d->kind) {
    case SDeclKind::Val: {
      auto [e, t] = elab_expr(ctx, d->body);
      return {d->name, e, t};
    }
    case SDeclKind::Fun:
    case SDeclKind::PolyFun: {
      ElabContext local = ctx;
      // Freshen priority binders; the fresh names surface in diagnostics.
      std::vector<std::pair<Ident, Constraint>> binders;
      for (const auto &b : d->prio_binders) {
        Ident renamed = local.fresh->fresh(str(b.var));
        local.prio_rename[b.var] = renamed;
        local.types.entail.push_var(renamed);
        Constraint c;
        if (b.constraint.empty()) {
          c.conjuncts.emplace_back(prio_bot(), prio_var(renamed));
        } else {
          for (const auto &[lo, hi] : b.constraint)
            c.conjuncts.emplace_back(resolve_prio(local, lo, b.span),
                                     resolve_prio(local, hi, b.span));
        }
        local.types.entail.assume(c);
        binders.emplace_back(renamed, std::move(c));
      }
      std::vector<std::pair<Ident, TypePtr>> params;
      for (const auto &[x, st] : d->params)
        params.emplace_back(x, elab_type(local, st));
      TypePtr ret = elab_type(local, d->ret_type);
      TypePtr fun_type = ret;
      for (auto it = params.rbegin(); it != params.rend(); ++it)
        fun_type = t_arrow(it->second, fun_type);
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        fun_type = t_forall(it->first, it->second, fun_type);

      local.push_var(d->name, fun_type, /*is_fix=*/true);
      for (const auto &[x, t] : params) local.push_var(x, t);
      auto [body, bt] = elab_expr(local, d->body);
      if (!type_equal(bt, ret)) mismatch(d->body->span, show(ret), bt);

      ExprPtr e = body;
      for (auto it = params.rbegin(); it != params.rend(); ++it)
        e = e_fun(it->first, it->second, e, d->span);
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        e = e_prlam(it->first, it->second, e, d->span);
      e = e_fix(d->name, fun_type, e, d->span);
      return {d->name, e, fun_type};
    }
  }
  fail(errcode::Type, d->span, "unreachable declaration");
}

ElabResult elab_program(const SProgram &p) {
  FreshNames fresh;
  std::vector<Ident> used;
  collect_idents(p, used);
  for (Ident u : used) fresh.reserve(u);

  ElabResult result;
  ElabContext ctx;
  ctx.store = &result.store;
  ctx.fresh = &fresh;

  struct Binding {
    Ident name;
    ExprPtr expr;
    TypePtr type;
    SourceSpan span;
  };
  std::vector<Binding> bindings;

  for (const auto &top : p.toplevels) {
    switch (top.kind) {
      case SToplevelKind::Priority:
        result.store.declare_priority(top.name, top.span);
        break;
      case SToplevelKind::Order:
        result.store.declare_order(top.lo, top.hi, top.span);
        break;
      case SToplevelKind::Decl: {
        auto [x, e, t] = elab_decl(ctx, top.decl);
        bindings.push_back(Binding{x, e, t, top.decl->span});
        ctx.push_var(x, t);
        result.bindings.emplace_back(x, t);
        break;
      }
    }
  }

  auto [main_cmd, main_type] = elab_cmd(ctx, p.main, prio_bot());
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    main_cmd = c_bind(e_cmd(prio_bot(), c_ret(it->expr, it->span), it->span),
                      it->name, main_cmd, it->span);
  }
  result.main = main_cmd;
  result.main_type = main_type;
  return result;
}

}  // namespace priml
