#include "priml/typecheck.hpp"

#include <fmt/core.h>

#include "priml/pretty.hpp"

namespace priml {

void Signature::add(Ident id, TypePtr ret_type, Priority prio) {
  if (index_.count(id))
    fail(errcode::DupThread,
         fmt::format("thread {} already in signature", str(id)));
  index_[id] = entries_.size();
  entries_.push_back(Entry{id, std::move(ret_type), prio});
}

const Signature::Entry *Signature::find(Ident id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return nullptr;
  return &entries_[it->second];
}

const TypePtr *TypeContext::lookup(Ident x) const {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

bool value_check(const ExprPtr &e, const Signature &sig) {
  if (!is_value(e)) return false;
  std::vector<Ident> tids;
  collect_tids(e, tids);
  for (Ident a : tids)
    if (!sig.find(a)) return false;
  return true;
}

namespace {

[[noreturn]] void type_mismatch(SourceSpan span, const std::string &expected,
                                const TypePtr &found) {
  fail(errcode::Type, span,
       fmt::format("type mismatch at {}: expected {}, found {}", span.render(),
                   expected, show(found)));
}

void check_prio_known(const PartialOrder &store, const EntailContext &ctx,
                      const Priority &p, SourceSpan span) {
  if (p.is_const()) {
    if (!store.declared(p.name) && !ctx.has_var(p.name))
      fail(errcode::UnknownPriority, span,
           fmt::format("unknown priority {}", str(p.name)));
  } else if (!ctx.has_var(p.name)) {
    fail(errcode::Unbound, span,
         fmt::format("unbound priority variable {}", str(p.name)));
  }
}

void require_constraint(const PartialOrder &store, const EntailContext &ctx,
                        const Constraint &c, SourceSpan span,
                        const char *code) {
  for (const auto &[lo, hi] : c.conjuncts) {
    if (!entails_leq(store, ctx, lo, hi))
      fail(code, span,
           fmt::format("constraint violated at {}: {} <= {}", span.render(),
                       show(lo), show(hi)));
  }
}

}  // namespace

TypePtr type_expr(const PartialOrder &store, const Signature &sig,
                  TypeContext &ctx, const ExprPtr &e) {
  switch (e->kind) {
    case ExprKind::Var: {
      const TypePtr *t = ctx.lookup(e->var);
      if (!t)
        fail(errcode::Unbound, e->span,
             fmt::format("unbound variable {}", str(e->var)));
      return *t;
    }
    case ExprKind::Unit:
      return t_unit();
    case ExprKind::Num:
      return t_nat();
    case ExprKind::Fun: {
      if (!e->type)
        fail(errcode::Type, e->span,
             fmt::format("missing parameter type annotation on {}",
                         str(e->var)));
      ctx.vars.emplace_back(e->var, e->type);
      TypePtr body = type_expr(store, sig, ctx, e->e1);
      ctx.vars.pop_back();
      return t_arrow(e->type, body);
    }
    case ExprKind::Fix: {
      ctx.vars.emplace_back(e->var, e->type);
      TypePtr body = type_expr(store, sig, ctx, e->e1);
      ctx.vars.pop_back();
      if (!type_equal(body, e->type))
        type_mismatch(e->span, show(e->type), body);
      return e->type;
    }
    case ExprKind::Tid: {
      const Signature::Entry *entry = sig.find(e->tid);
      if (!entry)
        fail(errcode::UnknownThread, e->span,
             fmt::format("unknown thread {}", str(e->tid)));
      return t_thread(entry->ret_type, entry->prio);
    }
    case ExprKind::CmdVal: {
      check_prio_known(store, ctx.entail, e->prio, e->span);
      TypePtr t = type_cmd(store, sig, ctx, e->cmd, e->prio);
      return t_cmd(t, e->prio);
    }
    case ExprKind::PrLam: {
      TypeContext inner = ctx;
      inner.entail.push_var(e->var);
      for (const auto &[lo, hi] : e->constraint.conjuncts) {
        check_prio_known(store, inner.entail, lo, e->span);
        check_prio_known(store, inner.entail, hi, e->span);
      }
      inner.entail.assume(e->constraint);
      TypePtr body = type_expr(store, sig, inner, e->e1);
      return t_forall(e->var, e->constraint, body);
    }
    case ExprKind::PrApp: {
      check_prio_known(store, ctx.entail, e->prio, e->span);
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (t->kind != TypeKind::Forall)
        type_mismatch(e->span, "a priority-polymorphic value", t);
      Constraint inst = subst_prio(e->prio, t->var, t->constraint);
      require_constraint(store, ctx.entail, inst, e->span,
                         errcode::PrioInversion);
      return subst_prio(e->prio, t->var, t->a);
    }
    case ExprKind::Let: {
      TypePtr t1 = type_expr(store, sig, ctx, e->e1);
      ctx.vars.emplace_back(e->var, t1);
      TypePtr t2 = type_expr(store, sig, ctx, e->e2);
      ctx.vars.pop_back();
      return t2;
    }
    case ExprKind::Ifz: {
      TypePtr ts = type_expr(store, sig, ctx, e->e1);
      if (ts->kind != TypeKind::Nat) type_mismatch(e->e1->span, "nat", ts);
      TypePtr t1 = type_expr(store, sig, ctx, e->e2);
      ctx.vars.emplace_back(e->var, t_nat());
      TypePtr t2 = type_expr(store, sig, ctx, e->e3);
      ctx.vars.pop_back();
      if (!type_equal(t1, t2)) type_mismatch(e->e3->span, show(t1), t2);
      return t1;
    }
    case ExprKind::App: {
      TypePtr tf = type_expr(store, sig, ctx, e->e1);
      if (tf->kind != TypeKind::Arrow)
        type_mismatch(e->e1->span, "a function", tf);
      TypePtr ta = type_expr(store, sig, ctx, e->e2);
      if (!type_equal(ta, tf->a)) type_mismatch(e->e2->span, show(tf->a), ta);
      return tf->b;
    }
    case ExprKind::PairV:
    case ExprKind::EPair: {
      TypePtr l = type_expr(store, sig, ctx, e->e1);
      TypePtr r = type_expr(store, sig, ctx, e->e2);
      return t_prod(l, r);
    }
    case ExprKind::Fst: {
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (t->kind != TypeKind::Prod) type_mismatch(e->e1->span, "a pair", t);
      return t->a;
    }
    case ExprKind::Snd: {
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (t->kind != TypeKind::Prod) type_mismatch(e->e1->span, "a pair", t);
      return t->b;
    }
    case ExprKind::InlV:
    case ExprKind::EInl: {
      if (!e->type || e->type->kind != TypeKind::Sum)
        fail(errcode::Type, e->span, "inl needs a sum type annotation");
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (!type_equal(t, e->type->a)) type_mismatch(e->span, show(e->type->a), t);
      return e->type;
    }
    case ExprKind::InrV:
    case ExprKind::EInr: {
      if (!e->type || e->type->kind != TypeKind::Sum)
        fail(errcode::Type, e->span, "inr needs a sum type annotation");
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (!type_equal(t, e->type->b)) type_mismatch(e->span, show(e->type->b), t);
      return e->type;
    }
    case ExprKind::Case: {
      TypePtr ts = type_expr(store, sig, ctx, e->e1);
      if (ts->kind != TypeKind::Sum)
        type_mismatch(e->e1->span, "a sum value", ts);
      ctx.vars.emplace_back(e->var, ts->a);
      TypePtr t1 = type_expr(store, sig, ctx, e->e2);
      ctx.vars.pop_back();
      ctx.vars.emplace_back(e->var2, ts->b);
      TypePtr t2 = type_expr(store, sig, ctx, e->e3);
      ctx.vars.pop_back();
      if (!type_equal(t1, t2)) type_mismatch(e->e3->span, show(t1), t2);
      return t1;
    }
    case ExprKind::Output: {
      TypePtr t = type_expr(store, sig, ctx, e->e1);
      if (t->kind != TypeKind::Nat) type_mismatch(e->e1->span, "nat", t);
      return t_unit();
    }
    case ExprKind::Input:
      return t_nat();
  }
  fail(errcode::Type, e->span, "unreachable expression form");
}

TypePtr type_cmd(const PartialOrder &store, const Signature &sig,
                 TypeContext &ctx, const CmdPtr &m, const Priority &at) {
  switch (m->kind) {
    case CmdKind::Bind: {
      TypePtr te = type_expr(store, sig, ctx, m->expr);
      if (te->kind != TypeKind::Cmd)
        type_mismatch(m->expr->span, "an encapsulated command", te);
      if (!(te->prio == at))
        type_mismatch(m->expr->span,
                      fmt::format("a command at priority {}", show(at)), te);
      ctx.vars.emplace_back(m->var, te->a);
      TypePtr rest = type_cmd(store, sig, ctx, m->rest, at);
      ctx.vars.pop_back();
      return rest;
    }
    case CmdKind::Spawn: {
      check_prio_known(store, ctx.entail, m->prio, m->span);
      TypePtr body = type_cmd(store, sig, ctx, m->rest, m->prio);
      if (!type_equal(body, m->ret_type))
        type_mismatch(m->span, show(m->ret_type), body);
      return t_thread(m->ret_type, m->prio);
    }
    case CmdKind::Sync: {
      TypePtr te = type_expr(store, sig, ctx, m->expr);
      if (te->kind != TypeKind::Thread)
        type_mismatch(m->expr->span, "a thread handle", te);
      // The priority-inversion gate: the target priority must be at least
      // the current one.
      if (!entails_leq(store, ctx.entail, at, te->prio))
        fail(errcode::PrioInversion, m->span,
             fmt::format("constraint violated at {}: {} <= {}",
                         m->span.render(), show(at), show(te->prio)));
      return te->a;
    }
    case CmdKind::Ret:
      return type_expr(store, sig, ctx, m->expr);
  }
  fail(errcode::Type, m->span, "unreachable command form");
}

Signature type_threadpool(const PartialOrder &store, const Signature &ambient,
                          const std::vector<PoolThread> &threads) {
  // Concat with mutual signatures: every thread types under ambient plus the
  // signatures of all threads in the pool.
  Signature full;
  for (const auto &entry : ambient.entries())
    full.add(entry.id, entry.ret_type, entry.prio);
  Signature introduced;
  for (const auto &t : threads) {
    if (ambient.find(t.id))
      fail(errcode::DupThread,
           fmt::format("thread {} already in ambient signature", str(t.id)));
    full.add(t.id, t.ret_type, t.prio);
    introduced.add(t.id, t.ret_type, t.prio);
  }
  for (const auto &t : threads) {
    TypeContext ctx;
    TypePtr got = type_cmd(store, full, ctx, t.cmd, t.prio);
    if (!type_equal(got, t.ret_type))
      fail(errcode::Type, t.cmd->span,
           fmt::format("thread {} returns {}, signature says {}", str(t.id),
                       show(got), show(t.ret_type)));
  }
  return introduced;
}

void type_action(const PartialOrder &store, const Signature &sig,
                 const Action &act) {
  if (act.kind == ActionKind::Silent) return;
  const Signature::Entry *entry = sig.find(act.thread);
  if (!entry)
    fail(errcode::UnknownThread,
         fmt::format("action mentions unknown thread {}", str(act.thread)));
  TypeContext ctx;
  TypePtr t = type_expr(store, sig, ctx, act.value);
  if (!type_equal(t, entry->ret_type))
    fail(errcode::Type,
         fmt::format("action value for {} has type {}, expected {}",
                     str(act.thread), show(t), show(entry->ret_type)));
}

}  // namespace priml
