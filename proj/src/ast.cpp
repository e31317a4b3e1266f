#include "priml/ast.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <unordered_set>

namespace priml {

Priority prio_const(Ident name) { return Priority{PrioKind::Const, name}; }
Priority prio_var(Ident name) { return Priority{PrioKind::Var, name}; }
Ident bot_name() { return intern("bot"); }
Priority prio_bot() { return prio_const(bot_name()); }

// ---------------------------------------------------------------------------
// Type constructors

static TypePtr mk_type(TypeKind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}

TypePtr t_unit() {
  static TypePtr u = mk_type(TypeKind::Unit);
  return u;
}

TypePtr t_nat() {
  static TypePtr n = mk_type(TypeKind::Nat);
  return n;
}

TypePtr t_arrow(TypePtr dom, TypePtr cod) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Arrow;
  t->a = std::move(dom);
  t->b = std::move(cod);
  return t;
}

TypePtr t_prod(TypePtr l, TypePtr r) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Prod;
  t->a = std::move(l);
  t->b = std::move(r);
  return t;
}

TypePtr t_sum(TypePtr l, TypePtr r) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Sum;
  t->a = std::move(l);
  t->b = std::move(r);
  return t;
}

TypePtr t_thread(TypePtr payload, Priority p) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Thread;
  t->a = std::move(payload);
  t->prio = p;
  return t;
}

TypePtr t_cmd(TypePtr payload, Priority p) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Cmd;
  t->a = std::move(payload);
  t->prio = p;
  return t;
}

TypePtr t_forall(Ident var, Constraint c, TypePtr body) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::Forall;
  t->var = var;
  t->constraint = std::move(c);
  t->a = std::move(body);
  return t;
}

// ---------------------------------------------------------------------------
// Expression constructors

static std::shared_ptr<Expr> mk_expr(ExprKind k, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = sp;
  return e;
}

ExprPtr e_var(Ident x, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Var, sp);
  e->var = x;
  return e;
}

ExprPtr e_unit(SourceSpan sp) { return mk_expr(ExprKind::Unit, sp); }

ExprPtr e_num(Nat n, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Num, sp);
  e->num = std::move(n);
  return e;
}

ExprPtr e_fun(Ident x, TypePtr t, ExprPtr body, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Fun, sp);
  e->var = x;
  e->type = std::move(t);
  e->e1 = std::move(body);
  return e;
}

ExprPtr e_pair_v(ExprPtr a, ExprPtr b, SourceSpan sp) {
  auto e = mk_expr(ExprKind::PairV, sp);
  e->e1 = std::move(a);
  e->e2 = std::move(b);
  return e;
}

ExprPtr e_inl_v(ExprPtr v, TypePtr sum, SourceSpan sp) {
  auto e = mk_expr(ExprKind::InlV, sp);
  e->e1 = std::move(v);
  e->type = std::move(sum);
  return e;
}

ExprPtr e_inr_v(ExprPtr v, TypePtr sum, SourceSpan sp) {
  auto e = mk_expr(ExprKind::InrV, sp);
  e->e1 = std::move(v);
  e->type = std::move(sum);
  return e;
}

ExprPtr e_tid(Ident a, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Tid, sp);
  e->tid = a;
  return e;
}

ExprPtr e_cmd(Priority p, CmdPtr m, SourceSpan sp) {
  auto e = mk_expr(ExprKind::CmdVal, sp);
  e->prio = p;
  e->cmd = std::move(m);
  return e;
}

ExprPtr e_prlam(Ident pi, Constraint c, ExprPtr body, SourceSpan sp) {
  auto e = mk_expr(ExprKind::PrLam, sp);
  e->var = pi;
  e->constraint = std::move(c);
  e->e1 = std::move(body);
  return e;
}

ExprPtr e_let(Ident x, ExprPtr e1, ExprPtr e2, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Let, sp);
  e->var = x;
  e->e1 = std::move(e1);
  e->e2 = std::move(e2);
  return e;
}

ExprPtr e_ifz(ExprPtr scrut, ExprPtr z, Ident x, ExprPtr nz, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Ifz, sp);
  e->e1 = std::move(scrut);
  e->e2 = std::move(z);
  e->var = x;
  e->e3 = std::move(nz);
  return e;
}

ExprPtr e_app(ExprPtr f, ExprPtr arg, SourceSpan sp) {
  auto e = mk_expr(ExprKind::App, sp);
  e->e1 = std::move(f);
  e->e2 = std::move(arg);
  return e;
}

ExprPtr e_pair(ExprPtr a, ExprPtr b, SourceSpan sp) {
  auto e = mk_expr(ExprKind::EPair, sp);
  e->e1 = std::move(a);
  e->e2 = std::move(b);
  return e;
}

ExprPtr e_fst(ExprPtr v, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Fst, sp);
  e->e1 = std::move(v);
  return e;
}

ExprPtr e_snd(ExprPtr v, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Snd, sp);
  e->e1 = std::move(v);
  return e;
}

ExprPtr e_inl(ExprPtr v, TypePtr sum, SourceSpan sp) {
  auto e = mk_expr(ExprKind::EInl, sp);
  e->e1 = std::move(v);
  e->type = std::move(sum);
  return e;
}

ExprPtr e_inr(ExprPtr v, TypePtr sum, SourceSpan sp) {
  auto e = mk_expr(ExprKind::EInr, sp);
  e->e1 = std::move(v);
  e->type = std::move(sum);
  return e;
}

ExprPtr e_case(ExprPtr scrut, Ident x, ExprPtr l, Ident y, ExprPtr r,
               SourceSpan sp) {
  auto e = mk_expr(ExprKind::Case, sp);
  e->e1 = std::move(scrut);
  e->var = x;
  e->e2 = std::move(l);
  e->var2 = y;
  e->e3 = std::move(r);
  return e;
}

ExprPtr e_output(ExprPtr v, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Output, sp);
  e->e1 = std::move(v);
  return e;
}

ExprPtr e_input(SourceSpan sp) { return mk_expr(ExprKind::Input, sp); }

ExprPtr e_prapp(ExprPtr v, Priority p, SourceSpan sp) {
  auto e = mk_expr(ExprKind::PrApp, sp);
  e->e1 = std::move(v);
  e->prio = p;
  return e;
}

ExprPtr e_fix(Ident x, TypePtr t, ExprPtr body, SourceSpan sp) {
  auto e = mk_expr(ExprKind::Fix, sp);
  e->var = x;
  e->type = std::move(t);
  e->e1 = std::move(body);
  return e;
}

static std::shared_ptr<Cmd> mk_cmd(CmdKind k, SourceSpan sp) {
  auto m = std::make_shared<Cmd>();
  m->kind = k;
  m->span = sp;
  return m;
}

CmdPtr c_bind(ExprPtr e, Ident x, CmdPtr rest, SourceSpan sp) {
  auto m = mk_cmd(CmdKind::Bind, sp);
  m->expr = std::move(e);
  m->var = x;
  m->rest = std::move(rest);
  return m;
}

CmdPtr c_spawn(Priority p, TypePtr ret, CmdPtr body, SourceSpan sp) {
  auto m = mk_cmd(CmdKind::Spawn, sp);
  m->prio = p;
  m->ret_type = std::move(ret);
  m->rest = std::move(body);
  return m;
}

CmdPtr c_sync(ExprPtr e, SourceSpan sp) {
  auto m = mk_cmd(CmdKind::Sync, sp);
  m->expr = std::move(e);
  return m;
}

CmdPtr c_ret(ExprPtr e, SourceSpan sp) {
  auto m = mk_cmd(CmdKind::Ret, sp);
  m->expr = std::move(e);
  return m;
}

// ---------------------------------------------------------------------------
// Predicates

bool is_value(const ExprPtr &e) {
  switch (e->kind) {
    case ExprKind::Var:
    case ExprKind::Unit:
    case ExprKind::Num:
    case ExprKind::Fun:
    case ExprKind::Tid:
    case ExprKind::CmdVal:
    case ExprKind::PrLam:
      return true;
    case ExprKind::PairV:
      return is_value(e->e1) && is_value(e->e2);
    case ExprKind::InlV:
    case ExprKind::InrV:
      return is_value(e->e1);
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void fv_expr(const ExprPtr &e, std::vector<Ident> &bound,
             std::vector<Ident> &out);
void fv_cmd(const CmdPtr &m, std::vector<Ident> &bound,
            std::vector<Ident> &out);

bool is_bound(const std::vector<Ident> &bound, Ident x) {
  return std::find(bound.begin(), bound.end(), x) != bound.end();
}

void fv_expr(const ExprPtr &e, std::vector<Ident> &bound,
             std::vector<Ident> &out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Var:
      if (!is_bound(bound, e->var)) out.push_back(e->var);
      return;
    case ExprKind::Fun:
    case ExprKind::Fix:
      bound.push_back(e->var);
      fv_expr(e->e1, bound, out);
      bound.pop_back();
      return;
    case ExprKind::PrLam:
      fv_expr(e->e1, bound, out);  // priority binder, not a value binder
      return;
    case ExprKind::Let:
      fv_expr(e->e1, bound, out);
      bound.push_back(e->var);
      fv_expr(e->e2, bound, out);
      bound.pop_back();
      return;
    case ExprKind::Ifz:
      fv_expr(e->e1, bound, out);
      fv_expr(e->e2, bound, out);
      bound.push_back(e->var);
      fv_expr(e->e3, bound, out);
      bound.pop_back();
      return;
    case ExprKind::Case:
      fv_expr(e->e1, bound, out);
      bound.push_back(e->var);
      fv_expr(e->e2, bound, out);
      bound.pop_back();
      bound.push_back(e->var2);
      fv_expr(e->e3, bound, out);
      bound.pop_back();
      return;
    case ExprKind::CmdVal:
      fv_cmd(e->cmd, bound, out);
      return;
    default:
      fv_expr(e->e1, bound, out);
      fv_expr(e->e2, bound, out);
      fv_expr(e->e3, bound, out);
      return;
  }
}

void fv_cmd(const CmdPtr &m, std::vector<Ident> &bound,
            std::vector<Ident> &out) {
  if (!m) return;
  switch (m->kind) {
    case CmdKind::Bind:
      fv_expr(m->expr, bound, out);
      bound.push_back(m->var);
      fv_cmd(m->rest, bound, out);
      bound.pop_back();
      return;
    case CmdKind::Spawn:
      fv_cmd(m->rest, bound, out);
      return;
    case CmdKind::Sync:
    case CmdKind::Ret:
      fv_expr(m->expr, bound, out);
      return;
  }
}

}  // namespace

void free_vars(const ExprPtr &e, std::vector<Ident> &out) {
  std::vector<Ident> bound;
  fv_expr(e, bound, out);
}

void free_vars(const CmdPtr &m, std::vector<Ident> &out) {
  std::vector<Ident> bound;
  fv_cmd(m, bound, out);
}

bool occurs_free(Ident x, const ExprPtr &e) {
  std::vector<Ident> fv;
  free_vars(e, fv);
  return std::find(fv.begin(), fv.end(), x) != fv.end();
}

bool occurs_free(Ident x, const CmdPtr &m) {
  std::vector<Ident> fv;
  free_vars(m, fv);
  return std::find(fv.begin(), fv.end(), x) != fv.end();
}

void collect_tids(const ExprPtr &e, std::vector<Ident> &out) {
  if (!e) return;
  if (e->kind == ExprKind::Tid) out.push_back(e->tid);
  collect_tids(e->e1, out);
  collect_tids(e->e2, out);
  collect_tids(e->e3, out);
  if (e->cmd) collect_tids(e->cmd, out);
}

void collect_tids(const CmdPtr &m, std::vector<Ident> &out) {
  if (!m) return;
  collect_tids(m->expr, out);
  if (m->rest) collect_tids(m->rest, out);
}

// ---------------------------------------------------------------------------
// Value substitution

namespace {

// Smallest base_k not in avoid and distinct from base.
Ident rename_avoiding(Ident base, const std::unordered_set<Ident> &avoid) {
  for (int k = 1;; ++k) {
    Ident cand = intern(fmt::format("{}_{}", str(base), k));
    if (!avoid.count(cand)) return cand;
  }
}

struct ValueSubst {
  ExprPtr value;
  Ident var;
  std::vector<Ident> value_fv;

  ExprPtr expr(const ExprPtr &e);
  CmdPtr cmd(const CmdPtr &m);

  // Handles one binder position: returns the (possibly renamed) binder and
  // rewrites body before the recursive substitution descends.
  template <typename Term>
  std::pair<Ident, Term> enter(Ident binder, const Term &body) {
    bool captures =
        std::find(value_fv.begin(), value_fv.end(), binder) != value_fv.end();
    if (!captures) return {binder, body};
    std::unordered_set<Ident> avoid(value_fv.begin(), value_fv.end());
    std::vector<Ident> body_fv;
    free_vars(body, body_fv);
    avoid.insert(body_fv.begin(), body_fv.end());
    avoid.insert(var);
    Ident fresh = rename_avoiding(binder, avoid);
    return {fresh, subst_expr(e_var(fresh), binder, body)};
  }
};

ExprPtr ValueSubst::expr(const ExprPtr &e) {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::Var:
      return e->var == var ? value : e;
    case ExprKind::Unit:
    case ExprKind::Num:
    case ExprKind::Tid:
    case ExprKind::Input:
      return e;
    case ExprKind::Fun: {
      if (e->var == var) return e;
      auto [b, body] = enter(e->var, e->e1);
      return e_fun(b, e->type, expr(body), e->span);
    }
    case ExprKind::Fix: {
      if (e->var == var) return e;
      auto [b, body] = enter(e->var, e->e1);
      return e_fix(b, e->type, expr(body), e->span);
    }
    case ExprKind::PrLam:
      return e_prlam(e->var, e->constraint, expr(e->e1), e->span);
    case ExprKind::Let: {
      ExprPtr bound = expr(e->e1);
      if (e->var == var) return e_let(e->var, bound, e->e2, e->span);
      auto [b, body] = enter(e->var, e->e2);
      return e_let(b, bound, expr(body), e->span);
    }
    case ExprKind::Ifz: {
      ExprPtr scrut = expr(e->e1);
      ExprPtr z = expr(e->e2);
      if (e->var == var) return e_ifz(scrut, z, e->var, e->e3, e->span);
      auto [b, body] = enter(e->var, e->e3);
      return e_ifz(scrut, z, b, expr(body), e->span);
    }
    case ExprKind::Case: {
      ExprPtr scrut = expr(e->e1);
      ExprPtr l = e->e2;
      Ident lx = e->var;
      if (lx != var) {
        auto [b, body] = enter(lx, l);
        lx = b;
        l = expr(body);
      }
      ExprPtr r = e->e3;
      Ident ry = e->var2;
      if (ry != var) {
        auto [b, body] = enter(ry, r);
        ry = b;
        r = expr(body);
      }
      return e_case(scrut, lx, l, ry, r, e->span);
    }
    case ExprKind::CmdVal:
      return e_cmd(e->prio, cmd(e->cmd), e->span);
    case ExprKind::PairV:
      return e_pair_v(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::EPair:
      return e_pair(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::InlV:
      return e_inl_v(expr(e->e1), e->type, e->span);
    case ExprKind::InrV:
      return e_inr_v(expr(e->e1), e->type, e->span);
    case ExprKind::EInl:
      return e_inl(expr(e->e1), e->type, e->span);
    case ExprKind::EInr:
      return e_inr(expr(e->e1), e->type, e->span);
    case ExprKind::App:
      return e_app(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::Fst:
      return e_fst(expr(e->e1), e->span);
    case ExprKind::Snd:
      return e_snd(expr(e->e1), e->span);
    case ExprKind::Output:
      return e_output(expr(e->e1), e->span);
    case ExprKind::PrApp:
      return e_prapp(expr(e->e1), e->prio, e->span);
  }
  return e;
}

CmdPtr ValueSubst::cmd(const CmdPtr &m) {
  if (!m) return m;
  switch (m->kind) {
    case CmdKind::Bind: {
      ExprPtr e = expr(m->expr);
      if (m->var == var) return c_bind(e, m->var, m->rest, m->span);
      auto [b, body] = enter(m->var, m->rest);
      return c_bind(e, b, cmd(body), m->span);
    }
    case CmdKind::Spawn:
      return c_spawn(m->prio, m->ret_type, cmd(m->rest), m->span);
    case CmdKind::Sync:
      return c_sync(expr(m->expr), m->span);
    case CmdKind::Ret:
      return c_ret(expr(m->expr), m->span);
  }
  return m;
}

}  // namespace

ExprPtr subst_expr(const ExprPtr &value, Ident x, const ExprPtr &target) {
  ValueSubst s{value, x, {}};
  free_vars(value, s.value_fv);
  return s.expr(target);
}

CmdPtr subst_expr(const ExprPtr &value, Ident x, const CmdPtr &target) {
  ValueSubst s{value, x, {}};
  free_vars(value, s.value_fv);
  return s.cmd(target);
}

// ---------------------------------------------------------------------------
// Priority substitution

namespace {

void free_prio_vars_type(const TypePtr &t, std::vector<Ident> &bound,
                         std::vector<Ident> &out);

void fpv_prio(const Priority &p, std::vector<Ident> &bound,
              std::vector<Ident> &out) {
  if (p.is_var() && !is_bound(bound, p.name)) out.push_back(p.name);
}

void fpv_constraint(const Constraint &c, std::vector<Ident> &bound,
                    std::vector<Ident> &out) {
  for (const auto &[l, r] : c.conjuncts) {
    fpv_prio(l, bound, out);
    fpv_prio(r, bound, out);
  }
}

void free_prio_vars_type(const TypePtr &t, std::vector<Ident> &bound,
                         std::vector<Ident> &out) {
  if (!t) return;
  switch (t->kind) {
    case TypeKind::Thread:
    case TypeKind::Cmd:
      fpv_prio(t->prio, bound, out);
      free_prio_vars_type(t->a, bound, out);
      return;
    case TypeKind::Forall:
      bound.push_back(t->var);
      fpv_constraint(t->constraint, bound, out);
      free_prio_vars_type(t->a, bound, out);
      bound.pop_back();
      return;
    default:
      free_prio_vars_type(t->a, bound, out);
      free_prio_vars_type(t->b, bound, out);
      return;
  }
}

void fpv_expr(const ExprPtr &e, std::vector<Ident> &bound,
              std::vector<Ident> &out);

void fpv_cmd(const CmdPtr &m, std::vector<Ident> &bound,
             std::vector<Ident> &out) {
  if (!m) return;
  if (m->kind == CmdKind::Spawn) {
    fpv_prio(m->prio, bound, out);
    free_prio_vars_type(m->ret_type, bound, out);
  }
  fpv_expr(m->expr, bound, out);
  if (m->rest) fpv_cmd(m->rest, bound, out);
}

void fpv_expr(const ExprPtr &e, std::vector<Ident> &bound,
              std::vector<Ident> &out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::PrLam:
      bound.push_back(e->var);
      fpv_constraint(e->constraint, bound, out);
      fpv_expr(e->e1, bound, out);
      bound.pop_back();
      return;
    case ExprKind::CmdVal:
      fpv_prio(e->prio, bound, out);
      fpv_cmd(e->cmd, bound, out);
      return;
    case ExprKind::PrApp:
      fpv_prio(e->prio, bound, out);
      fpv_expr(e->e1, bound, out);
      return;
    default:
      free_prio_vars_type(e->type, bound, out);
      fpv_expr(e->e1, bound, out);
      fpv_expr(e->e2, bound, out);
      fpv_expr(e->e3, bound, out);
      if (e->cmd) fpv_cmd(e->cmd, bound, out);
      return;
  }
}

struct PrioSubst {
  Priority replacement;
  Ident var;

  Priority prio(const Priority &p) const {
    if (p.is_var() && p.name == var) return replacement;
    return p;
  }

  Constraint constraint(const Constraint &c) const {
    Constraint out;
    out.conjuncts.reserve(c.conjuncts.size());
    for (const auto &[l, r] : c.conjuncts)
      out.conjuncts.emplace_back(prio(l), prio(r));
    return out;
  }

  bool captures(Ident binder) const {
    return replacement.is_var() && replacement.name == binder;
  }

  TypePtr type(const TypePtr &t) const;
  ExprPtr expr(const ExprPtr &e) const;
  CmdPtr cmd(const CmdPtr &m) const;
};

TypePtr PrioSubst::type(const TypePtr &t) const {
  if (!t) return t;
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Nat:
      return t;
    case TypeKind::Arrow:
      return t_arrow(type(t->a), type(t->b));
    case TypeKind::Prod:
      return t_prod(type(t->a), type(t->b));
    case TypeKind::Sum:
      return t_sum(type(t->a), type(t->b));
    case TypeKind::Thread:
      return t_thread(type(t->a), prio(t->prio));
    case TypeKind::Cmd:
      return t_cmd(type(t->a), prio(t->prio));
    case TypeKind::Forall: {
      if (t->var == var) return t;  // shadowed in both constraint and body
      if (captures(t->var)) {
        std::vector<Ident> fv, bound;
        fpv_constraint(t->constraint, bound, fv);
        free_prio_vars_type(t->a, bound, fv);
        std::unordered_set<Ident> avoid(fv.begin(), fv.end());
        avoid.insert(var);
        avoid.insert(replacement.name);
        Ident fresh = rename_avoiding(t->var, avoid);
        PrioSubst rename{prio_var(fresh), t->var};
        TypePtr renamed =
            t_forall(fresh, rename.constraint(t->constraint), rename.type(t->a));
        return type(renamed);
      }
      return t_forall(t->var, constraint(t->constraint), type(t->a));
    }
  }
  return t;
}

ExprPtr PrioSubst::expr(const ExprPtr &e) const {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::Var:
    case ExprKind::Unit:
    case ExprKind::Num:
    case ExprKind::Tid:
    case ExprKind::Input:
      return e;
    case ExprKind::PrLam: {
      if (e->var == var) return e;
      if (captures(e->var)) {
        std::vector<Ident> fv, bound;
        fpv_constraint(e->constraint, bound, fv);
        fpv_expr(e->e1, bound, fv);
        std::unordered_set<Ident> avoid(fv.begin(), fv.end());
        avoid.insert(var);
        avoid.insert(replacement.name);
        Ident fresh = rename_avoiding(e->var, avoid);
        PrioSubst rename{prio_var(fresh), e->var};
        ExprPtr renamed = e_prlam(fresh, rename.constraint(e->constraint),
                                  rename.expr(e->e1), e->span);
        return expr(renamed);
      }
      return e_prlam(e->var, constraint(e->constraint), expr(e->e1), e->span);
    }
    case ExprKind::CmdVal:
      return e_cmd(prio(e->prio), cmd(e->cmd), e->span);
    case ExprKind::PrApp:
      return e_prapp(expr(e->e1), prio(e->prio), e->span);
    case ExprKind::Fun:
      return e_fun(e->var, type(e->type), expr(e->e1), e->span);
    case ExprKind::Fix:
      return e_fix(e->var, type(e->type), expr(e->e1), e->span);
    case ExprKind::Let:
      return e_let(e->var, expr(e->e1), expr(e->e2), e->span);
    case ExprKind::Ifz:
      return e_ifz(expr(e->e1), expr(e->e2), e->var, expr(e->e3), e->span);
    case ExprKind::Case:
      return e_case(expr(e->e1), e->var, expr(e->e2), e->var2, expr(e->e3),
                    e->span);
    case ExprKind::PairV:
      return e_pair_v(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::EPair:
      return e_pair(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::InlV:
      return e_inl_v(expr(e->e1), type(e->type), e->span);
    case ExprKind::InrV:
      return e_inr_v(expr(e->e1), type(e->type), e->span);
    case ExprKind::EInl:
      return e_inl(expr(e->e1), type(e->type), e->span);
    case ExprKind::EInr:
      return e_inr(expr(e->e1), type(e->type), e->span);
    case ExprKind::App:
      return e_app(expr(e->e1), expr(e->e2), e->span);
    case ExprKind::Fst:
      return e_fst(expr(e->e1), e->span);
    case ExprKind::Snd:
      return e_snd(expr(e->e1), e->span);
    case ExprKind::Output:
      return e_output(expr(e->e1), e->span);
  }
  return e;
}

CmdPtr PrioSubst::cmd(const CmdPtr &m) const {
  if (!m) return m;
  switch (m->kind) {
    case CmdKind::Bind:
      return c_bind(expr(m->expr), m->var, cmd(m->rest), m->span);
    case CmdKind::Spawn:
      return c_spawn(prio(m->prio), type(m->ret_type), cmd(m->rest), m->span);
    case CmdKind::Sync:
      return c_sync(expr(m->expr), m->span);
    case CmdKind::Ret:
      return c_ret(expr(m->expr), m->span);
  }
  return m;
}

}  // namespace

Priority subst_prio(const Priority &p, Ident pi, const Priority &target) {
  return PrioSubst{p, pi}.prio(target);
}

Constraint subst_prio(const Priority &p, Ident pi, const Constraint &target) {
  return PrioSubst{p, pi}.constraint(target);
}

TypePtr subst_prio(const Priority &p, Ident pi, const TypePtr &target) {
  return PrioSubst{p, pi}.type(target);
}

ExprPtr subst_prio(const Priority &p, Ident pi, const ExprPtr &target) {
  return PrioSubst{p, pi}.expr(target);
}

CmdPtr subst_prio(const Priority &p, Ident pi, const CmdPtr &target) {
  return PrioSubst{p, pi}.cmd(target);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace {

struct AlphaCtx {
  // Parallel binder stacks; a bound name matches iff both sides bind at the
  // same depth.
  std::vector<std::pair<Ident, Ident>> vals;
  std::vector<std::pair<Ident, Ident>> prios;

  bool var_eq(Ident x, Ident y) const {
    for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
      if (it->first == x || it->second == y)
        return it->first == x && it->second == y;
    }
    return x == y;
  }

  bool prio_var_eq(Ident x, Ident y) const {
    for (auto it = prios.rbegin(); it != prios.rend(); ++it) {
      if (it->first == x || it->second == y)
        return it->first == x && it->second == y;
    }
    return x == y;
  }

  bool prio_eq(const Priority &p, const Priority &q) const {
    if (p.kind != q.kind) return false;
    if (p.is_const()) return p.name == q.name;
    return prio_var_eq(p.name, q.name);
  }

  bool constraint_eq(const Constraint &c, const Constraint &d) const {
    if (c.conjuncts.size() != d.conjuncts.size()) return false;
    for (size_t i = 0; i < c.conjuncts.size(); ++i) {
      if (!prio_eq(c.conjuncts[i].first, d.conjuncts[i].first)) return false;
      if (!prio_eq(c.conjuncts[i].second, d.conjuncts[i].second)) return false;
    }
    return true;
  }

  bool type_eq(const TypePtr &s, const TypePtr &t) {
    if (s == t) return true;
    if (!s || !t) return false;
    if (s->kind != t->kind) return false;
    switch (s->kind) {
      case TypeKind::Unit:
      case TypeKind::Nat:
        return true;
      case TypeKind::Arrow:
      case TypeKind::Prod:
      case TypeKind::Sum:
        return type_eq(s->a, t->a) && type_eq(s->b, t->b);
      case TypeKind::Thread:
      case TypeKind::Cmd:
        return prio_eq(s->prio, t->prio) && type_eq(s->a, t->a);
      case TypeKind::Forall: {
        prios.emplace_back(s->var, t->var);
        bool ok = constraint_eq(s->constraint, t->constraint) &&
                  type_eq(s->a, t->a);
        prios.pop_back();
        return ok;
      }
    }
    return false;
  }

  bool expr_eq(const ExprPtr &a, const ExprPtr &b);
  bool cmd_eq(const CmdPtr &a, const CmdPtr &b);
};

bool AlphaCtx::expr_eq(const ExprPtr &a, const ExprPtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Var:
      return var_eq(a->var, b->var);
    case ExprKind::Unit:
    case ExprKind::Input:
      return true;
    case ExprKind::Num:
      return a->num == b->num;
    case ExprKind::Tid:
      return a->tid == b->tid;
    case ExprKind::Fun:
    case ExprKind::Fix: {
      if (!type_eq(a->type, b->type)) return false;
      vals.emplace_back(a->var, b->var);
      bool ok = expr_eq(a->e1, b->e1);
      vals.pop_back();
      return ok;
    }
    case ExprKind::PrLam: {
      prios.emplace_back(a->var, b->var);
      bool ok = constraint_eq(a->constraint, b->constraint) &&
                expr_eq(a->e1, b->e1);
      prios.pop_back();
      return ok;
    }
    case ExprKind::Let: {
      if (!expr_eq(a->e1, b->e1)) return false;
      vals.emplace_back(a->var, b->var);
      bool ok = expr_eq(a->e2, b->e2);
      vals.pop_back();
      return ok;
    }
    case ExprKind::Ifz: {
      if (!expr_eq(a->e1, b->e1) || !expr_eq(a->e2, b->e2)) return false;
      vals.emplace_back(a->var, b->var);
      bool ok = expr_eq(a->e3, b->e3);
      vals.pop_back();
      return ok;
    }
    case ExprKind::Case: {
      if (!expr_eq(a->e1, b->e1)) return false;
      vals.emplace_back(a->var, b->var);
      bool ok = expr_eq(a->e2, b->e2);
      vals.pop_back();
      if (!ok) return false;
      vals.emplace_back(a->var2, b->var2);
      ok = expr_eq(a->e3, b->e3);
      vals.pop_back();
      return ok;
    }
    case ExprKind::CmdVal:
      return prio_eq(a->prio, b->prio) && cmd_eq(a->cmd, b->cmd);
    case ExprKind::PrApp:
      return prio_eq(a->prio, b->prio) && expr_eq(a->e1, b->e1);
    case ExprKind::InlV:
    case ExprKind::InrV:
    case ExprKind::EInl:
    case ExprKind::EInr:
      return type_eq(a->type, b->type) && expr_eq(a->e1, b->e1);
    case ExprKind::PairV:
    case ExprKind::EPair:
    case ExprKind::App:
      return expr_eq(a->e1, b->e1) && expr_eq(a->e2, b->e2);
    case ExprKind::Fst:
    case ExprKind::Snd:
    case ExprKind::Output:
      return expr_eq(a->e1, b->e1);
  }
  return false;
}

bool AlphaCtx::cmd_eq(const CmdPtr &a, const CmdPtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case CmdKind::Bind: {
      if (!expr_eq(a->expr, b->expr)) return false;
      vals.emplace_back(a->var, b->var);
      bool ok = cmd_eq(a->rest, b->rest);
      vals.pop_back();
      return ok;
    }
    case CmdKind::Spawn:
      return prio_eq(a->prio, b->prio) && type_eq(a->ret_type, b->ret_type) &&
             cmd_eq(a->rest, b->rest);
    case CmdKind::Sync:
    case CmdKind::Ret:
      return expr_eq(a->expr, b->expr);
  }
  return false;
}

}  // namespace

bool type_equal(const TypePtr &x, const TypePtr &y) {
  AlphaCtx ctx;
  return ctx.type_eq(x, y);
}

bool alpha_equal(const ExprPtr &x, const ExprPtr &y) {
  AlphaCtx ctx;
  return ctx.expr_eq(x, y);
}

bool alpha_equal(const CmdPtr &x, const CmdPtr &y) {
  AlphaCtx ctx;
  return ctx.cmd_eq(x, y);
}

}  // namespace priml
