#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "priml/ident.hpp"
#include "priml/source.hpp"

namespace priml {

using Nat = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Priorities and constraints

enum class PrioKind { Const, Var };

struct Priority {
  PrioKind kind = PrioKind::Const;
  Ident name;

  bool operator==(const Priority &) const = default;
  bool is_const() const { return kind == PrioKind::Const; }
  bool is_var() const { return kind == PrioKind::Var; }
};

Priority prio_const(Ident name);
Priority prio_var(Ident name);
Priority prio_bot();
Ident bot_name();

// Conjunction of lhs <= rhs facts. Order of conjuncts is irrelevant to
// entailment.
struct Constraint {
  std::vector<std::pair<Priority, Priority>> conjuncts;
};

// ---------------------------------------------------------------------------
// Types

enum class TypeKind { Unit, Nat, Arrow, Prod, Sum, Thread, Cmd, Forall };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind kind;
  TypePtr a;              // Arrow dom / Prod l / Sum l / Thread,Cmd payload / Forall body
  TypePtr b;              // Arrow cod / Prod r / Sum r
  Priority prio;          // Thread / Cmd
  Ident var;              // Forall binder
  Constraint constraint;  // Forall constraint
};

TypePtr t_unit();
TypePtr t_nat();
TypePtr t_arrow(TypePtr dom, TypePtr cod);
TypePtr t_prod(TypePtr l, TypePtr r);
TypePtr t_sum(TypePtr l, TypePtr r);
TypePtr t_thread(TypePtr payload, Priority p);
TypePtr t_cmd(TypePtr payload, Priority p);
TypePtr t_forall(Ident var, Constraint c, TypePtr body);

// Alpha-equivalence (Forall binders).
bool type_equal(const TypePtr &x, const TypePtr &y);

// ---------------------------------------------------------------------------
// Expressions, values and commands

// Value forms come first; is_value also depends on subterms for PairV/InlV/
// InrV. EPair/EInl/EInr are the source-level allocation instructions; PairV/
// InlV/InrV are the runtime forms they step to.
enum class ExprKind {
  Var,
  Unit,
  Num,
  Fun,     // fn (x : t) => e
  PairV,   // <v1, v2>
  InlV,    // inl[t] v (runtime)
  InrV,
  Tid,     // tid a
  CmdVal,  // cmd[p] { m }
  PrLam,   // plam[pi : C] => e
  Let,     // let x = e1 in e2
  Ifz,     // ifz v { e1 } { x. e2 }
  App,     // v1 v2
  EPair,   // (v1, v2) source form
  Fst,
  Snd,
  EInl,  // inl[t] v source form
  EInr,
  Case,  // case v { inl x. e1 | inr y. e2 }
  Output,
  Input,
  PrApp,  // [p]v
  Fix,    // fix x : t => e
};

struct Expr;
struct Cmd;
using ExprPtr = std::shared_ptr<const Expr>;
using CmdPtr = std::shared_ptr<const Cmd>;

struct Expr {
  ExprKind kind;
  SourceSpan span;

  Ident var;        // Var name / Fun,Fix,Let,PrLam binder / Ifz binder / Case left binder
  Ident var2;       // Case right binder
  Nat num;          // Num
  TypePtr type;     // Fun param type / Fix type / EInl,EInr,InlV,InrV sum type
  Priority prio;    // CmdVal / PrApp
  Constraint constraint;  // PrLam
  ExprPtr e1, e2, e3;     // subexpressions; layout depends on kind
  CmdPtr cmd;             // CmdVal body
  Ident tid;              // Tid
};

ExprPtr e_var(Ident x, SourceSpan sp = {});
ExprPtr e_unit(SourceSpan sp = {});
ExprPtr e_num(Nat n, SourceSpan sp = {});
ExprPtr e_fun(Ident x, TypePtr t, ExprPtr body, SourceSpan sp = {});
ExprPtr e_pair_v(ExprPtr a, ExprPtr b, SourceSpan sp = {});
ExprPtr e_inl_v(ExprPtr v, TypePtr sum, SourceSpan sp = {});
ExprPtr e_inr_v(ExprPtr v, TypePtr sum, SourceSpan sp = {});
ExprPtr e_tid(Ident a, SourceSpan sp = {});
ExprPtr e_cmd(Priority p, CmdPtr m, SourceSpan sp = {});
ExprPtr e_prlam(Ident pi, Constraint c, ExprPtr body, SourceSpan sp = {});
ExprPtr e_let(Ident x, ExprPtr e1, ExprPtr e2, SourceSpan sp = {});
ExprPtr e_ifz(ExprPtr scrut, ExprPtr z, Ident x, ExprPtr nz, SourceSpan sp = {});
ExprPtr e_app(ExprPtr f, ExprPtr arg, SourceSpan sp = {});
ExprPtr e_pair(ExprPtr a, ExprPtr b, SourceSpan sp = {});
ExprPtr e_fst(ExprPtr v, SourceSpan sp = {});
ExprPtr e_snd(ExprPtr v, SourceSpan sp = {});
ExprPtr e_inl(ExprPtr v, TypePtr sum, SourceSpan sp = {});
ExprPtr e_inr(ExprPtr v, TypePtr sum, SourceSpan sp = {});
ExprPtr e_case(ExprPtr scrut, Ident x, ExprPtr l, Ident y, ExprPtr r,
               SourceSpan sp = {});
ExprPtr e_output(ExprPtr v, SourceSpan sp = {});
ExprPtr e_input(SourceSpan sp = {});
ExprPtr e_prapp(ExprPtr v, Priority p, SourceSpan sp = {});
ExprPtr e_fix(Ident x, TypePtr t, ExprPtr body, SourceSpan sp = {});

enum class CmdKind { Bind, Spawn, Sync, Ret };

struct Cmd {
  CmdKind kind;
  SourceSpan span;

  ExprPtr expr;      // Bind e / Sync e / Ret e
  Ident var;         // Bind binder
  CmdPtr rest;       // Bind continuation / Spawn body
  Priority prio;     // Spawn priority
  TypePtr ret_type;  // Spawn return type annotation
};

CmdPtr c_bind(ExprPtr e, Ident x, CmdPtr rest, SourceSpan sp = {});
CmdPtr c_spawn(Priority p, TypePtr ret, CmdPtr body, SourceSpan sp = {});
CmdPtr c_sync(ExprPtr e, SourceSpan sp = {});
CmdPtr c_ret(ExprPtr e, SourceSpan sp = {});

// ---------------------------------------------------------------------------
// Predicates and traversals

// Syntactic value subclass of Fig-style expressions.
bool is_value(const ExprPtr &e);

// Free value variables / free priority variables.
void free_vars(const ExprPtr &e, std::vector<Ident> &out);
void free_vars(const CmdPtr &m, std::vector<Ident> &out);
bool occurs_free(Ident x, const ExprPtr &e);
bool occurs_free(Ident x, const CmdPtr &m);

// Every thread name occurring anywhere in the term (including under cmd
// values and binders).
void collect_tids(const ExprPtr &e, std::vector<Ident> &out);
void collect_tids(const CmdPtr &m, std::vector<Ident> &out);

// ---------------------------------------------------------------------------
// Substitution (capture-avoiding)

ExprPtr subst_expr(const ExprPtr &value, Ident x, const ExprPtr &target);
CmdPtr subst_expr(const ExprPtr &value, Ident x, const CmdPtr &target);

Priority subst_prio(const Priority &p, Ident pi, const Priority &target);
Constraint subst_prio(const Priority &p, Ident pi, const Constraint &target);
TypePtr subst_prio(const Priority &p, Ident pi, const TypePtr &target);
ExprPtr subst_prio(const Priority &p, Ident pi, const ExprPtr &target);
CmdPtr subst_prio(const Priority &p, Ident pi, const CmdPtr &target);

// ---------------------------------------------------------------------------
// Alpha-equivalence

bool alpha_equal(const ExprPtr &x, const ExprPtr &y);
bool alpha_equal(const CmdPtr &x, const CmdPtr &y);

}  // namespace priml
