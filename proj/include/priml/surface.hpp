#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "priml/ast.hpp"

namespace priml {

// Surface types; priorities are unresolved identifiers until elaboration.
struct SType;
using STypePtr = std::shared_ptr<const SType>;

struct SType {
  TypeKind kind = TypeKind::Unit;  // Unit/Nat/Arrow/Prod/Sum/Thread/Cmd only
  STypePtr a, b;
  Ident prio;
  SourceSpan span;
};

STypePtr st_base(TypeKind k, SourceSpan sp = {});
STypePtr st_binop(TypeKind k, STypePtr a, STypePtr b, SourceSpan sp = {});
STypePtr st_at(TypeKind k, STypePtr payload, Ident prio, SourceSpan sp = {});

struct SExpr;
struct SCmd;
struct SDecl;
using SExprPtr = std::shared_ptr<const SExpr>;
using SCmdPtr = std::shared_ptr<const SCmd>;
using SDeclPtr = std::shared_ptr<const SDecl>;

enum class SExprKind {
  Var,
  Unit,
  Num,
  Fn,
  App,
  Pair,
  Fst,
  Snd,
  Inl,
  Inr,
  Case,
  Ifz,
  Let,
  CmdExpr,
  PrApp,
  Output,
  Input,
  Fix,
};

struct SExpr {
  SExprKind kind;
  SourceSpan span;

  Ident var;                     // Var / Fn param / Ifz binder / Case left / Fix
  Ident var2;                    // Case right binder
  Nat num;                       // Num
  STypePtr type;                 // Fn (optional), Inl/Inr (sum), Fix
  Ident prio;                    // CmdExpr / PrApp
  std::vector<SDeclPtr> decls;   // Let
  SExprPtr e1, e2, e3;
  SCmdPtr cmd;                   // CmdExpr
};

enum class SInstrKind { Do, Sync, Spawn, Ret };

struct SInstr {
  SInstrKind kind;
  SourceSpan span;
  SExprPtr expr;     // Do / Sync / Ret
  Ident spawn_prio;  // Spawn
  SCmdPtr spawn_body;
};

// x <- i; ... ; ret e. A missing binder is plain sequencing.
struct SCmd {
  struct Step {
    std::optional<Ident> binder;
    SInstr instr;
  };
  std::vector<Step> steps;  // nonempty; last step is Ret with no binder
  SourceSpan span;
};

enum class SDeclKind { Val, Fun, PolyFun };

struct SPrioBinder {
  Ident var;
  // Conjuncts over priority names; empty means unconstrained (elaborates to
  // bot <= var).
  std::vector<std::pair<Ident, Ident>> constraint;
  SourceSpan span;
};

struct SDecl {
  SDeclKind kind;
  SourceSpan span;
  Ident name;
  std::vector<SPrioBinder> prio_binders;                // PolyFun
  std::vector<std::pair<Ident, STypePtr>> params;       // Fun/PolyFun
  STypePtr ret_type;                                    // Fun/PolyFun
  SExprPtr body;
};

enum class SToplevelKind { Priority, Order, Decl };

struct SToplevel {
  SToplevelKind kind;
  SourceSpan span;
  Ident name;       // Priority
  Ident lo, hi;     // Order
  SDeclPtr decl;    // Decl
};

struct SProgram {
  std::vector<SToplevel> toplevels;
  SCmdPtr main;
  SourceSpan main_span;
};

// Structural equality ignoring spans (binder names compared literally; the
// printer never renames, so this is what round-trip preservation means).
bool surface_equal(const SExprPtr &a, const SExprPtr &b);
bool surface_equal(const SCmdPtr &a, const SCmdPtr &b);
bool surface_equal(const SProgram &a, const SProgram &b);

// Emits parseable concrete syntax.
std::string print_program(const SProgram &p);
std::string print_expr(const SExprPtr &e);

// Every identifier occurring anywhere (seeds FreshNames).
void collect_idents(const SProgram &p, std::vector<Ident> &out);

}  // namespace priml
