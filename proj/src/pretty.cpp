#include "priml/pretty.hpp"

#include <fmt/core.h>

namespace priml {

std::string show(const Priority &p) { return str(p.name); }

std::string show(const Constraint &c) {
  std::string out;
  for (size_t i = 0; i < c.conjuncts.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("{} <= {}", show(c.conjuncts[i].first),
                       show(c.conjuncts[i].second));
  }
  return out;
}

namespace {

// Precedence: -> (1, right) < + (2) < * (3) < postfix thread/cmd (4).
std::string show_type(const TypePtr &t, int prec) {
  if (!t) return "?";
  auto wrap = [&](int mine, std::string s) {
    return mine < prec ? "(" + s + ")" : s;
  };
  switch (t->kind) {
    case TypeKind::Unit:
      return "unit";
    case TypeKind::Nat:
      return "nat";
    case TypeKind::Arrow:
      return wrap(1, fmt::format("{} -> {}", show_type(t->a, 2),
                                 show_type(t->b, 1)));
    case TypeKind::Sum:
      return wrap(2, fmt::format("{} + {}", show_type(t->a, 3),
                                 show_type(t->b, 2)));
    case TypeKind::Prod:
      return wrap(3, fmt::format("{} * {}", show_type(t->a, 4),
                                 show_type(t->b, 3)));
    case TypeKind::Thread:
      return fmt::format("{} thread[{}]", show_type(t->a, 4), show(t->prio));
    case TypeKind::Cmd:
      return fmt::format("{} cmd[{}]", show_type(t->a, 4), show(t->prio));
    case TypeKind::Forall:
      return wrap(1, fmt::format("forall {} : {} . {}", str(t->var),
                                 show(t->constraint), show_type(t->a, 1)));
  }
  return "?";
}

std::string show_expr(const ExprPtr &e);

std::string show_cmd(const CmdPtr &m) {
  if (!m) return "?";
  switch (m->kind) {
    case CmdKind::Bind:
      return fmt::format("{} <- {}; {}", str(m->var), show_expr(m->expr),
                         show_cmd(m->rest));
    case CmdKind::Spawn:
      return fmt::format("spawn[{}; {}] {{ {} }}", show(m->prio),
                         show_type(m->ret_type, 0), show_cmd(m->rest));
    case CmdKind::Sync:
      return fmt::format("sync {}", show_expr(m->expr));
    case CmdKind::Ret:
      return fmt::format("ret {}", show_expr(m->expr));
  }
  return "?";
}

std::string show_atom(const ExprPtr &e) {
  std::string s = show_expr(e);
  switch (e->kind) {
    case ExprKind::Var:
    case ExprKind::Unit:
    case ExprKind::Num:
    case ExprKind::Tid:
    case ExprKind::Input:
    case ExprKind::PairV:
    case ExprKind::EPair:
    case ExprKind::CmdVal:
      return s;
    default:
      return "(" + s + ")";
  }
}

std::string show_expr(const ExprPtr &e) {
  if (!e) return "?";
  switch (e->kind) {
    case ExprKind::Var:
      return str(e->var);
    case ExprKind::Unit:
      return "()";
    case ExprKind::Num:
      return e->num.str();
    case ExprKind::Fun:
      return fmt::format("fn ({} : {}) => {}", str(e->var),
                         show_type(e->type, 0), show_expr(e->e1));
    case ExprKind::PairV:
    case ExprKind::EPair:
      return fmt::format("({}, {})", show_expr(e->e1), show_expr(e->e2));
    case ExprKind::InlV:
    case ExprKind::EInl:
      return fmt::format("inl[{}] {}", show_type(e->type, 0),
                         show_atom(e->e1));
    case ExprKind::InrV:
    case ExprKind::EInr:
      return fmt::format("inr[{}] {}", show_type(e->type, 0),
                         show_atom(e->e1));
    case ExprKind::Tid:
      return fmt::format("tid {}", str(e->tid));
    case ExprKind::CmdVal:
      return fmt::format("cmd[{}] {{ {} }}", show(e->prio), show_cmd(e->cmd));
    case ExprKind::PrLam:
      return fmt::format("pfn[{} : {}] => {}", str(e->var),
                         show(e->constraint), show_expr(e->e1));
    case ExprKind::Let:
      return fmt::format("let val {} = {} in {} end", str(e->var),
                         show_expr(e->e1), show_expr(e->e2));
    case ExprKind::Ifz:
      return fmt::format("ifz {} {{ {} }} {{ {} . {} }}", show_expr(e->e1),
                         show_expr(e->e2), str(e->var), show_expr(e->e3));
    case ExprKind::App:
      return fmt::format("{} {}", show_atom(e->e1), show_atom(e->e2));
    case ExprKind::Fst:
      return fmt::format("fst {}", show_atom(e->e1));
    case ExprKind::Snd:
      return fmt::format("snd {}", show_atom(e->e1));
    case ExprKind::Case:
      return fmt::format("case {} {{ inl {} . {} | inr {} . {} }}",
                         show_expr(e->e1), str(e->var), show_expr(e->e2),
                         str(e->var2), show_expr(e->e3));
    case ExprKind::Output:
      return fmt::format("output {}", show_atom(e->e1));
    case ExprKind::Input:
      return "input";
    case ExprKind::PrApp:
      return fmt::format("[{}]{}", show(e->prio), show_atom(e->e1));
    case ExprKind::Fix:
      return fmt::format("fix {} : {} => {}", str(e->var),
                         show_type(e->type, 0), show_expr(e->e1));
  }
  return "?";
}

}  // namespace

std::string show(const TypePtr &t) { return show_type(t, 0); }
std::string show(const ExprPtr &e) { return show_expr(e); }
std::string show(const CmdPtr &m) { return show_cmd(m); }

}  // namespace priml
