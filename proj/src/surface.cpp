#include "priml/surface.hpp"

#include <fmt/core.h>

namespace priml {

STypePtr st_base(TypeKind k, SourceSpan sp) {
  auto t = std::make_shared<SType>();
  t->kind = k;
  t->span = sp;
  return t;
}

STypePtr st_binop(TypeKind k, STypePtr a, STypePtr b, SourceSpan sp) {
  auto t = std::make_shared<SType>();
  t->kind = k;
  t->a = std::move(a);
  t->b = std::move(b);
  t->span = sp;
  return t;
}

STypePtr st_at(TypeKind k, STypePtr payload, Ident prio, SourceSpan sp) {
  auto t = std::make_shared<SType>();
  t->kind = k;
  t->a = std::move(payload);
  t->prio = prio;
  t->span = sp;
  return t;
}

// ---------------------------------------------------------------------------
// Structural equality (ignores spans)

namespace {

bool st_equal(const STypePtr &a, const STypePtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Nat:
      return true;
    case TypeKind::Arrow:
    case TypeKind::Prod:
    case TypeKind::Sum:
      return st_equal(a->a, b->a) && st_equal(a->b, b->b);
    case TypeKind::Thread:
    case TypeKind::Cmd:
      return a->prio == b->prio && st_equal(a->a, b->a);
    default:
      return false;
  }
}

bool decl_equal(const SDeclPtr &a, const SDeclPtr &b);

bool cmd_equal(const SCmdPtr &a, const SCmdPtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->steps.size() != b->steps.size()) return false;
  for (size_t i = 0; i < a->steps.size(); ++i) {
    const auto &x = a->steps[i];
    const auto &y = b->steps[i];
    if (x.binder != y.binder) return false;
    if (x.instr.kind != y.instr.kind) return false;
    if (!surface_equal(x.instr.expr, y.instr.expr)) return false;
    if (x.instr.kind == SInstrKind::Spawn) {
      if (x.instr.spawn_prio != y.instr.spawn_prio) return false;
      if (!cmd_equal(x.instr.spawn_body, y.instr.spawn_body)) return false;
    }
  }
  return true;
}

bool decl_equal(const SDeclPtr &a, const SDeclPtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->prio_binders.size() != b->prio_binders.size()) return false;
  for (size_t i = 0; i < a->prio_binders.size(); ++i) {
    if (a->prio_binders[i].var != b->prio_binders[i].var) return false;
    if (a->prio_binders[i].constraint != b->prio_binders[i].constraint)
      return false;
  }
  if (a->params.size() != b->params.size()) return false;
  for (size_t i = 0; i < a->params.size(); ++i) {
    if (a->params[i].first != b->params[i].first) return false;
    if (!st_equal(a->params[i].second, b->params[i].second)) return false;
  }
  if (!st_equal(a->ret_type, b->ret_type)) return false;
  return surface_equal(a->body, b->body);
}

}  // namespace

bool surface_equal(const SExprPtr &a, const SExprPtr &b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SExprKind::Var:
      return a->var == b->var;
    case SExprKind::Unit:
    case SExprKind::Input:
      return true;
    case SExprKind::Num:
      return a->num == b->num;
    case SExprKind::Fn:
      return a->var == b->var && st_equal(a->type, b->type) &&
             surface_equal(a->e1, b->e1);
    case SExprKind::Fix:
      return a->var == b->var && st_equal(a->type, b->type) &&
             surface_equal(a->e1, b->e1);
    case SExprKind::App:
    case SExprKind::Pair:
      return surface_equal(a->e1, b->e1) && surface_equal(a->e2, b->e2);
    case SExprKind::Fst:
    case SExprKind::Snd:
    case SExprKind::Output:
      return surface_equal(a->e1, b->e1);
    case SExprKind::Inl:
    case SExprKind::Inr:
      return st_equal(a->type, b->type) && surface_equal(a->e1, b->e1);
    case SExprKind::Case:
      return a->var == b->var && a->var2 == b->var2 &&
             surface_equal(a->e1, b->e1) && surface_equal(a->e2, b->e2) &&
             surface_equal(a->e3, b->e3);
    case SExprKind::Ifz:
      return a->var == b->var && surface_equal(a->e1, b->e1) &&
             surface_equal(a->e2, b->e2) && surface_equal(a->e3, b->e3);
    case SExprKind::Let: {
      if (a->decls.size() != b->decls.size()) return false;
      for (size_t i = 0; i < a->decls.size(); ++i)
        if (!decl_equal(a->decls[i], b->decls[i])) return false;
      return surface_equal(a->e1, b->e1);
    }
    case SExprKind::CmdExpr:
      return a->prio == b->prio && cmd_equal(a->cmd, b->cmd);
    case SExprKind::PrApp:
      return a->prio == b->prio && surface_equal(a->e1, b->e1);
  }
  return false;
}

bool surface_equal(const SCmdPtr &a, const SCmdPtr &b) {
  return cmd_equal(a, b);
}

bool surface_equal(const SProgram &a, const SProgram &b) {
  if (a.toplevels.size() != b.toplevels.size()) return false;
  for (size_t i = 0; i < a.toplevels.size(); ++i) {
    const auto &x = a.toplevels[i];
    const auto &y = b.toplevels[i];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
      case SToplevelKind::Priority:
        if (x.name != y.name) return false;
        break;
      case SToplevelKind::Order:
        if (x.lo != y.lo || x.hi != y.hi) return false;
        break;
      case SToplevelKind::Decl:
        if (!decl_equal(x.decl, y.decl)) return false;
        break;
    }
  }
  return cmd_equal(a.main, b.main);
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string print_stype(const STypePtr &t, int prec) {
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
      return wrap(1, fmt::format("{} -> {}", print_stype(t->a, 2),
                                 print_stype(t->b, 1)));
    case TypeKind::Sum:
      return wrap(2, fmt::format("{} + {}", print_stype(t->a, 3),
                                 print_stype(t->b, 2)));
    case TypeKind::Prod:
      return wrap(3, fmt::format("{} * {}", print_stype(t->a, 4),
                                 print_stype(t->b, 3)));
    case TypeKind::Thread:
      return fmt::format("{} thread[{}]", print_stype(t->a, 4), str(t->prio));
    case TypeKind::Cmd:
      return fmt::format("{} cmd[{}]", print_stype(t->a, 4), str(t->prio));
    default:
      return "?";
  }
}

std::string print_cmd(const SCmdPtr &m);
std::string print_atom(const SExprPtr &e);

std::string print_decl(const SDeclPtr &d) {
  switch (d->kind) {
    case SDeclKind::Val:
      return fmt::format("val {} = {}", str(d->name), print_expr(d->body));
    case SDeclKind::Fun:
    case SDeclKind::PolyFun: {
      std::string out = "fun";
      if (d->kind == SDeclKind::PolyFun) {
        out += "[";
        for (size_t i = 0; i < d->prio_binders.size(); ++i) {
          if (i) out += ", ";
          out += str(d->prio_binders[i].var);
          const auto &cs = d->prio_binders[i].constraint;
          for (size_t j = 0; j < cs.size(); ++j) {
            out += j == 0 ? " : " : ", ";
            out += fmt::format("{} <= {}", str(cs[j].first), str(cs[j].second));
          }
        }
        out += "]";
      }
      out += " " + str(d->name);
      for (const auto &[x, t] : d->params)
        out += fmt::format(" ({} : {})", str(x), print_stype(t, 0));
      out += fmt::format(" : {} = {}", print_stype(d->ret_type, 0),
                         print_expr(d->body));
      return out;
    }
  }
  return "?";
}

std::string print_app(const SExprPtr &e) {
  switch (e->kind) {
    case SExprKind::App:
      return fmt::format("{} {}", print_app(e->e1), print_atom(e->e2));
    case SExprKind::Fst:
      return "fst " + print_atom(e->e1);
    case SExprKind::Snd:
      return "snd " + print_atom(e->e1);
    case SExprKind::Output:
      return "output " + print_atom(e->e1);
    case SExprKind::Inl:
      return fmt::format("inl[{}] {}", print_stype(e->type, 0),
                         print_atom(e->e1));
    case SExprKind::Inr:
      return fmt::format("inr[{}] {}", print_stype(e->type, 0),
                         print_atom(e->e1));
    case SExprKind::PrApp:
      return fmt::format("[{}]{}", str(e->prio), print_atom(e->e1));
    default:
      return print_atom(e);
  }
}

std::string print_atom(const SExprPtr &e) {
  switch (e->kind) {
    case SExprKind::Var:
      return str(e->var);
    case SExprKind::Unit:
      return "()";
    case SExprKind::Num:
      return e->num.str();
    case SExprKind::Input:
      return "input";
    case SExprKind::Pair:
      return fmt::format("({}, {})", print_expr(e->e1), print_expr(e->e2));
    case SExprKind::CmdExpr:
      return fmt::format("cmd[{}] {{ {} }}", str(e->prio), print_cmd(e->cmd));
    default:
      return "(" + print_expr(e) + ")";
  }
}

std::string print_cmd(const SCmdPtr &m) {
  std::string out;
  for (size_t i = 0; i < m->steps.size(); ++i) {
    if (i) out += "; ";
    const auto &s = m->steps[i];
    if (s.binder) out += str(*s.binder) + " <- ";
    switch (s.instr.kind) {
      case SInstrKind::Do:
        out += "do " + print_atom(s.instr.expr);
        break;
      case SInstrKind::Sync:
        out += "sync " + print_expr(s.instr.expr);
        break;
      case SInstrKind::Spawn:
        out += fmt::format("spawn[{}] {{ {} }}", str(s.instr.spawn_prio),
                           print_cmd(s.instr.spawn_body));
        break;
      case SInstrKind::Ret:
        out += "ret " + print_expr(s.instr.expr);
        break;
    }
  }
  return out;
}

}  // namespace

std::string print_expr(const SExprPtr &e) {
  switch (e->kind) {
    case SExprKind::Fn:
      if (e->type)
        return fmt::format("fn ({} : {}) => {}", str(e->var),
                           print_stype(e->type, 0), print_expr(e->e1));
      return fmt::format("fn {} => {}", str(e->var), print_expr(e->e1));
    case SExprKind::Fix:
      return fmt::format("fix {} : {} => {}", str(e->var),
                         print_stype(e->type, 0), print_expr(e->e1));
    case SExprKind::Let: {
      std::string out = "let";
      for (const auto &d : e->decls) out += " " + print_decl(d);
      out += fmt::format(" in {} end", print_expr(e->e1));
      return out;
    }
    case SExprKind::Case:
      return fmt::format("case {} {{ inl {} . {} | inr {} . {} }}",
                         print_expr(e->e1), str(e->var), print_expr(e->e2),
                         str(e->var2), print_expr(e->e3));
    case SExprKind::Ifz:
      return fmt::format("ifz {} {{ {} }} {{ {} . {} }}", print_expr(e->e1),
                         print_expr(e->e2), str(e->var), print_expr(e->e3));
    default:
      return print_app(e);
  }
}

std::string print_program(const SProgram &p) {
  std::string out;
  for (const auto &t : p.toplevels) {
    switch (t.kind) {
      case SToplevelKind::Priority:
        out += fmt::format("priority {}\n", str(t.name));
        break;
      case SToplevelKind::Order:
        out += fmt::format("order {} < {}\n", str(t.lo), str(t.hi));
        break;
      case SToplevelKind::Decl:
        out += print_decl(t.decl) + "\n";
        break;
    }
  }
  out += fmt::format("main {{ {} }}\n", print_cmd(p.main));
  return out;
}

// ---------------------------------------------------------------------------
// Identifier collection

namespace {

void idents_type(const STypePtr &t, std::vector<Ident> &out) {
  if (!t) return;
  if (t->kind == TypeKind::Thread || t->kind == TypeKind::Cmd)
    out.push_back(t->prio);
  idents_type(t->a, out);
  idents_type(t->b, out);
}

void idents_expr(const SExprPtr &e, std::vector<Ident> &out);
void idents_cmd(const SCmdPtr &m, std::vector<Ident> &out);

void idents_decl(const SDeclPtr &d, std::vector<Ident> &out) {
  out.push_back(d->name);
  for (const auto &b : d->prio_binders) {
    out.push_back(b.var);
    for (const auto &[l, r] : b.constraint) {
      out.push_back(l);
      out.push_back(r);
    }
  }
  for (const auto &[x, t] : d->params) {
    out.push_back(x);
    idents_type(t, out);
  }
  idents_type(d->ret_type, out);
  idents_expr(d->body, out);
}

void idents_expr(const SExprPtr &e, std::vector<Ident> &out) {
  if (!e) return;
  if (e->kind == SExprKind::Var || e->kind == SExprKind::Fn ||
      e->kind == SExprKind::Fix || e->kind == SExprKind::Ifz ||
      e->kind == SExprKind::Case)
    out.push_back(e->var);
  if (e->kind == SExprKind::Case) out.push_back(e->var2);
  if (e->kind == SExprKind::CmdExpr || e->kind == SExprKind::PrApp)
    out.push_back(e->prio);
  idents_type(e->type, out);
  for (const auto &d : e->decls) idents_decl(d, out);
  idents_expr(e->e1, out);
  idents_expr(e->e2, out);
  idents_expr(e->e3, out);
  if (e->cmd) idents_cmd(e->cmd, out);
}

void idents_cmd(const SCmdPtr &m, std::vector<Ident> &out) {
  if (!m) return;
  for (const auto &s : m->steps) {
    if (s.binder) out.push_back(*s.binder);
    if (s.instr.expr) idents_expr(s.instr.expr, out);
    if (s.instr.kind == SInstrKind::Spawn) {
      out.push_back(s.instr.spawn_prio);
      idents_cmd(s.instr.spawn_body, out);
    }
  }
}

}  // namespace

void collect_idents(const SProgram &p, std::vector<Ident> &out) {
  for (const auto &t : p.toplevels) {
    switch (t.kind) {
      case SToplevelKind::Priority:
        out.push_back(t.name);
        break;
      case SToplevelKind::Order:
        out.push_back(t.lo);
        out.push_back(t.hi);
        break;
      case SToplevelKind::Decl:
        idents_decl(t.decl, out);
        break;
    }
  }
  idents_cmd(p.main, out);
}

}  // namespace priml
