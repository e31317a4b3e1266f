#include "priml/parser.hpp"

#include <fmt/core.h>

#include <initializer_list>

#include "priml/lexer.hpp"

namespace priml {

namespace {

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token &peek(size_t off = 0) const {
    size_t i = pos + off;
    return i < toks.size() ? toks[i] : toks.back();
  }

  bool at(Tok k) const { return peek().kind == k; }

  Token take() {
    Token t = peek();
    if (pos + 1 < toks.size()) ++pos;
    return t;
  }

  [[noreturn]] void unexpected(std::initializer_list<Tok> expected) {
    const Token &t = peek();
    std::string exp;
    for (auto e : expected) {
      if (!exp.empty()) exp += ", ";
      exp += tok_name(e);
    }
    std::string found =
        t.kind == Tok::Eof ? "end of input" : fmt::format("'{}'", t.text);
    fail(errcode::Parse, t.span,
         fmt::format("syntax error at {}: expected {}, found {}",
                     t.span.render(), exp, found));
  }

  Token expect(Tok k) {
    if (!at(k)) unexpected({k});
    return take();
  }

  Ident ident() { return intern(expect(Tok::Ident).text); }

  // -------------------------------------------------------------------------
  // Types

  STypePtr type_atom() {
    const Token &t = peek();
    switch (t.kind) {
      case Tok::KwUnit:
        take();
        return st_base(TypeKind::Unit, t.span);
      case Tok::KwNat:
        take();
        return st_base(TypeKind::Nat, t.span);
      case Tok::LParen: {
        take();
        STypePtr inner = type();
        expect(Tok::RParen);
        return inner;
      }
      default:
        unexpected({Tok::KwUnit, Tok::KwNat, Tok::LParen});
    }
  }

  STypePtr type_postfix() {
    STypePtr t = type_atom();
    for (;;) {
      if (at(Tok::KwThread) || at(Tok::KwCmd)) {
        TypeKind k = at(Tok::KwThread) ? TypeKind::Thread : TypeKind::Cmd;
        Token kw = take();
        expect(Tok::LBracket);
        Ident p = ident();
        Token close = expect(Tok::RBracket);
        t = st_at(k, t, p, join_spans(t->span, close.span));
        (void)kw;
      } else {
        break;
      }
    }
    return t;
  }

  STypePtr type_prod() {
    STypePtr t = type_postfix();
    if (at(Tok::Star)) {
      take();
      STypePtr rhs = type_prod();
      return st_binop(TypeKind::Prod, t, rhs, join_spans(t->span, rhs->span));
    }
    return t;
  }

  STypePtr type_sum() {
    STypePtr t = type_prod();
    if (at(Tok::Plus)) {
      take();
      STypePtr rhs = type_sum();
      return st_binop(TypeKind::Sum, t, rhs, join_spans(t->span, rhs->span));
    }
    return t;
  }

  STypePtr type() {
    STypePtr t = type_sum();
    if (at(Tok::Arrow)) {
      take();
      STypePtr rhs = type();
      return st_binop(TypeKind::Arrow, t, rhs, join_spans(t->span, rhs->span));
    }
    return t;
  }

  // -------------------------------------------------------------------------
  // Expressions

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::LParen:
      case Tok::KwInput:
      case Tok::KwCmd:
        return true;
      default:
        return false;
    }
  }

  SExprPtr atom() {
    const Token &t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        take();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Var;
        e->var = intern(t.text);
        e->span = t.span;
        return e;
      }
      case Tok::Number: {
        take();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Num;
        e->num = t.num;
        e->span = t.span;
        return e;
      }
      case Tok::KwInput: {
        take();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Input;
        e->span = t.span;
        return e;
      }
      case Tok::KwCmd: {
        Token kw = take();
        expect(Tok::LBracket);
        Ident p = ident();
        expect(Tok::RBracket);
        expect(Tok::LBrace);
        SCmdPtr m = command();
        Token close = expect(Tok::RBrace);
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::CmdExpr;
        e->prio = p;
        e->cmd = m;
        e->span = join_spans(kw.span, close.span);
        return e;
      }
      case Tok::LParen: {
        Token open = take();
        if (at(Tok::RParen)) {
          Token close = take();
          auto e = std::make_shared<SExpr>();
          e->kind = SExprKind::Unit;
          e->span = join_spans(open.span, close.span);
          return e;
        }
        SExprPtr first = expr();
        if (at(Tok::Comma)) {
          take();
          SExprPtr second = expr();
          Token close = expect(Tok::RParen);
          auto e = std::make_shared<SExpr>();
          e->kind = SExprKind::Pair;
          e->e1 = first;
          e->e2 = second;
          e->span = join_spans(open.span, close.span);
          return e;
        }
        expect(Tok::RParen);
        return first;
      }
      default:
        unexpected({Tok::Ident, Tok::Number, Tok::LParen, Tok::KwInput,
                    Tok::KwCmd});
    }
  }

  // Prefix operators that start an application head.
  SExprPtr app_head() {
    const Token &t = peek();
    switch (t.kind) {
      case Tok::KwFst:
      case Tok::KwSnd:
      case Tok::KwOutput: {
        Token kw = take();
        SExprPtr arg = atom();
        auto e = std::make_shared<SExpr>();
        e->kind = kw.kind == Tok::KwFst   ? SExprKind::Fst
                  : kw.kind == Tok::KwSnd ? SExprKind::Snd
                                          : SExprKind::Output;
        e->e1 = arg;
        e->span = join_spans(kw.span, arg->span);
        return e;
      }
      case Tok::KwInl:
      case Tok::KwInr: {
        Token kw = take();
        expect(Tok::LBracket);
        STypePtr st = type();
        expect(Tok::RBracket);
        SExprPtr arg = atom();
        auto e = std::make_shared<SExpr>();
        e->kind = kw.kind == Tok::KwInl ? SExprKind::Inl : SExprKind::Inr;
        e->type = st;
        e->e1 = arg;
        e->span = join_spans(kw.span, arg->span);
        return e;
      }
      case Tok::LBracket: {
        Token open = take();
        Ident p = ident();
        expect(Tok::RBracket);
        SExprPtr arg = atom();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::PrApp;
        e->prio = p;
        e->e1 = arg;
        e->span = join_spans(open.span, arg->span);
        return e;
      }
      default:
        return atom();
    }
  }

  SExprPtr app_expr() {
    SExprPtr head = app_head();
    while (starts_atom()) {
      SExprPtr arg = atom();
      auto e = std::make_shared<SExpr>();
      e->kind = SExprKind::App;
      e->e1 = head;
      e->e2 = arg;
      e->span = join_spans(head->span, arg->span);
      head = e;
    }
    return head;
  }

  SExprPtr expr() {
    const Token &t = peek();
    switch (t.kind) {
      case Tok::KwFn: {
        Token kw = take();
        Ident x;
        STypePtr ann;
        if (at(Tok::LParen)) {
          take();
          x = ident();
          expect(Tok::Colon);
          ann = type();
          expect(Tok::RParen);
        } else {
          x = ident();
        }
        expect(Tok::DArrow);
        SExprPtr body = expr();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Fn;
        e->var = x;
        e->type = ann;
        e->e1 = body;
        e->span = join_spans(kw.span, body->span);
        return e;
      }
      case Tok::KwFix: {
        Token kw = take();
        Ident x = ident();
        expect(Tok::Colon);
        STypePtr ann = type();
        expect(Tok::DArrow);
        SExprPtr body = expr();
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Fix;
        e->var = x;
        e->type = ann;
        e->e1 = body;
        e->span = join_spans(kw.span, body->span);
        return e;
      }
      case Tok::KwLet: {
        Token kw = take();
        std::vector<SDeclPtr> decls;
        while (at(Tok::KwVal) || at(Tok::KwFun)) decls.push_back(decl());
        if (decls.empty()) unexpected({Tok::KwVal, Tok::KwFun});
        expect(Tok::KwIn);
        SExprPtr body = expr();
        Token close = expect(Tok::KwEnd);
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Let;
        e->decls = std::move(decls);
        e->e1 = body;
        e->span = join_spans(kw.span, close.span);
        return e;
      }
      case Tok::KwCase: {
        Token kw = take();
        SExprPtr scrut = expr();
        expect(Tok::LBrace);
        expect(Tok::KwInl);
        Ident x = ident();
        expect(Tok::Dot);
        SExprPtr l = expr();
        expect(Tok::Bar);
        expect(Tok::KwInr);
        Ident y = ident();
        expect(Tok::Dot);
        SExprPtr r = expr();
        Token close = expect(Tok::RBrace);
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Case;
        e->e1 = scrut;
        e->var = x;
        e->e2 = l;
        e->var2 = y;
        e->e3 = r;
        e->span = join_spans(kw.span, close.span);
        return e;
      }
      case Tok::KwIfz: {
        Token kw = take();
        SExprPtr scrut = expr();
        expect(Tok::LBrace);
        SExprPtr z = expr();
        expect(Tok::RBrace);
        expect(Tok::LBrace);
        Ident x = ident();
        expect(Tok::Dot);
        SExprPtr nz = expr();
        Token close = expect(Tok::RBrace);
        auto e = std::make_shared<SExpr>();
        e->kind = SExprKind::Ifz;
        e->e1 = scrut;
        e->e2 = z;
        e->var = x;
        e->e3 = nz;
        e->span = join_spans(kw.span, close.span);
        return e;
      }
      default:
        return app_expr();
    }
  }

  // -------------------------------------------------------------------------
  // Commands and instructions

  SInstr instr() {
    const Token &t = peek();
    SInstr out;
    switch (t.kind) {
      case Tok::KwDo: {
        Token kw = take();
        out.kind = SInstrKind::Do;
        out.expr = expr();
        out.span = join_spans(kw.span, out.expr->span);
        return out;
      }
      case Tok::KwSync: {
        Token kw = take();
        out.kind = SInstrKind::Sync;
        out.expr = expr();
        out.span = join_spans(kw.span, out.expr->span);
        return out;
      }
      case Tok::KwSpawn: {
        Token kw = take();
        expect(Tok::LBracket);
        out.spawn_prio = ident();
        expect(Tok::RBracket);
        expect(Tok::LBrace);
        out.spawn_body = command();
        Token close = expect(Tok::RBrace);
        out.kind = SInstrKind::Spawn;
        out.span = join_spans(kw.span, close.span);
        return out;
      }
      case Tok::KwRet: {
        Token kw = take();
        out.kind = SInstrKind::Ret;
        out.expr = expr();
        out.span = join_spans(kw.span, out.expr->span);
        return out;
      }
      default:
        unexpected({Tok::KwDo, Tok::KwSync, Tok::KwSpawn, Tok::KwRet});
    }
  }

  SCmdPtr command() {
    auto m = std::make_shared<SCmd>();
    for (;;) {
      SCmd::Step step;
      if (at(Tok::Ident) && peek(1).kind == Tok::BindArr) {
        step.binder = ident();
        expect(Tok::BindArr);
      }
      step.instr = instr();
      bool is_ret = step.instr.kind == SInstrKind::Ret;
      m->steps.push_back(std::move(step));
      if (at(Tok::Semi)) {
        take();
        continue;
      }
      // A trailing non-ret instruction desugars so that every command ends
      // in exactly one ret: `i` becomes `it <- i; ret it`.
      if (!is_ret || m->steps.back().binder.has_value()) {
        SCmd::Step &final = m->steps.back();
        if (!final.binder) final.binder = intern("it");
        SCmd::Step ret_step;
        ret_step.instr.kind = SInstrKind::Ret;
        auto var = std::make_shared<SExpr>();
        var->kind = SExprKind::Var;
        var->var = *final.binder;
        var->span = final.instr.span;
        ret_step.instr.expr = var;
        ret_step.instr.span = final.instr.span;
        m->steps.push_back(std::move(ret_step));
      }
      break;
    }
    m->span = join_spans(m->steps.front().instr.span,
                         m->steps.back().instr.span);
    return m;
  }

  // -------------------------------------------------------------------------
  // Declarations and programs

  SDeclPtr decl() {
    const Token &t = peek();
    if (t.kind == Tok::KwVal) {
      Token kw = take();
      auto d = std::make_shared<SDecl>();
      d->kind = SDeclKind::Val;
      d->name = ident();
      expect(Tok::Eq);
      d->body = expr();
      d->span = join_spans(kw.span, d->body->span);
      return d;
    }
    if (t.kind == Tok::KwFun) {
      Token kw = take();
      auto d = std::make_shared<SDecl>();
      d->kind = SDeclKind::Fun;
      if (at(Tok::LBracket)) {
        d->kind = SDeclKind::PolyFun;
        take();
        for (;;) {
          SPrioBinder b;
          Token v = expect(Tok::Ident);
          b.var = intern(v.text);
          b.span = v.span;
          if (at(Tok::Colon)) {
            take();
            for (;;) {
              Ident lo = ident();
              expect(Tok::Le);
              Ident hi = ident();
              b.constraint.emplace_back(lo, hi);
              // A comma continues the conjunct list only when followed by
              // another `id <=` pair; otherwise it starts the next binder.
              if (at(Tok::Comma) && peek(1).kind == Tok::Ident &&
                  peek(2).kind == Tok::Le) {
                take();
                continue;
              }
              break;
            }
          }
          d->prio_binders.push_back(std::move(b));
          if (at(Tok::Comma)) {
            take();
            continue;
          }
          break;
        }
        expect(Tok::RBracket);
      }
      d->name = ident();
      while (at(Tok::LParen)) {
        take();
        Ident x = ident();
        expect(Tok::Colon);
        STypePtr ty = type();
        expect(Tok::RParen);
        d->params.emplace_back(x, ty);
      }
      expect(Tok::Colon);
      d->ret_type = type();
      expect(Tok::Eq);
      d->body = expr();
      d->span = join_spans(kw.span, d->body->span);
      return d;
    }
    unexpected({Tok::KwVal, Tok::KwFun});
  }

  SProgram program() {
    SProgram p;
    for (;;) {
      const Token &t = peek();
      if (t.kind == Tok::KwPriority) {
        Token kw = take();
        SToplevel top;
        top.kind = SToplevelKind::Priority;
        top.name = ident();
        top.span = kw.span;
        p.toplevels.push_back(std::move(top));
      } else if (t.kind == Tok::KwOrder) {
        Token kw = take();
        SToplevel top;
        top.kind = SToplevelKind::Order;
        top.lo = ident();
        expect(Tok::Lt);
        top.hi = ident();
        top.span = kw.span;
        p.toplevels.push_back(std::move(top));
      } else if (t.kind == Tok::KwVal || t.kind == Tok::KwFun) {
        SToplevel top;
        top.kind = SToplevelKind::Decl;
        top.decl = decl();
        top.span = top.decl->span;
        p.toplevels.push_back(std::move(top));
      } else {
        break;
      }
    }
    Token kw = expect(Tok::KwMain);
    expect(Tok::LBrace);
    p.main = command();
    Token close = expect(Tok::RBrace);
    p.main_span = join_spans(kw.span, close.span);
    expect(Tok::Eof);
    return p;
  }
};

}  // namespace

SProgram parse(std::string_view source) {
  Parser p{lex(source)};
  return p.program();
}

SExprPtr parse_expr_fragment(std::string_view source) {
  Parser p{lex(source)};
  SExprPtr e = p.expr();
  p.expect(Tok::Eof);
  return e;
}

}  // namespace priml
