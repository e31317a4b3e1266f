#include <fmt/core.h>

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gen.hpp"
#include "priml/parser.hpp"

using namespace priml;
using namespace priml::testgen;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const char *name) {
  return slurp(fmt::format("{}/{}", PRIML_CORPUS_DIR, name));
}

const std::vector<const char *> kCorpus = {
    "min_ret.priml",     "output7.priml",        "fig2_qsort.priml",
    "fig3a_loop.priml",  "fig3b_loop.priml",     "fig4_disp.priml",
    "fig4_disp_fixed.priml", "fig4_disp_ok.priml", "email.priml",
    "fib_server.priml",  "bank.priml",           "prelude.priml"};

}  // namespace

TEST_CASE("the quicksort figure parses to a polymorphic function") {
  SProgram p = parse(corpus("fig2_qsort.priml"));
  const SDeclPtr *qsort = nullptr;
  for (const auto &top : p.toplevels)
    if (top.kind == SToplevelKind::Decl && top.decl->name == intern("qsort"))
      qsort = &top.decl;
  REQUIRE(qsort != nullptr);
  CHECK((*qsort)->kind == SDeclKind::PolyFun);
  CHECK((*qsort)->prio_binders.size() == 1);
  CHECK((*qsort)->prio_binders[0].var == intern("p"));
  CHECK((*qsort)->prio_binders[0].constraint.empty());
  CHECK((*qsort)->params.size() == 2);
}

TEST_CASE("minimal program") {
  SProgram p = parse("main { ret () }");
  CHECK(p.toplevels.empty());
  REQUIRE(p.main->steps.size() == 1);
  CHECK(p.main->steps[0].instr.kind == SInstrKind::Ret);
  CHECK(p.main->steps[0].instr.expr->kind == SExprKind::Unit);
}

TEST_CASE("constraint lists and binder lists disambiguate") {
  SProgram p = parse(
      "fun[p : bot <= p, p <= bot, q, r : q <= r] f (x : nat) : nat = x\n"
      "main { ret () }");
  const SDeclPtr &d = p.toplevels[0].decl;
  REQUIRE(d->prio_binders.size() == 3);
  CHECK(d->prio_binders[0].constraint.size() == 2);
  CHECK(d->prio_binders[1].constraint.empty());
  CHECK(d->prio_binders[2].constraint.size() == 1);
}

TEST_CASE("types parse with the documented precedences") {
  SProgram p = parse(
      "fun f (x : nat * nat + unit -> nat thread[q] cmd[q]) : unit = ()\n"
      "main { ret () }");
  STypePtr t = p.toplevels[0].decl->params[0].second;
  // -> binds last
  REQUIRE(t->kind == TypeKind::Arrow);
  // lhs: nat * nat + unit parses as (nat * nat) + unit
  REQUIRE(t->a->kind == TypeKind::Sum);
  CHECK(t->a->a->kind == TypeKind::Prod);
  // rhs: postfix thread then cmd
  REQUIRE(t->b->kind == TypeKind::Cmd);
  CHECK(t->b->a->kind == TypeKind::Thread);
}

TEST_CASE("a trailing non-ret instruction desugars to it <- i; ret it") {
  SProgram p = parse("main { t <- spawn[bot] { do f }; ret () }");
  const SCmdPtr &body = p.main->steps[0].instr.spawn_body;
  REQUIRE(body->steps.size() == 2);
  CHECK(body->steps[0].binder == intern("it"));
  CHECK(body->steps[0].instr.kind == SInstrKind::Do);
  CHECK(body->steps[1].instr.kind == SInstrKind::Ret);
  CHECK(body->steps[1].instr.expr->var == intern("it"));
}

TEST_CASE("syntax errors carry spans inside the input") {
  const char *bad = "main { ret ( }";
  try {
    parse(bad);
    FAIL("expected a syntax error");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-PARSE");
    CHECK(e.diag.span.start_line == 1);
    CHECK(e.diag.span.start_col >= 1);
    CHECK(e.diag.span.end_col <= static_cast<int>(std::string(bad).size()));
    CHECK(e.diag.message.find("expected") != std::string::npos);
  }
}

TEST_CASE("nested comments lex away") {
  SProgram p = parse("(* outer (* inner *) still out *) main { ret 3 }");
  CHECK(p.main->steps[0].instr.expr->num == Nat(3));
  CHECK_THROWS_AS(parse("(* unterminated main { ret 3 }"), DiagnosticError);
}

TEST_CASE("round trip: corpus files") {
  for (const char *name : kCorpus) {
    CAPTURE(name);
    SProgram once = parse(corpus(name));
    std::string printed = print_program(once);
    SProgram twice = parse(printed);
    CHECK(surface_equal(once, twice));
    // idempotent normalization: printing again changes nothing
    CHECK(print_program(twice) == printed);
  }
}

TEST_CASE("round trip: 200 generated programs") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    SProgram generated = gen_program(seed);
    std::string text = print_program(generated);
    SProgram once = parse(text);
    std::string printed = print_program(once);
    SProgram twice = parse(printed);
    CHECK(surface_equal(once, twice));
    CHECK(print_program(twice) == printed);
  }
}
