#include <fmt/core.h>

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gen.hpp"
#include "priml/elaborate.hpp"
#include "priml/parser.hpp"
#include "priml/pretty.hpp"

using namespace priml;
using namespace priml::testgen;

namespace {

Ident id(const char *s) { return intern(s); }

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

ElabResult elab_text(const std::string &text) {
  return elab_program(parse(text));
}

// Elaboration correctness: the produced command typechecks at bot under the
// produced store.
void check_at_bot(const ElabResult &r) {
  TypeContext ctx;
  Signature sig;
  TypePtr t = type_cmd(r.store, sig, ctx, r.main, prio_bot());
  CHECK(type_equal(t, r.main_type));
}

}  // namespace

TEST_CASE("let becomes application of a lambda") {
  ElabResult r = elab_text("main { ret (let val x = 5 in x end) }");
  // main is just `ret ((fn x => x) 5)`
  REQUIRE(r.main->kind == CmdKind::Ret);
  ExprPtr e = r.main->expr;
  REQUIRE(e->kind == ExprKind::App);
  CHECK(alpha_equal(
      e, e_app(e_fun(id("x"), t_nat(), e_var(id("x"))), e_num(Nat(5)))));
  check_at_bot(r);
}

TEST_CASE("do desugars to bind-and-return") {
  ElabResult r =
      elab_text("main { x <- do (cmd[bot] { ret 3 }); ret x }");
  // outer: bind cmd[bot]{ bind cmd[bot]{ret 3} as r in ret r } as x in ret x
  REQUIRE(r.main->kind == CmdKind::Bind);
  const CmdPtr &inner = r.main->expr->cmd;
  REQUIRE(inner->kind == CmdKind::Bind);
  CHECK(inner->expr->kind == ExprKind::CmdVal);
  CHECK(inner->rest->kind == CmdKind::Ret);
  CHECK(inner->rest->expr->kind == ExprKind::Var);
  check_at_bot(r);
}

TEST_CASE("fun declarations become fixed points") {
  ElabResult r = elab_text(
      "fun double_out (x : nat) : unit = output x\n"
      "main { ret (double_out 7) }");
  REQUIRE(r.main->kind == CmdKind::Bind);
  ExprPtr bound = r.main->expr->cmd->expr;  // ret <fix ...>
  REQUIRE(bound->kind == ExprKind::Fix);
  CHECK(bound->var == id("double_out"));
  REQUIRE(bound->e1->kind == ExprKind::Fun);
  check_at_bot(r);
}

TEST_CASE("polymorphic declarations nest foralls outside arrows") {
  ElabResult r = elab_text(
      "priority hi\n"
      "fun[p, q : p <= q] pass (x : nat) : nat cmd[q] = cmd[q] { ret x }\n"
      "main { ret () }");
  REQUIRE(r.bindings.size() == 1);
  TypePtr t = r.bindings[0].second;
  REQUIRE(t->kind == TypeKind::Forall);
  // unconstrained first binder got bot <= p_1
  CHECK(t->constraint.conjuncts.size() == 1);
  CHECK(t->constraint.conjuncts[0].first == prio_bot());
  REQUIRE(t->a->kind == TypeKind::Forall);
  CHECK(t->a->a->kind == TypeKind::Arrow);
  check_at_bot(r);
}

TEST_CASE("priority binders are freshened with numeric suffixes") {
  ElabResult r = elab_text(
      "fun[p] f (x : nat) : nat cmd[p] = cmd[p] { ret x }\n"
      "fun[p] g (x : nat) : nat cmd[p] = cmd[p] { ret x }\n"
      "main { ret () }");
  CHECK(r.bindings[0].second->var == id("p_1"));
  CHECK(r.bindings[1].second->var == id("p_2"));
}

TEST_CASE("figure 4 yields the paper's diagnostic") {
  try {
    elab_text(corpus("fig4_disp.priml"));
    FAIL("expected rejection");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-PRIO-INV");
    CHECK(e.diag.message ==
          "constraint violated at 9.10-9.15: display_p <= p_1");
  }
}

TEST_CASE("constraint-fixed disp rejects the bad instantiation") {
  try {
    elab_text(corpus("fig4_disp_fixed.priml"));
    FAIL("expected rejection");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.message.find("display_p <= sort_p") != std::string::npos);
  }
}

TEST_CASE("figure 3a is a priority inversion; 3b elaborates") {
  try {
    elab_text(corpus("fig3a_loop.priml"));
    FAIL("expected rejection");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-PRIO-INV");
    CHECK(e.diag.message.find("loop_p <= sort_p") != std::string::npos);
  }
  check_at_bot(elab_text(corpus("fig3b_loop.priml")));
}

TEST_CASE("figure 2 and the rest of the corpus elaborate and typecheck") {
  for (const char *name :
       {"min_ret.priml", "output7.priml", "fig2_qsort.priml",
        "fig3b_loop.priml", "fig4_disp_ok.priml", "email.priml",
        "fib_server.priml", "bank.priml", "prelude.priml"}) {
    CAPTURE(name);
    check_at_bot(elab_text(corpus(name)));
  }
}

TEST_CASE("unbound priorities and variables are reported") {
  CHECK_THROWS_AS(elab_text("main { x <- do (cmd[nosuch] { ret 3 }); ret x }"),
                  DiagnosticError);
  CHECK_THROWS_AS(elab_text("main { ret missing }"), DiagnosticError);
  CHECK_THROWS_AS(elab_text("priority a\npriority a\nmain { ret () }"),
                  DiagnosticError);
  CHECK_THROWS_AS(
      elab_text("priority a\norder a < a\nmain { ret () }"), DiagnosticError);
}

TEST_CASE("priority and order toplevels are erased into the store") {
  ElabResult r = elab_text(
      "priority a\npriority b\norder a < b\nmain { ret () }");
  CHECK(r.store.declared(id("a")));
  CHECK(r.store.leq(id("a"), id("b")));
  // the elaborated command is just ret ()
  CHECK(alpha_equal(r.main, c_ret(e_unit())));
}

TEST_CASE("elaboration is deterministic") {
  std::string text = corpus("fig2_qsort.priml");
  ElabResult a = elab_text(text);
  ElabResult b = elab_text(text);
  CHECK(alpha_equal(a.main, b.main));
  CHECK(show(a.main) == show(b.main));  // structurally identical
}

TEST_CASE("recursive instantiation at a different priority is allowed") {
  // f calls itself instantiated at a constant priority distinct from its own
  ElabResult r = elab_text(
      "priority hi\n"
      "fun[p] f (x : nat) : nat cmd[p] =\n"
      "  ifz x { cmd[p] { ret 0 } }\n"
      "        { y . cmd[p] { t <- spawn[hi] { do ([hi]f y) };\n"
      "                       ret 1 } }\n"
      "main { ret () }");
  check_at_bot(r);
}

TEST_CASE("elaborated fuzz programs typecheck at bot") {
  int elaborated = 0;
  for (uint64_t seed = 1000; seed < 1200; ++seed) {
    SProgram p = gen_program(seed);
    try {
      ElabResult r = elab_program(p);
      check_at_bot(r);
      ++elaborated;
    } catch (const DiagnosticError &) {
      // ill-typed by construction noise; fine
    }
  }
  // the generator is biased toward typable programs
  CHECK(elaborated > 100);
}
