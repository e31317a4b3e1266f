#include <fmt/core.h>

#include <functional>

#include "doctest.h"
#include "gen.hpp"
#include "priml/ast.hpp"
#include "priml/eval.hpp"
#include "priml/pretty.hpp"
#include "priml/typecheck.hpp"

using namespace priml;
using namespace priml::testgen;

namespace {

Ident id(const char *s) { return intern(s); }

// Substitution-based evaluation of a closed pure expression.
ExprPtr subst_eval(ExprPtr e) {
  Signature sig;
  std::deque<Nat> ins;
  std::vector<Nat> outs;
  StepIo io{&ins, &outs};
  int fuel = 200000;
  while (!is_value(e)) {
    e = step_expr(sig, io, e);
    REQUIRE(--fuel > 0);
  }
  return e;
}

}  // namespace

TEST_CASE("substitution hits a free variable") {
  CmdPtr target = c_ret(e_var(id("x")));
  CmdPtr got = subst_expr(e_num(Nat(5)), id("x"), target);
  CHECK(alpha_equal(got, c_ret(e_num(Nat(5)))));
}

TEST_CASE("substitution renames a capturing binder") {
  // subst(v, x, fn y => x) with y free in v
  ExprPtr v = e_var(id("y"));
  ExprPtr target = e_fun(id("y"), t_nat(), e_var(id("x")));
  ExprPtr got = subst_expr(v, id("x"), target);
  // result must be alpha-equal to fn z => y with z fresh
  CHECK(alpha_equal(got, e_fun(id("z"), t_nat(), e_var(id("y")))));
  // and must not have captured: the body is the free y
  CHECK(got->kind == ExprKind::Fun);
  CHECK(got->var != id("y"));
  CHECK(got->e1->var == id("y"));
}

TEST_CASE("substitution distributes into ifz") {
  ExprPtr target = e_ifz(e_var(id("x")), e_num(Nat(1)), id("y"),
                         e_var(id("y")));
  ExprPtr got = subst_expr(e_unit(), id("x"), target);
  CHECK(got->e1->kind == ExprKind::Unit);
  CHECK(got->e3->kind == ExprKind::Var);  // y untouched (bound)
}

TEST_CASE("shadowed binders stop substitution") {
  ExprPtr target = e_let(id("x"), e_num(Nat(1)), e_var(id("x")));
  ExprPtr got = subst_expr(e_num(Nat(9)), id("x"), target);
  CHECK(alpha_equal(got, target));
}

TEST_CASE("substitution agrees with an environment evaluator") {
  int ran = 0;
  for (uint64_t seed = 0; ran < 50; ++seed) {
    ExprPtr e = gen_pure_expr(seed, 4);
    ExprPtr via_subst = subst_eval(e);
    ExprPtr via_env = env_eval(e);
    CAPTURE(show(e));
    CHECK(alpha_equal(via_subst, via_env));
    ++ran;
  }
}

TEST_CASE("priority substitution rewrites annotations") {
  TypePtr t = t_cmd(t_nat(), prio_var(id("pi")));
  TypePtr got = subst_prio(prio_const(id("alert")), id("pi"), t);
  CHECK(type_equal(got, t_cmd(t_nat(), prio_const(id("alert")))));
}

TEST_CASE("priority substitution respects Forall shadowing") {
  Constraint c;
  c.conjuncts.emplace_back(prio_var(id("pi")), prio_const(id("top")));
  TypePtr t = t_forall(id("pi"), c, t_cmd(t_nat(), prio_var(id("pi"))));
  TypePtr got = subst_prio(prio_const(id("alert")), id("pi"), t);
  CHECK(type_equal(got, t));
}

TEST_CASE("priority substitution avoids capture in Forall") {
  // [q/pi] (forall q : pi <= q . nat cmd[q]) must rename the binder q
  Constraint c;
  c.conjuncts.emplace_back(prio_var(id("pi")), prio_var(id("q")));
  TypePtr t = t_forall(id("q"), c, t_cmd(t_nat(), prio_var(id("q"))));
  TypePtr got = subst_prio(prio_var(id("q")), id("pi"), t);
  REQUIRE(got->kind == TypeKind::Forall);
  CHECK(got->var != id("q"));
  CHECK(got->constraint.conjuncts[0].first == prio_var(id("q")));
  CHECK(got->constraint.conjuncts[0].second == prio_var(got->var));
}

TEST_CASE("value predicate and value_check") {
  Signature empty;
  CHECK(value_check(e_unit(), empty));
  CHECK_FALSE(value_check(e_tid(id("a")), empty));

  Signature sig;
  sig.add(id("a"), t_nat(), prio_bot());
  CHECK(value_check(e_pair_v(e_num(Nat(5)), e_tid(id("a"))), sig));

  // the pair source form is not a value
  CHECK_FALSE(is_value(e_pair(e_num(Nat(1)), e_num(Nat(2)))));
  CHECK(is_value(e_pair_v(e_num(Nat(1)), e_num(Nat(2)))));

  // thread names hide under cmd bodies too
  CmdPtr m = c_ret(e_tid(id("b")));
  CHECK_FALSE(value_check(e_cmd(prio_bot(), m), sig));
}

TEST_CASE("value grammar on small terms matches a recursive oracle") {
  // enumerate depth <= 3 terms via the generator and compare against a
  // direct recursive-descent check
  std::function<bool(const ExprPtr &)> oracle = [&](const ExprPtr &e) {
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
        return oracle(e->e1) && oracle(e->e2);
      case ExprKind::InlV:
      case ExprKind::InrV:
        return oracle(e->e1);
      default:
        return false;
    }
  };
  for (uint64_t seed = 0; seed < 300; ++seed) {
    ExprPtr e = gen_pure_expr(seed, 3);
    CHECK(is_value(e) == oracle(e));
    ExprPtr v = subst_eval(e);
    CHECK(is_value(v) == oracle(v));
  }
}

TEST_CASE("value_check is monotone in the signature") {
  Signature small, big;
  small.add(id("a"), t_nat(), prio_bot());
  big.add(id("a"), t_nat(), prio_bot());
  big.add(id("b"), t_unit(), prio_bot());
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    ExprPtr v = gen_core_value(rng, t_prod(t_nat(), t_sum(t_nat(), t_unit())));
    if (value_check(v, small)) CHECK(value_check(v, big));
  }
  ExprPtr witht = e_pair_v(e_tid(id("a")), e_num(Nat(0)));
  CHECK(value_check(witht, small));
  CHECK(value_check(witht, big));
}

TEST_CASE("alpha equivalence is an equivalence relation") {
  std::vector<ExprPtr> terms;
  for (uint64_t seed = 0; seed < 40; ++seed)
    terms.push_back(gen_pure_expr(seed, 3));
  for (const auto &e : terms) CHECK(alpha_equal(e, e));
  for (size_t i = 0; i < terms.size(); ++i)
    for (size_t j = 0; j < terms.size(); ++j) {
      bool ij = alpha_equal(terms[i], terms[j]);
      bool ji = alpha_equal(terms[j], terms[i]);
      CHECK(ij == ji);
    }
}

TEST_CASE("renaming a binder preserves alpha equivalence") {
  ExprPtr a = e_fun(id("x"), t_nat(), e_var(id("x")));
  ExprPtr b = e_fun(id("w"), t_nat(), e_var(id("w")));
  ExprPtr c = e_fun(id("x"), t_nat(), e_var(id("free")));
  CHECK(alpha_equal(a, b));
  CHECK_FALSE(alpha_equal(a, c));
}

TEST_CASE("substitution respects alpha equivalence") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    TypePtr t = t_nat();
    ExprPtr body = gen_core_expr(rng, t_nat(), {{id("x"), t}}, 3);
    // two alpha-variants of fn x => body
    ExprPtr f1 = e_fun(id("x"), t, body);
    ExprPtr f2 = subst_expr(e_var(id("xx")), id("x"), body);
    ExprPtr f2fun = e_fun(id("xx"), t, f2);
    REQUIRE(alpha_equal(f1, f2fun));
    ExprPtr v = gen_core_value(rng, t);
    CHECK(alpha_equal(subst_expr(v, id("zz"), f1), subst_expr(v, id("zz"), f2fun)));
  }
}

TEST_CASE("substitutions with disjoint variables commute") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    std::vector<std::pair<Ident, TypePtr>> vars = {{id("x"), t_nat()},
                                                   {id("y"), t_unit()}};
    ExprPtr e = gen_core_expr(rng, t_nat(), vars, 3);
    ExprPtr vx = gen_core_value(rng, t_nat());
    ExprPtr vy = gen_core_value(rng, t_unit());
    // vx, vy closed, so the two orders agree
    ExprPtr a = subst_expr(vy, id("y"), subst_expr(vx, id("x"), e));
    ExprPtr b = subst_expr(vx, id("x"), subst_expr(vy, id("y"), e));
    CHECK(alpha_equal(a, b));
  }
}
