#include <fmt/core.h>

#include "doctest.h"
#include "gen.hpp"
#include "priml/pretty.hpp"
#include "priml/typecheck.hpp"

using namespace priml;
using namespace priml::testgen;

namespace {

Ident id(const char *s) { return intern(s); }

struct Fixture {
  PartialOrder store;
  Signature sig;
  TypeContext ctx;

  Fixture() {
    store.declare_priority(id("background"));
    store.declare_priority(id("alert"));
    store.declare_order(id("background"), id("alert"));
  }

  TypePtr expr(const ExprPtr &e) { return type_expr(store, sig, ctx, e); }
  TypePtr cmd(const CmdPtr &m, Priority at) {
    return type_cmd(store, sig, ctx, m, at);
  }
};

Constraint leq1(Priority lo, Priority hi) {
  Constraint c;
  c.conjuncts.emplace_back(lo, hi);
  return c;
}

}  // namespace

TEST_CASE("identity function types at arrow") {
  Fixture f;
  TypePtr t = f.expr(e_fun(id("x"), t_nat(), e_var(id("x"))));
  CHECK(type_equal(t, t_arrow(t_nat(), t_nat())));
}

TEST_CASE("thread handles type via the signature") {
  Fixture f;
  f.sig.add(id("a"), t_nat(), prio_const(id("alert")));
  TypePtr t = f.expr(e_tid(id("a")));
  CHECK(type_equal(t, t_thread(t_nat(), prio_const(id("alert")))));
  CHECK_THROWS_AS(f.expr(e_tid(id("ghost"))), DiagnosticError);
}

TEST_CASE("forall elimination checks the instantiated constraint") {
  Fixture f;
  Constraint c = leq1(prio_const(id("alert")), prio_var(id("p")));
  ExprPtr lam = e_prlam(
      id("p"), c, e_cmd(prio_var(id("p")), c_ret(e_num(Nat(0)))));
  TypePtr t = f.expr(lam);
  REQUIRE(t->kind == TypeKind::Forall);
  CHECK(type_equal(f.expr(e_prapp(lam, prio_const(id("alert")))),
                   t_cmd(t_nat(), prio_const(id("alert")))));
  try {
    f.expr(e_prapp(lam, prio_const(id("background"))));
    FAIL("expected a constraint violation");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-PRIO-INV");
    CHECK(e.diag.message.find("alert <= background") != std::string::npos);
  }
}

TEST_CASE("spawn types at any current priority") {
  Fixture f;
  CmdPtr spawn =
      c_spawn(prio_const(id("background")), t_nat(), c_ret(e_num(Nat(0))));
  TypePtr t = f.cmd(spawn, prio_const(id("alert")));
  CHECK(type_equal(t, t_thread(t_nat(), prio_const(id("background")))));
  CHECK(type_equal(f.cmd(spawn, prio_bot()),
                   t_thread(t_nat(), prio_const(id("background")))));
}

TEST_CASE("sync rejects priority inversions") {
  Fixture f;
  f.sig.add(id("lo"), t_nat(), prio_const(id("background")));
  f.sig.add(id("hi"), t_nat(), prio_const(id("alert")));

  CHECK(type_equal(
      f.cmd(c_sync(e_tid(id("hi"))), prio_const(id("background"))), t_nat()));
  CHECK(type_equal(f.cmd(c_sync(e_tid(id("lo"))), prio_bot()), t_nat()));
  try {
    f.cmd(c_sync(e_tid(id("lo"))), prio_const(id("alert")));
    FAIL("expected a priority inversion");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-PRIO-INV");
    CHECK(e.diag.message.find("alert <= background") != std::string::npos);
  }
}

TEST_CASE("bind requires the command priority to match") {
  Fixture f;
  ExprPtr cmdval = e_cmd(prio_const(id("alert")), c_ret(e_num(Nat(1))));
  CmdPtr bind = c_bind(cmdval, id("x"), c_ret(e_var(id("x"))));
  CHECK(type_equal(f.cmd(bind, prio_const(id("alert"))), t_nat()));
  CHECK_THROWS_AS(f.cmd(bind, prio_const(id("background"))), DiagnosticError);
}

TEST_CASE("runtime value forms type like their source forms") {
  Fixture f;
  TypePtr sum = t_sum(t_nat(), t_unit());
  CHECK(type_equal(f.expr(e_inl_v(e_num(Nat(1)), sum)), sum));
  CHECK(type_equal(f.expr(e_inr_v(e_unit(), sum)), sum));
  CHECK(type_equal(f.expr(e_pair_v(e_num(Nat(1)), e_unit())),
                   t_prod(t_nat(), t_unit())));
  CHECK_THROWS_AS(f.expr(e_inl_v(e_unit(), sum)), DiagnosticError);
}

TEST_CASE("thread pools: empty, single, mutual reference") {
  PartialOrder store;
  store.declare_priority(id("p"));
  Signature ambient;

  Signature none = type_threadpool(store, ambient, {});
  CHECK(none.size() == 0);

  std::vector<PoolThread> one;
  one.push_back(
      PoolThread{id("a"), prio_const(id("p")), t_nat(), c_ret(e_num(Nat(5)))});
  Signature sig1 = type_threadpool(store, ambient, one);
  REQUIRE(sig1.size() == 1);
  CHECK(type_equal(sig1.entries()[0].ret_type, t_nat()));

  // two threads, each holding the other's tid in a value (Concat's mutual
  // signatures)
  std::vector<PoolThread> two;
  two.push_back(PoolThread{
      id("x"), prio_const(id("p")),
      t_prod(t_nat(), t_thread(t_nat(), prio_const(id("p")))),
      c_ret(e_pair_v(e_num(Nat(1)), e_tid(id("y"))))});
  two.push_back(PoolThread{
      id("y"), prio_const(id("p")), t_nat(),
      c_bind(e_cmd(prio_const(id("p")),
                   c_ret(e_pair_v(e_tid(id("x")), e_unit()))),
             id("h"), c_ret(e_num(Nat(0))))});
  Signature sig2 = type_threadpool(store, ambient, two);
  CHECK(sig2.size() == 2);

  std::vector<PoolThread> dup = one;
  dup.push_back(one[0]);
  CHECK_THROWS_AS(type_threadpool(store, ambient, dup), DiagnosticError);
}

TEST_CASE("action typing") {
  PartialOrder store;
  Signature sig;
  sig.add(id("b"), t_nat(), prio_bot());

  type_action(store, sig, Action{ActionKind::Silent, {}, nullptr});
  type_action(store, sig, Action{ActionKind::RetOf, id("b"), e_num(Nat(5))});
  type_action(store, sig,
              Action{ActionKind::SyncFrom, id("b"), e_num(Nat(5))});
  CHECK_THROWS_AS(
      type_action(store, sig, Action{ActionKind::SyncFrom, id("b"), e_unit()}),
      DiagnosticError);
  CHECK_THROWS_AS(
      type_action(store, sig,
                  Action{ActionKind::RetOf, id("nope"), e_num(Nat(1))}),
      DiagnosticError);
}

TEST_CASE("weakening: growing the signature or context preserves types") {
  Fixture f;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    ExprPtr e = gen_core_expr(rng, t_prod(t_nat(), t_sum(t_unit(), t_nat())),
                              {{id("g"), t_nat()}}, 3);
    TypeContext small;
    small.vars.emplace_back(id("g"), t_nat());
    TypePtr t1 = type_expr(f.store, f.sig, small, e);

    Signature bigger;
    bigger.add(id("zz"), t_unit(), prio_bot());
    TypeContext larger = small;
    larger.vars.insert(larger.vars.begin(), {id("unused"), t_unit()});
    TypePtr t2 = type_expr(f.store, bigger, larger, e);
    CHECK(type_equal(t1, t2));
  }
}

TEST_CASE("substitution lemma part 1: expressions") {
  Fixture f;
  for (uint64_t seed = 0; seed < 80; ++seed) {
    Rng rng(seed);
    TypePtr tx = rng.below(2) == 0 ? t_nat() : t_prod(t_nat(), t_unit());
    ExprPtr e =
        gen_core_expr(rng, t_sum(t_nat(), t_unit()), {{id("x"), tx}}, 3);
    TypeContext with_x;
    with_x.vars.emplace_back(id("x"), tx);
    TypePtr before = type_expr(f.store, f.sig, with_x, e);
    ExprPtr v = gen_core_value(rng, tx);
    TypeContext empty;
    TypePtr after =
        type_expr(f.store, f.sig, empty, subst_expr(v, id("x"), e));
    CHECK(type_equal(before, after));
  }
}

TEST_CASE("substitution lemma part 2: commands") {
  Fixture f;
  f.sig.add(id("hi"), t_nat(), prio_const(id("alert")));
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    ExprPtr body = gen_core_expr(rng, t_nat(), {{id("x"), t_nat()}}, 2);
    CmdPtr m = c_bind(
        e_cmd(prio_const(id("background")), c_ret(body)), id("y"),
        rng.below(2) == 0
            ? c_ret(e_pair(e_var(id("y")), e_var(id("x"))))
            : CmdPtr(c_bind(e_cmd(prio_const(id("background")),
                                  c_sync(e_tid(id("hi")))),
                            id("z"), c_ret(e_var(id("x"))))));
    TypeContext with_x;
    with_x.vars.emplace_back(id("x"), t_nat());
    TypePtr before =
        type_cmd(f.store, f.sig, with_x, m, prio_const(id("background")));
    ExprPtr v = gen_core_value(rng, t_nat());
    TypeContext empty;
    TypePtr after = type_cmd(f.store, f.sig, empty, subst_expr(v, id("x"), m),
                             prio_const(id("background")));
    CHECK(type_equal(before, after));
  }
}

TEST_CASE("substitution lemma parts 3-5: priorities") {
  Fixture f;
  CmdPtr body = c_bind(
      e_cmd(prio_var(id("pi")),
            c_spawn(prio_var(id("pi")), t_nat(), c_ret(e_num(Nat(1))))),
      id("b"), c_sync(e_var(id("b"))));
  ExprPtr e = e_cmd(prio_var(id("pi")), body);

  TypeContext with_pi;
  with_pi.entail.push_var(id("pi"));
  with_pi.entail.assumed.emplace_back(prio_const(id("alert")),
                                      prio_var(id("pi")));
  TypePtr before = type_expr(f.store, f.sig, with_pi, e);
  CHECK(type_equal(before, t_cmd(t_nat(), prio_var(id("pi")))));

  // part 5: the substituted constraint stays derivable
  Constraint c = leq1(prio_const(id("alert")), prio_var(id("pi")));
  Constraint inst = subst_prio(prio_const(id("alert")), id("pi"), c);
  TypeContext empty;
  CHECK(entails(f.store, empty.entail, inst));

  // parts 3-4: substituting a constant that satisfies the hypotheses
  ExprPtr e_inst = subst_prio(prio_const(id("alert")), id("pi"), e);
  TypePtr after = type_expr(f.store, f.sig, empty, e_inst);
  CHECK(type_equal(after, t_cmd(t_nat(), prio_const(id("alert")))));
  CHECK(
      type_equal(after, subst_prio(prio_const(id("alert")), id("pi"), before)));

  CmdPtr m_inst = subst_prio(prio_const(id("alert")), id("pi"), body);
  TypePtr after_cmd =
      type_cmd(f.store, f.sig, empty, m_inst, prio_const(id("alert")));
  CHECK(type_equal(after_cmd, t_nat()));
}
