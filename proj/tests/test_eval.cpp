#include <fmt/core.h>

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gen.hpp"
#include "priml/elaborate.hpp"
#include "priml/eval.hpp"
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

ElabResult elab_corpus(const char *name) {
  return elab_program(
      parse(slurp(fmt::format("{}/{}", PRIML_CORPUS_DIR, name))));
}

RunResult run_corpus(const char *name, RunOptions opts) {
  ElabResult r = elab_corpus(name);
  return run(r.store, r.main, r.main_type, opts);
}

struct StepFixture {
  Signature sig;
  std::deque<Nat> ins;
  std::vector<Nat> outs;
  StepIo io{&ins, &outs};
  int64_t counter = 0;
  std::vector<std::pair<Ident, ExprPtr>> retained;

  ExprPtr step(const ExprPtr &e) { return step_expr(sig, io, e); }
  CmdStep stepc(const CmdPtr &m) {
    return step_cmd(
        sig, io, m,
        [&](Ident b) -> const ExprPtr * {
          for (auto &[k, v] : retained)
            if (k == b) return &v;
          return nullptr;
        },
        [&] { return intern(fmt::format("fresh{}", counter++)); });
  }
};

}  // namespace

TEST_CASE("expression rules: ifz, app, fix") {
  StepFixture f;
  CHECK(alpha_equal(
      f.step(e_ifz(e_num(Nat(0)), e_num(Nat(1)), id("x"), e_var(id("x")))),
      e_num(Nat(1))));
  CHECK(alpha_equal(
      f.step(e_ifz(e_num(Nat(4)), e_num(Nat(1)), id("x"), e_var(id("x")))),
      e_num(Nat(3))));
  CHECK(alpha_equal(
      f.step(e_app(e_fun(id("x"), t_nat(), e_var(id("x"))), e_num(Nat(5)))),
      e_num(Nat(5))));
  ExprPtr fx = e_fix(id("f"), t_nat(), e_num(Nat(3)));
  CHECK(alpha_equal(f.step(fx), e_num(Nat(3))));
  // D-Fix substitutes the fix expression itself
  ExprPtr fx2 =
      e_fix(id("f"), t_nat(),
            e_let(id("g"), e_var(id("f")), e_num(Nat(1))));
  ExprPtr once = f.step(fx2);
  REQUIRE(once->kind == ExprKind::Let);
  CHECK(alpha_equal(once->e1, fx2));
  CHECK_THROWS_AS(f.step(e_fst(e_num(Nat(1)))), DiagnosticError);
}

TEST_CASE("output and input touch the io state") {
  StepFixture f;
  f.ins.push_back(Nat(11));
  CHECK(f.step(e_output(e_num(Nat(7))))->kind == ExprKind::Unit);
  CHECK(f.outs == std::vector<Nat>{Nat(7)});
  CHECK(f.step(e_input())->num == Nat(11));
  // exhausted input yields 0 and flags the underflow
  CHECK(f.step(e_input())->num == Nat(0));
  CHECK(f.io.input_underflow);
}

TEST_CASE("command rules: bind3, spawn, sync") {
  StepFixture f;
  // bind cmd[bot]{ret 5} as x in ret x  --D-Bind3-->  ret 5
  CmdPtr m = c_bind(e_cmd(prio_bot(), c_ret(e_num(Nat(5)))), id("x"),
                    c_ret(e_var(id("x"))));
  CmdStep s = f.stepc(m);
  CHECK_FALSE(s.blocked);
  CHECK(alpha_equal(s.next, c_ret(e_num(Nat(5)))));
  CHECK(s.action.kind == ActionKind::Silent);

  // spawn returns ret (tid b) and the spawned body
  CmdStep sp = f.stepc(c_spawn(prio_bot(), t_nat(), c_ret(e_num(Nat(0)))));
  REQUIRE(sp.spawned.has_value());
  CHECK(sp.next->kind == CmdKind::Ret);
  CHECK(sp.next->expr->kind == ExprKind::Tid);
  CHECK(sp.next->expr->tid == sp.spawned->id);

  // sync of an unfinished thread blocks; of a finished one returns its value
  CmdStep blocked = f.stepc(c_sync(e_tid(id("b"))));
  CHECK(blocked.blocked);
  CHECK(blocked.blocked_on == id("b"));
  f.retained.emplace_back(id("b"), e_num(Nat(7)));
  CmdStep synced = f.stepc(c_sync(e_tid(id("b"))));
  CHECK_FALSE(synced.blocked);
  CHECK(synced.action.kind == ActionKind::SyncFrom);
  CHECK(synced.action.thread == id("b"));
  CHECK(alpha_equal(synced.next, c_ret(e_num(Nat(7)))));
}

TEST_CASE("trivial main returns immediately with response time 1") {
  RunOptions opts;
  RunResult r = run_corpus("min_ret.priml", opts);
  CHECK(r.value->kind == ExprKind::Unit);
  REQUIRE(r.stats.size() == 1);
  CHECK(r.stats[0].response_time() == 1);
  CHECK(r.global_steps == 0);
}

TEST_CASE("spawn-then-sync two-thread program, cross-checked by hand") {
  // main: b <- spawn[bot;nat]{ret 7}; x <- sync b; ret x
  CmdPtr m0 = c_bind(
      e_cmd(prio_bot(), c_spawn(prio_bot(), t_nat(), c_ret(e_num(Nat(7))))),
      id("b"),
      c_bind(e_cmd(prio_bot(), c_sync(e_var(id("b")))), id("x"),
             c_ret(e_var(id("x")))));
  PartialOrder store;
  RunOptions opts;
  opts.procs = 2;
  RunResult r = run(store, m0, t_nat(), opts);
  CHECK(alpha_equal(r.value, e_num(Nat(7))));
  REQUIRE(r.stats.size() == 2);
  CHECK(r.stats[1].transitions == 0);  // the child is ret 7 instantly
  REQUIRE(r.join_edges.size() == 1);
  CHECK(r.join_edges[0].src == r.stats[1].id);
  CHECK(r.join_edges[0].dst == id("main"));
  REQUIRE(r.spawn_edges.size() == 1);
}

TEST_CASE("promptness is observable: high-priority output wins under P=1") {
  // A top-priority spawner creates both children before either can run (it
  // outranks them), so when it finishes, lo and hi are ready together and
  // the prompt pick must run hi first.
  ElabResult prog = elab_program(parse(
      "priority lo\npriority hi\npriority top\n"
      "order lo < hi\norder lo < top\norder hi < top\n"
      "fun spawner (u : unit) : unit cmd[top] =\n"
      "  cmd[top] {\n"
      "    a <- spawn[lo] { ret (output 5) };\n"
      "    b <- spawn[hi] { ret (output 6) };\n"
      "    ret ()\n"
      "  }\n"
      "main { t <- spawn[top] { do (spawner ()) }; u <- sync t; ret () }"));
  RunOptions opts;
  opts.procs = 1;
  opts.join_all = true;
  RunResult r = run(prog.store, prog.main, prog.main_type, opts);
  REQUIRE(r.output_log.size() == 2);
  CHECK(r.output_log[0] == Nat(6));
  CHECK(r.output_log[1] == Nat(5));
}

TEST_CASE("figure 3b: the loop marker prints before the sort output") {
  RunOptions opts;
  opts.procs = 2;
  opts.join_all = true;
  RunResult r = run_corpus("fig3b_loop.priml", opts);
  REQUIRE(r.output_log.size() == 2);
  CHECK(r.output_log[0] == Nat(1));
  CHECK(r.output_log[1] == Nat(42));
}

TEST_CASE("value and outputs are independent of P and seed") {
  for (const char *name : {"output7.priml", "email.priml", "bank.priml"}) {
    CAPTURE(name);
    std::optional<std::string> first_value;
    std::optional<std::vector<Nat>> first_sorted;
    for (int procs : {1, 2, 4, 8}) {
      for (uint64_t seed : {0ULL, 7ULL, 99ULL}) {
        RunOptions opts;
        opts.procs = procs;
        opts.seed = seed;
        opts.join_all = true;
        RunResult r = run_corpus(name, opts);
        std::string value = show(r.value);
        std::vector<Nat> sorted = r.output_log;
        std::sort(sorted.begin(), sorted.end());
        if (!first_value) {
          first_value = value;
          first_sorted = sorted;
        } else {
          CHECK(*first_value == value);
          CHECK(*first_sorted == sorted);
        }
      }
    }
  }
}

TEST_CASE("response time weakly decreases with more processors") {
  ElabResult prog = elab_corpus("bank.priml");
  RunOptions one;
  one.procs = 1;
  one.join_all = true;
  RunOptions four;
  four.procs = 4;
  four.join_all = true;
  RunResult r1 = run(prog.store, prog.main, prog.main_type, one);
  RunResult r4 = run(prog.store, prog.main, prog.main_type, four);
  CHECK(r4.stats[0].response_time() <= r1.stats[0].response_time());
}

TEST_CASE("identical configuration gives byte-identical traces") {
  for (int rep = 0; rep < 3; ++rep) {
    RunOptions opts;
    opts.procs = 3;
    opts.seed = 42;
    opts.join_all = true;
    RunResult a = run_corpus("bank.priml", opts);
    RunResult b = run_corpus("bank.priml", opts);
    CHECK(format_trace(a) == format_trace(b));
  }
}

TEST_CASE("different seeds may reorder but keep the value") {
  RunOptions a;
  a.procs = 2;
  a.seed = 1;
  a.join_all = true;
  RunOptions b = a;
  b.seed = 12345;
  RunResult ra = run_corpus("fib_server.priml", [] {
    RunOptions o;
    o.procs = 2;
    o.seed = 1;
    o.join_all = true;
    o.inputs = {Nat(5), Nat(7), Nat(3)};
    return o;
  }());
  RunResult rb = run_corpus("fib_server.priml", [] {
    RunOptions o;
    o.procs = 2;
    o.seed = 12345;
    o.join_all = true;
    o.inputs = {Nat(5), Nat(7), Nat(3)};
    return o;
  }());
  CHECK(show(ra.value) == show(rb.value));
  std::vector<Nat> sa = ra.output_log, sb = rb.output_log;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  CHECK(sa == sb);
}

TEST_CASE("audited runs re-typecheck every step") {
  for (const char *name :
       {"output7.priml", "email.priml", "bank.priml", "fig3b_loop.priml"}) {
    CAPTURE(name);
    RunOptions opts;
    opts.procs = 2;
    opts.audit = true;
    opts.join_all = true;
    RunResult r = run_corpus(name, opts);
    CHECK(r.stats[0].finished);
  }
}

TEST_CASE("a self-waiting thread is reported as a deadlock") {
  // forged: main syncs its own handle (never typeable)
  CmdPtr m0 = c_sync(e_tid(id("main")));
  PartialOrder store;
  RunOptions opts;
  try {
    run(store, m0, t_nat(), opts);
    FAIL("expected a deadlock report");
  } catch (const DiagnosticError &e) {
    CHECK(e.diag.code == "E-DEADLOCK");
    CHECK(e.diag.message.find("main") != std::string::npos);
  }
}

TEST_CASE("nontermination hits the step guard") {
  ElabResult prog = elab_program(parse(
      "fun loop (x : nat) : nat = loop x\n"
      "main { ret (loop 1) }"));
  RunOptions opts;
  opts.max_steps = 5000;
  CHECK_THROWS_AS(run(prog.store, prog.main, prog.main_type, opts),
                  DiagnosticError);
}
