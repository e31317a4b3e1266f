#include <fmt/core.h>

#include "doctest.h"
#include "priml/eval.hpp"
#include "priml/priority_store.hpp"

using namespace priml;

namespace {

Ident id(const char *s) { return intern(s); }

Constraint leq1(Priority lo, Priority hi) {
  Constraint c;
  c.conjuncts.emplace_back(lo, hi);
  return c;
}

// DFS reachability closure over declared edges plus bot edges; the oracle
// for the Warshall-maintained closure.
bool dfs_leq(const PartialOrder &store, Ident lo, Ident hi) {
  if (lo == hi) return true;
  std::vector<Ident> stack{lo};
  std::vector<Ident> seen;
  auto visited = [&](Ident x) {
    for (Ident s : seen)
      if (s == x) return true;
    return false;
  };
  while (!stack.empty()) {
    Ident cur = stack.back();
    stack.pop_back();
    if (cur == hi) return true;
    if (visited(cur)) continue;
    seen.push_back(cur);
    if (cur == bot_name())
      for (Ident c : store.consts())
        if (c != bot_name()) stack.push_back(c);
    for (const auto &[a, b] : store.edges())
      if (a == cur) stack.push_back(b);
  }
  return false;
}

// Exhaustive derivation search: iterate hyp/assume/refl/trans to a fixpoint
// (depth |atoms|^2 suffices); a second, rule-by-rule implementation of
// entailment used as the oracle.
bool derivable(const PartialOrder &store, const EntailContext &ctx,
               const Priority &lo, const Priority &hi) {
  std::vector<Priority> atoms;
  auto add_atom = [&](const Priority &p) {
    for (const auto &a : atoms)
      if (a == p) return;
    atoms.push_back(p);
  };
  add_atom(lo);
  add_atom(hi);
  for (const auto &[a, b] : ctx.assumed) {
    add_atom(a);
    add_atom(b);
  }
  for (Ident c : store.consts()) add_atom(prio_const(c));
  std::vector<std::pair<Priority, Priority>> facts;
  auto holds = [&](const Priority &a, const Priority &b) {
    for (const auto &[x, y] : facts)
      if (x == a && y == b) return true;
    return false;
  };
  auto add = [&](const Priority &a, const Priority &b) {
    if (!holds(a, b)) facts.emplace_back(a, b);
  };
  for (const auto &a : atoms) add(a, a);                      // refl
  for (const auto &[a, b] : ctx.assumed) add(a, b);           // hyp
  for (const auto &a : atoms)                                 // assume
    for (const auto &b : atoms)
      if (a.is_const() && b.is_const() && store.declared(a.name) &&
          store.declared(b.name) && store.leq(a.name, b.name))
        add(a, b);
  size_t rounds = atoms.size() * atoms.size() + 2;
  for (size_t r = 0; r < rounds; ++r)                          // trans
    for (size_t i = 0; i < facts.size(); ++i)
      for (size_t j = 0; j < facts.size(); ++j)
        if (facts[i].second == facts[j].first)
          add(facts[i].first, facts[j].second);
  return holds(lo, hi);
}

}  // namespace

TEST_CASE("declaring priorities") {
  PartialOrder store;
  store.declare_priority(id("alert"));
  store.declare_priority(id("background"));
  CHECK(store.consts().size() == 3);  // bot, alert, background
  CHECK(store.declared(bot_name()));
  CHECK(store.leq(id("alert"), id("alert")));  // reflexive entry
  CHECK(store.leq(bot_name(), id("alert")));
  CHECK(store.leq(bot_name(), id("background")));
  CHECK_THROWS_AS(store.declare_priority(bot_name()), DiagnosticError);
  CHECK_THROWS_AS(store.declare_priority(id("alert")), DiagnosticError);
}

TEST_CASE("order edges update closure and reject cycles") {
  PartialOrder store;
  store.declare_priority(id("background"));
  store.declare_priority(id("alert"));
  store.declare_order(id("background"), id("alert"));
  CHECK(store.leq(id("background"), id("alert")));
  CHECK_FALSE(store.leq(id("alert"), id("background")));
  CHECK_THROWS_AS(store.declare_order(id("alert"), id("background")),
                  DiagnosticError);
  CHECK_THROWS_AS(store.declare_order(id("alert"), id("alert")),
                  DiagnosticError);
  CHECK_THROWS_AS(store.declare_order(id("alert"), id("nosuch")),
                  DiagnosticError);
}

TEST_CASE("chains close transitively") {
  PartialOrder store;
  store.declare_priority(id("a"));
  store.declare_priority(id("b"));
  store.declare_priority(id("c"));
  store.declare_order(id("a"), id("b"));
  store.declare_order(id("b"), id("c"));
  CHECK(store.leq(id("a"), id("c")));
}

TEST_CASE("Warshall closure equals DFS reachability on random orders") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    PartialOrder store;
    int n = 2 + static_cast<int>(rng.below(10));
    std::vector<Ident> names;
    for (int i = 0; i < n; ++i) {
      names.push_back(intern(fmt::format("w{}", i)));
      store.declare_priority(names.back());
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.below(4) == 0) store.declare_order(names[i], names[j]);
    for (Ident a : store.consts())
      for (Ident b : store.consts())
        CHECK(store.leq(a, b) == dfs_leq(store, a, b));
  }
}

TEST_CASE("entailment: hyp, assume, refl, trans, conj") {
  PartialOrder store;
  store.declare_priority(id("sort_p"));
  store.declare_priority(id("loop_p"));
  store.declare_order(id("sort_p"), id("loop_p"));
  EntailContext empty;

  CHECK(entails_leq(store, empty, prio_const(id("sort_p")),
                    prio_const(id("loop_p"))));
  CHECK_FALSE(entails_leq(store, empty, prio_const(id("loop_p")),
                          prio_const(id("sort_p"))));
  // refl for any atom, including variables
  EntailContext ctx;
  ctx.push_var(id("pi"));
  CHECK(entails_leq(store, ctx, prio_var(id("pi")), prio_var(id("pi"))));
  // hyp
  ctx.assumed.emplace_back(prio_const(id("loop_p")), prio_var(id("pi")));
  CHECK(entails_leq(store, ctx, prio_const(id("loop_p")), prio_var(id("pi"))));
  // trans through a hypothesis
  CHECK(entails_leq(store, ctx, prio_const(id("sort_p")), prio_var(id("pi"))));
  // conj
  Constraint both;
  both.conjuncts.emplace_back(prio_const(id("sort_p")), prio_var(id("pi")));
  both.conjuncts.emplace_back(prio_var(id("pi")), prio_var(id("pi")));
  CHECK(entails(store, ctx, both));
  // unknown atom
  CHECK_THROWS_AS(
      entails_leq(store, empty, prio_var(id("ghost")), prio_const(id("sort_p"))),
      DiagnosticError);
}

TEST_CASE("entailment is invariant under conjunct reordering") {
  PartialOrder store;
  store.declare_priority(id("a"));
  store.declare_priority(id("b"));
  store.declare_order(id("a"), id("b"));
  EntailContext ctx;
  Constraint c1, c2;
  c1.conjuncts.emplace_back(prio_const(id("a")), prio_const(id("b")));
  c1.conjuncts.emplace_back(prio_const(bot_name()), prio_const(id("a")));
  c2.conjuncts = {c1.conjuncts[1], c1.conjuncts[0]};
  CHECK(entails(store, ctx, c1) == entails(store, ctx, c2));
}

TEST_CASE("entailment weakening: a larger context proves no less") {
  PartialOrder store;
  store.declare_priority(id("a"));
  store.declare_priority(id("b"));
  EntailContext small;
  small.push_var(id("p"));
  EntailContext big = small;
  big.assumed.emplace_back(prio_const(id("a")), prio_var(id("p")));
  Constraint goal = leq1(prio_const(id("a")), prio_var(id("p")));
  CHECK_FALSE(entails(store, small, goal));
  CHECK(entails(store, big, goal));
  // anything small proves, big proves
  Constraint refl = leq1(prio_var(id("p")), prio_var(id("p")));
  CHECK(entails(store, small, refl));
  CHECK(entails(store, big, refl));
}

TEST_CASE("entailment agrees with exhaustive derivation search") {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    PartialOrder store;
    int n = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < n; ++i)
      store.declare_priority(intern(fmt::format("c{}", i)));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.below(3) == 0)
          store.declare_order(intern(fmt::format("c{}", i)),
                              intern(fmt::format("c{}", j)));
    EntailContext ctx;
    int nv = static_cast<int>(rng.below(3));
    std::vector<Priority> atoms;
    for (Ident c : store.consts()) atoms.push_back(prio_const(c));
    for (int i = 0; i < nv; ++i) {
      Ident v = intern(fmt::format("v{}", i));
      ctx.push_var(v);
      atoms.push_back(prio_var(v));
    }
    int hyps = static_cast<int>(rng.below(4));
    for (int i = 0; i < hyps; ++i)
      ctx.assumed.emplace_back(atoms[rng.below(atoms.size())],
                               atoms[rng.below(atoms.size())]);
    for (const auto &lo : atoms)
      for (const auto &hi : atoms) {
        CAPTURE(seed);
        CHECK(entails_leq(store, ctx, lo, hi) ==
              derivable(store, ctx, lo, hi));
      }
  }
}

TEST_CASE("total order is a deterministic linear extension") {
  PartialOrder store;
  store.declare_priority(id("ta"));
  store.declare_priority(id("tb"));
  store.declare_priority(id("tc"));
  store.declare_order(id("ta"), id("tc"));
  std::vector<Ident> total = store.total_order();
  REQUIRE(total.size() == 4);
  CHECK(total[0] == bot_name());
  CHECK(total[1] == id("ta"));
  CHECK(total[2] == id("tb"));  // declaration-order tie break
  CHECK(total[3] == id("tc"));
  // linear extension property on every pair
  for (Ident a : store.consts())
    for (Ident b : store.consts())
      if (a != b && store.leq(a, b))
        CHECK(store.total_index(a) < store.total_index(b));
}

TEST_CASE("single and empty user orders") {
  PartialOrder one;
  one.declare_priority(id("only"));
  CHECK(one.total_order() == std::vector<Ident>{bot_name(), id("only")});
  PartialOrder none;
  CHECK(none.total_order() == std::vector<Ident>{bot_name()});
}

TEST_CASE("linear extension property on random stores") {
  for (uint64_t seed = 100; seed < 140; ++seed) {
    Rng rng(seed);
    PartialOrder store;
    int n = 1 + static_cast<int>(rng.below(8));
    std::vector<Ident> names;
    for (int i = 0; i < n; ++i) {
      names.push_back(intern(fmt::format("r{}", i)));
      store.declare_priority(names.back());
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.below(3) == 0) store.declare_order(names[i], names[j]);
    for (Ident a : store.consts())
      for (Ident b : store.consts())
        if (a != b && store.leq(a, b))
          CHECK(store.total_index(a) < store.total_index(b));
  }
}

TEST_CASE("ctxify unrolls the store into hypotheses") {
  PartialOrder store;
  store.declare_priority(id("ka"));
  store.declare_priority(id("kb"));
  store.declare_order(id("ka"), id("kb"));
  EntailContext ctx = ctxify(store);
  // assumed: bot<=ka, bot<=kb, ka<=kb
  REQUIRE(ctx.assumed.size() == 3);
  CHECK(ctx.assumed[0] ==
        std::make_pair(prio_const(bot_name()), prio_const(id("ka"))));
  CHECK(ctx.assumed[1] ==
        std::make_pair(prio_const(bot_name()), prio_const(id("kb"))));
  CHECK(ctx.assumed[2] ==
        std::make_pair(prio_const(id("ka")), prio_const(id("kb"))));

  PartialOrder empty;
  EntailContext basic = ctxify(empty);
  CHECK(basic.prio_vars == std::vector<Ident>{bot_name()});
  CHECK(basic.assumed.empty());
}

TEST_CASE("entailment under ctxify coincides with the store parameter") {
  PartialOrder empty;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    PartialOrder store;
    int n = 1 + static_cast<int>(rng.below(4));
    std::vector<Ident> names{bot_name()};
    for (int i = 0; i < n; ++i) {
      names.push_back(intern(fmt::format("x{}", i)));
      store.declare_priority(names.back());
    }
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (rng.below(3) == 0) store.declare_order(names[i], names[j]);
    EntailContext loaded = ctxify(store);
    EntailContext direct;
    for (int k = 0; k < 6; ++k) {
      Priority lo = prio_const(names[rng.below(names.size())]);
      Priority hi = prio_const(names[rng.below(names.size())]);
      CHECK(entails_leq(empty, loaded, lo, hi) ==
            entails_leq(store, direct, lo, hi));
    }
  }
}

TEST_CASE("antisymmetry is preserved by construction") {
  for (uint64_t seed = 300; seed < 330; ++seed) {
    Rng rng(seed);
    PartialOrder store;
    int n = 2 + static_cast<int>(rng.below(6));
    std::vector<Ident> names;
    for (int i = 0; i < n; ++i) {
      names.push_back(intern(fmt::format("y{}", i)));
      store.declare_priority(names.back());
    }
    // attempt arbitrary edges; cycle-raising inserts must throw
    for (int k = 0; k < 12; ++k) {
      Ident lo = names[rng.below(names.size())];
      Ident hi = names[rng.below(names.size())];
      try {
        store.declare_order(lo, hi);
      } catch (const DiagnosticError &) {
      }
    }
    for (Ident a : store.consts())
      for (Ident b : store.consts())
        if (a != b) {
          bool both = store.leq(a, b) && store.leq(b, a);
          CHECK_FALSE(both);
        }
  }
}
