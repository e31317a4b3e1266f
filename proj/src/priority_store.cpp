#include "priml/priority_store.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace priml {

bool EntailContext::has_var(Ident v) const {
  return std::find(prio_vars.begin(), prio_vars.end(), v) != prio_vars.end();
}

void EntailContext::assume(const Constraint &c) {
  for (const auto &pair : c.conjuncts) assumed.push_back(pair);
}

PartialOrder::PartialOrder() { declare_priority(bot_name()); }

bool PartialOrder::declared(Ident name) const { return index_.count(name) > 0; }

void PartialOrder::declare_priority(Ident name, SourceSpan span) {
  if (declared(name))
    fail(errcode::DupPriority, span,
         fmt::format("priority {} is already declared", str(name)));
  int n = static_cast<int>(consts_.size());
  consts_.push_back(name);
  index_[name] = n;
  for (auto &row : closure_) row.push_back(false);
  closure_.emplace_back(n + 1, false);
  closure_[n][n] = true;
  if (name != bot_name()) closure_[0][n] = true;  // bot <= everything
  total_cache_.clear();
}

void PartialOrder::declare_order(Ident lo, Ident hi, SourceSpan span) {
  if (!declared(lo))
    fail(errcode::UnknownPriority, span,
         fmt::format("unknown priority {}", str(lo)));
  if (!declared(hi))
    fail(errcode::UnknownPriority, span,
         fmt::format("unknown priority {}", str(hi)));
  int i = index_.at(lo), j = index_.at(hi);
  if (closure_[j][i])
    fail(errcode::Cycle, span,
         fmt::format("ordering {} < {} would create a cycle", str(lo),
                     str(hi)));
  edges_.emplace_back(lo, hi);
  closure_[i][j] = true;
  // Warshall restricted to the new reachability through i -> j.
  int n = static_cast<int>(consts_.size());
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      if (closure_[a][k])
        for (int b = 0; b < n; ++b)
          if (closure_[k][b]) closure_[a][b] = true;
  total_cache_.clear();
}

bool PartialOrder::leq(Ident lo, Ident hi) const {
  auto i = index_.find(lo);
  auto j = index_.find(hi);
  if (i == index_.end() || j == index_.end())
    fail(errcode::UnknownPriority,
         fmt::format("unknown priority {}",
                     str(i == index_.end() ? lo : hi)));
  return closure_[i->second][j->second];
}

void PartialOrder::recompute_total() const {
  // Kahn's algorithm; among ready nodes always pick the earliest-declared.
  int n = static_cast<int>(consts_.size());
  std::vector<int> indeg(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && closure_[a][b]) ++indeg[b];
  std::vector<bool> done(n, false);
  total_cache_.clear();
  total_index_cache_.clear();
  for (int picked = 0; picked < n; ++picked) {
    int next = -1;
    for (int a = 0; a < n; ++a)
      if (!done[a] && indeg[a] == 0) {
        next = a;
        break;
      }
    done[next] = true;
    total_index_cache_[consts_[next]] = picked;
    total_cache_.push_back(consts_[next]);
    for (int b = 0; b < n; ++b)
      if (b != next && closure_[next][b]) --indeg[b];
  }
}

std::vector<Ident> PartialOrder::total_order() const {
  if (total_cache_.empty()) recompute_total();
  return total_cache_;
}

int PartialOrder::total_index(Ident name) const {
  if (total_cache_.empty()) recompute_total();
  auto it = total_index_cache_.find(name);
  if (it == total_index_cache_.end())
    fail(errcode::UnknownPriority,
         fmt::format("unknown priority {}", str(name)));
  return it->second;
}

// ---------------------------------------------------------------------------
// Entailment

namespace {

struct Atom {
  Priority prio;
  bool operator==(const Atom &o) const { return prio == o.prio; }
};

// Decision procedure: collect the atoms mentioned by the goal, the context
// and the store, close assumed ∪ store-order under reflexivity and
// transitivity, then check each conjunct.
struct EntailSolver {
  std::vector<Priority> atoms;
  std::vector<std::vector<bool>> reach;

  int atom_index(const Priority &p) {
    for (size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] == p) return static_cast<int>(i);
    atoms.push_back(p);
    return static_cast<int>(atoms.size()) - 1;
  }
};

void check_known(const PartialOrder &store, const EntailContext &ctx,
                 const Priority &p) {
  if (p.is_const()) {
    if (!store.declared(p.name) && !ctx.has_var(p.name))
      fail(errcode::UnknownPriority,
           fmt::format("unknown priority {}", str(p.name)));
  } else if (!ctx.has_var(p.name)) {
    fail(errcode::UnknownPriority,
         fmt::format("unbound priority variable {}", str(p.name)));
  }
}

}  // namespace

bool entails(const PartialOrder &store, const EntailContext &ctx,
             const Constraint &goal) {
  EntailSolver s;
  for (const auto &[l, r] : goal.conjuncts) {
    check_known(store, ctx, l);
    check_known(store, ctx, r);
    s.atom_index(l);
    s.atom_index(r);
  }
  for (const auto &[l, r] : ctx.assumed) {
    s.atom_index(l);
    s.atom_index(r);
  }
  for (Ident c : store.consts()) s.atom_index(prio_const(c));

  int n = static_cast<int>(s.atoms.size());
  s.reach.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) s.reach[i][i] = true;
  for (const auto &[l, r] : ctx.assumed)
    s.reach[s.atom_index(l)][s.atom_index(r)] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (s.atoms[i].is_const() && s.atoms[j].is_const() &&
          store.declared(s.atoms[i].name) && store.declared(s.atoms[j].name) &&
          store.leq(s.atoms[i].name, s.atoms[j].name))
        s.reach[i][j] = true;

  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (s.reach[i][k])
        for (int j = 0; j < n; ++j)
          if (s.reach[k][j]) s.reach[i][j] = true;

  for (const auto &[l, r] : goal.conjuncts)
    if (!s.reach[s.atom_index(l)][s.atom_index(r)]) return false;
  return true;
}

bool entails_leq(const PartialOrder &store, const EntailContext &ctx,
                 const Priority &lo, const Priority &hi) {
  Constraint c;
  c.conjuncts.emplace_back(lo, hi);
  return entails(store, ctx, c);
}

EntailContext ctxify(const PartialOrder &store) {
  EntailContext ctx;
  for (Ident c : store.consts()) {
    ctx.push_var(c);
    if (c != bot_name())
      ctx.assumed.emplace_back(prio_const(bot_name()), prio_const(c));
  }
  for (const auto &[lo, hi] : store.edges())
    ctx.assumed.emplace_back(prio_const(lo), prio_const(hi));
  return ctx;
}

}  // namespace priml
