#include "priml/costgraph.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <deque>
#include <sstream>

#include "priml/pretty.hpp"

namespace priml {

const CostDag::Thread *CostDag::find(Ident name) const {
  for (const auto &t : threads)
    if (t.name == name) return &t;
  return nullptr;
}

int CostDag::thread_index(Ident name) const {
  for (size_t i = 0; i < threads.size(); ++i)
    if (threads[i].name == name) return static_cast<int>(i);
  return -1;
}

int64_t CostDag::total_vertices() const {
  int64_t n = 0;
  for (const auto &t : threads) n += t.length;
  return n;
}

// ---------------------------------------------------------------------------
// Cost semantics

struct CostState {
  const PartialOrder *store;
  int64_t fuel;
  std::deque<Nat> inputs;
  CostDag dag;
  std::unordered_map<Ident, int> tidx;
  std::vector<std::pair<Ident, CostResult::RecordEntry>> record;
  Signature sig;
  int64_t spawn_counter = 0;

  void charge(SourceSpan span, int64_t n = 1) {
    fuel -= n;
    if (fuel < 0)
      fail(errcode::Fuel, span,
           "cost evaluation exceeded its fuel (set PRIML_FUEL to raise)");
  }

  int64_t append_vertex(Ident thread) {
    CostDag::Thread &t = dag.threads[tidx.at(thread)];
    return t.length++;
  }

  Ident new_thread(Priority prio) {
    Ident name = intern(fmt::format("t{}", spawn_counter++));
    tidx[name] = static_cast<int>(table_size());
    dag.threads.push_back(CostDag::Thread{name, prio, 0});
    return name;
  }

  size_t table_size() const { return dag.threads.size(); }

  const CostResult::RecordEntry *record_of(Ident b) const {
    for (const auto &[name, entry] : record)
      if (name == b) return &entry;
    return nullptr;
  }
};

std::pair<ExprPtr, int64_t> cost_expr(CostState &state, const ExprPtr &e) {
  if (is_value(e)) return {e, 0};  // C-Val
  switch (e->kind) {
    case ExprKind::Let: {
      auto [v1, c1] = cost_expr(state, e->e1);
      state.charge(e->span);
      auto [v, c2] = cost_expr(state, subst_expr(v1, e->var, e->e2));
      return {v, c1 + 1 + c2};
    }
    case ExprKind::Ifz: {
      if (e->e1->kind != ExprKind::Num)
        fail(errcode::Stuck, e->span, "ifz on a non-numeral");
      state.charge(e->span);
      if (e->e1->num == 0) {
        auto [v, c] = cost_expr(state, e->e2);
        return {v, c + 1};
      }
      auto [v, c] =
          cost_expr(state, subst_expr(e_num(e->e1->num - 1), e->var, e->e3));
      return {v, c + 1};
    }
    case ExprKind::App: {
      if (e->e1->kind != ExprKind::Fun)
        fail(errcode::Stuck, e->span, "application of a non-function");
      state.charge(e->span);
      auto [v, c] = cost_expr(state, subst_expr(e->e2, e->e1->var, e->e1->e1));
      return {v, c + 1};
    }
    case ExprKind::EPair:
      state.charge(e->span);
      return {e_pair_v(e->e1, e->e2, e->span), 1};
    case ExprKind::Fst:
      if (e->e1->kind != ExprKind::PairV)
        fail(errcode::Stuck, e->span, "fst of a non-pair");
      state.charge(e->span);
      return {e->e1->e1, 1};
    case ExprKind::Snd:
      if (e->e1->kind != ExprKind::PairV)
        fail(errcode::Stuck, e->span, "snd of a non-pair");
      state.charge(e->span);
      return {e->e1->e2, 1};
    case ExprKind::EInl:
      state.charge(e->span);
      return {e_inl_v(e->e1, e->type, e->span), 1};
    case ExprKind::EInr:
      state.charge(e->span);
      return {e_inr_v(e->e1, e->type, e->span), 1};
    case ExprKind::Case: {
      state.charge(e->span);
      if (e->e1->kind == ExprKind::InlV) {
        auto [v, c] = cost_expr(state, subst_expr(e->e1->e1, e->var, e->e2));
        return {v, c + 1};
      }
      if (e->e1->kind == ExprKind::InrV) {
        auto [v, c] = cost_expr(state, subst_expr(e->e1->e1, e->var2, e->e3));
        return {v, c + 1};
      }
      fail(errcode::Stuck, e->span, "case on a non-injection");
    }
    case ExprKind::Output:
      if (e->e1->kind != ExprKind::Num)
        fail(errcode::Stuck, e->span, "output of a non-numeral");
      state.charge(e->span);
      return {e_unit(e->span), 1};
    case ExprKind::Input: {
      state.charge(e->span);
      Nat n(0);
      if (!state.inputs.empty()) {
        n = state.inputs.front();
        state.inputs.pop_front();
      }
      return {e_num(std::move(n), e->span), 1};
    }
    case ExprKind::PrApp: {
      if (e->e1->kind != ExprKind::PrLam)
        fail(errcode::Stuck, e->span, "priority application of a non-plam");
      state.charge(e->span);
      auto [v, c] =
          cost_expr(state, subst_prio(e->prio, e->e1->var, e->e1->e1));
      return {v, c + 1};
    }
    case ExprKind::Fix: {
      state.charge(e->span);
      auto [v, c] = cost_expr(state, subst_expr(e, e->var, e->e1));
      return {v, c + 1};
    }
    default:
      fail(errcode::Stuck, e->span, "unreachable expression in cost semantics");
  }
}

namespace {

// Appends e's vertices to thread a and returns the value.
ExprPtr cost_expr_in_thread(CostState &state, Ident a, const ExprPtr &e) {
  auto [v, c] = cost_expr(state, e);
  state.dag.threads[state.tidx.at(a)].length += c;
  return v;
}

ExprPtr cost_cmd(CostState &state, Ident a, const Priority &prio,
                 const CmdPtr &m) {
  switch (m->kind) {
    case CmdKind::Bind: {
      ExprPtr vcmd = cost_expr_in_thread(state, a, m->expr);
      if (vcmd->kind != ExprKind::CmdVal)
        fail(errcode::Stuck, m->span, "bind of a non-command value");
      ExprPtr v = cost_cmd(state, a, vcmd->prio, vcmd->cmd);
      state.charge(m->span);
      state.append_vertex(a);  // the bind vertex
      return cost_cmd(state, a, prio, subst_expr(v, m->var, m->rest));
    }
    case CmdKind::Spawn: {
      // C-Spawn evaluates the child eagerly under a fresh name.
      if (!m->prio.is_const())
        fail(errcode::Stuck, m->span,
             "spawn at an uninstantiated priority variable");
      Ident b = state.new_thread(m->prio);
      size_t sig_before = state.sig.size();
      ExprPtr v = cost_cmd(state, b, m->prio, m->rest);
      Signature spawned;
      for (size_t i = sig_before; i < state.sig.size(); ++i) {
        const auto &entry = state.sig.entries()[i];
        spawned.add(entry.id, entry.ret_type, entry.prio);
      }
      state.sig.add(b, m->ret_type, m->prio);
      state.record.emplace_back(
          b, CostResult::RecordEntry{v, std::move(spawned)});
      state.charge(m->span);
      int64_t u = state.append_vertex(a);
      state.dag.spawn_edges.push_back(SpawnEdge{VertexId{a, u}, b});
      return e_tid(b, m->span);
    }
    case CmdKind::Sync: {
      ExprPtr v = cost_expr_in_thread(state, a, m->expr);
      if (v->kind != ExprKind::Tid)
        fail(errcode::Stuck, m->span, "sync of a non-thread value");
      const CostResult::RecordEntry *entry = state.record_of(v->tid);
      if (!entry)
        fail(errcode::UnknownThread, m->span,
             fmt::format("sync on thread {} with no record entry",
                         str(v->tid)));
      state.charge(m->span);
      int64_t u = state.append_vertex(a);
      state.dag.join_edges.push_back(JoinEdge{v->tid, VertexId{a, u}});
      return entry->value;
    }
    case CmdKind::Ret:
      return cost_expr_in_thread(state, a, m->expr);
  }
  fail(errcode::Stuck, m->span, "unreachable command in cost semantics");
}

}  // namespace

CostResult cost_program(const PartialOrder &store, const CmdPtr &m,
                        const CostOptions &opts, Ident root_name) {
  CostState state{&store, opts.fuel};
  for (const Nat &n : opts.inputs) state.inputs.push_back(n);
  state.tidx[root_name] = 0;
  state.dag.threads.push_back(CostDag::Thread{root_name, prio_bot(), 0});
  ExprPtr v = cost_cmd(state, root_name, prio_bot(), m);
  CostResult result;
  result.value = v;
  result.dag = std::move(state.dag);
  result.record = std::move(state.record);
  result.sig = std::move(state.sig);
  return result;
}

std::pair<ExprPtr, int64_t> cost_expr_standalone(const ExprPtr &e,
                                                 const CostOptions &opts) {
  PartialOrder store;
  CostState state{&store, opts.fuel};
  for (const Nat &n : opts.inputs) state.inputs.push_back(n);
  return cost_expr(state, e);
}

// ---------------------------------------------------------------------------
// Sequential composition

CostDag seq_compose(const CostDag &g1, Ident a, const CostDag &g2) {
  if (g1.thread_index(a) < 0 || g2.thread_index(a) < 0)
    fail(errcode::NameClash,
         fmt::format("seq_compose: thread {} must be in both graphs", str(a)));
  for (const auto &t : g2.threads)
    if (t.name != a && g1.thread_index(t.name) >= 0)
      fail(errcode::NameClash,
           fmt::format("seq_compose: thread {} occurs in both graphs",
                       str(t.name)));
  CostDag out = g1;
  int64_t shift = g1.find(a)->length;
  out.threads[g1.thread_index(a)].length += g2.find(a)->length;
  for (const auto &t : g2.threads)
    if (t.name != a) out.threads.push_back(t);
  auto shift_vertex = [&](VertexId v) {
    if (v.thread == a) v.index += shift;
    return v;
  };
  for (const auto &e : g2.spawn_edges)
    out.spawn_edges.push_back(SpawnEdge{shift_vertex(e.from), e.child});
  for (const auto &e : g2.join_edges)
    out.join_edges.push_back(JoinEdge{e.src, shift_vertex(e.to)});
  for (const auto &e : g2.aux_edges)
    out.aux_edges.emplace_back(shift_vertex(e.first), shift_vertex(e.second));
  return out;
}

// ---------------------------------------------------------------------------
// Adjacency view

DagView::DagView(const CostDag &g) : dag(&g) {
  thread_first.assign(g.threads.size(), -1);
  for (size_t i = 0; i < g.threads.size(); ++i) {
    thread_of[g.threads[i].name] = static_cast<int>(i);
    if (g.threads[i].length > 0)
      thread_first[i] = static_cast<int64_t>(vertices.size());
    for (int64_t k = 0; k < g.threads[i].length; ++k)
      vertices.push_back(VertexId{g.threads[i].name, k});
  }
  preds.assign(vertices.size(), {});
  succs.assign(vertices.size(), {});
  auto add_edge = [&](int from, int to) {
    preds[to].push_back(from);
    succs[from].push_back(to);
  };
  // thread edges
  for (size_t i = 0; i < g.threads.size(); ++i) {
    int64_t first = thread_first[i];
    for (int64_t k = 1; k < g.threads[i].length; ++k)
      add_edge(static_cast<int>(first + k - 1), static_cast<int>(first + k));
  }
  auto vid = [&](const VertexId &v) { return vertex_id(v); };
  // spawn edges: from vertex to child's first vertex
  for (const auto &e : g.spawn_edges) {
    int ci = thread_of.at(e.child);
    if (g.threads[ci].length == 0) continue;
    add_edge(vid(e.from), static_cast<int>(thread_first[ci]));
  }
  // join edges: from the source thread's last vertex. An empty source thread
  // finished the instant it was spawned, so the dependence falls back to its
  // spawn vertex.
  for (const auto &e : g.join_edges) {
    int si = thread_of.at(e.src);
    if (g.threads[si].length > 0) {
      add_edge(static_cast<int>(thread_first[si] + g.threads[si].length - 1),
               vid(e.to));
    } else {
      for (const auto &se : g.spawn_edges)
        if (se.child == e.src) {
          add_edge(vid(se.from), vid(e.to));
          break;
        }
    }
  }
}

int DagView::vertex_id(const VertexId &v) const {
  auto it = thread_of.find(v.thread);
  if (it == thread_of.end())
    fail(errcode::BadDag, fmt::format("unknown thread {}", str(v.thread)));
  const auto &t = dag->threads[it->second];
  if (v.index < 0 || v.index >= t.length)
    fail(errcode::BadDag,
         fmt::format("vertex {}:{} out of range", str(v.thread), v.index));
  return static_cast<int>(thread_first[it->second] + v.index);
}

Priority DagView::prio_of(int v) const {
  return dag->threads[thread_of.at(vertices[v].thread)].prio;
}

// ---------------------------------------------------------------------------
// Metrics

int64_t priority_work(const CostDag &g, const PartialOrder &store, Ident rho) {
  int64_t count = 0;
  for (const auto &t : g.threads)
    if (!store.strictly_less(t.prio.name, rho)) count += t.length;
  return count;
}

namespace {

std::vector<bool> ancestors_of(const DagView &view, int v, bool proper) {
  std::vector<bool> seen(view.vertices.size(), false);
  std::deque<int> work{v};
  std::vector<bool> visited(view.vertices.size(), false);
  visited[v] = true;
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    for (int p : view.preds[u])
      if (!visited[p]) {
        visited[p] = true;
        work.push_back(p);
      }
  }
  seen = visited;
  if (proper) seen[v] = false;
  return seen;
}

std::vector<bool> descendants_of(const DagView &view, int v, bool proper) {
  std::vector<bool> visited(view.vertices.size(), false);
  std::deque<int> work{v};
  visited[v] = true;
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    for (int s : view.succs[u])
      if (!visited[s]) {
        visited[s] = true;
        work.push_back(s);
      }
  }
  if (proper) visited[v] = false;
  return visited;
}

std::vector<int> topo_order(const DagView &view) {
  std::vector<int> indeg(view.vertices.size(), 0);
  for (size_t v = 0; v < view.vertices.size(); ++v)
    indeg[v] = static_cast<int>(view.preds[v].size());
  std::deque<int> ready;
  for (size_t v = 0; v < view.vertices.size(); ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int s : view.succs[v])
      if (--indeg[s] == 0) ready.push_back(s);
  }
  if (order.size() != view.vertices.size())
    fail(errcode::BadDag, "graph has a cycle");
  return order;
}

}  // namespace

int64_t a_span(const CostDag &g, const PartialOrder &store, Ident a) {
  (void)store;
  const CostDag::Thread *t = g.find(a);
  if (!t) fail(errcode::BadDag, fmt::format("no thread named {}", str(a)));
  if (t->length == 0)
    fail(errcode::BadDag, fmt::format("thread {} is empty", str(a)));
  DagView view(g);
  std::vector<int64_t> dist(view.vertices.size(), 0);
  for (int v : topo_order(view)) {
    int64_t best = 0;
    for (int p : view.preds[v]) best = std::max(best, dist[p]);
    dist[v] = best + 1;
  }
  int last = view.vertex_id(VertexId{a, t->length - 1});
  return dist[last];
}

CostDag competitor_work(const CostDag &g, Ident a) {
  const CostDag::Thread *ta = g.find(a);
  if (!ta) fail(errcode::BadDag, fmt::format("no thread named {}", str(a)));
  if (ta->length == 0) return g;  // trivially live across the whole graph
  DagView view(g);
  int s = view.vertex_id(VertexId{a, 0});
  int t = view.vertex_id(VertexId{a, ta->length - 1});
  std::vector<bool> removed_anc = ancestors_of(view, s, /*proper=*/true);
  std::vector<bool> removed_desc = descendants_of(view, t, /*proper=*/true);

  // Ancestor sets are prefix-closed per thread and descendant sets are
  // suffix-closed, so what remains of each thread is one contiguous segment.
  CostDag out;
  std::unordered_map<Ident, int64_t> lo_of;
  for (size_t i = 0; i < g.threads.size(); ++i) {
    const auto &tr = g.threads[i];
    int64_t lo = 0, hi = tr.length;
    while (lo < hi) {
      int v = view.vertex_id(VertexId{tr.name, lo});
      if (removed_anc[v] || removed_desc[v])
        ++lo;
      else
        break;
    }
    while (hi > lo) {
      int v = view.vertex_id(VertexId{tr.name, hi - 1});
      if (removed_anc[v] || removed_desc[v])
        --hi;
      else
        break;
    }
    if (hi > lo || tr.name == a || tr.length == 0) {
      lo_of[tr.name] = lo;
      out.threads.push_back(CostDag::Thread{tr.name, tr.prio, hi - lo});
    }
  }
  auto kept = [&](const VertexId &v) {
    auto it = lo_of.find(v.thread);
    if (it == lo_of.end()) return false;
    int64_t lo = it->second;
    const CostDag::Thread *nt = out.find(v.thread);
    return v.index >= lo && v.index < lo + nt->length;
  };
  for (const auto &e : g.spawn_edges) {
    // the edge's implicit target is the child's original first vertex
    const CostDag::Thread *child = g.find(e.child);
    if (!kept(e.from)) continue;
    if (child->length == 0) {
      if (out.find(e.child))
        out.spawn_edges.push_back(
            SpawnEdge{VertexId{e.from.thread, e.from.index - lo_of[e.from.thread]},
                      e.child});
      continue;
    }
    if (!kept(VertexId{e.child, 0})) continue;
    out.spawn_edges.push_back(SpawnEdge{
        VertexId{e.from.thread, e.from.index - lo_of[e.from.thread]}, e.child});
  }
  for (const auto &e : g.join_edges) {
    const CostDag::Thread *src = g.find(e.src);
    if (!kept(e.to)) continue;
    if (src->length > 0 && !kept(VertexId{e.src, src->length - 1})) continue;
    if (src->length == 0 && !out.find(e.src)) continue;
    out.join_edges.push_back(JoinEdge{
        e.src, VertexId{e.to.thread, e.to.index - lo_of[e.to.thread]}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Well-formedness

bool check_well_formed(const CostDag &g, const PartialOrder &store,
                       WfWitness *witness) {
  DagView view(g);
  for (const auto &t : g.threads) {
    if (t.length == 0) continue;
    int first = view.vertex_id(VertexId{t.name, 0});
    int last = view.vertex_id(VertexId{t.name, t.length - 1});
    std::vector<bool> anc_last = ancestors_of(view, last, /*proper=*/false);
    std::vector<bool> anc_first = ancestors_of(view, first, /*proper=*/false);
    for (size_t v = 0; v < view.vertices.size(); ++v) {
      if (!anc_last[v] || anc_first[v]) continue;
      if (!store.leq(t.prio.name, view.prio_of(static_cast<int>(v)).name)) {
        if (witness)
          *witness = WfWitness{
              t.name, view.vertices[v],
              fmt::format("vertex {}:{} at priority {} precedes the end of "
                          "thread {} at priority {}",
                          str(view.vertices[v].thread), view.vertices[v].index,
                          str(view.prio_of(static_cast<int>(v)).name),
                          str(t.name), str(t.prio.name))};
        return false;
      }
    }
  }
  return true;
}

bool check_strongly_well_formed(const CostDag &g, const PartialOrder &store,
                                WfWitness *witness) {
  DagView view(g);
  for (const auto &e : g.join_edges) {
    int src_idx = g.thread_index(e.src);
    if (src_idx < 0) fail(errcode::BadDag, "join edge from unknown thread");
    const auto &src = g.threads[src_idx];
    const auto &dst = g.threads[g.thread_index(e.to.thread)];
    // (1) join edges go from higher-priority threads to lower
    if (!store.leq(dst.prio.name, src.prio.name)) {
      if (witness)
        *witness =
            WfWitness{e.src, e.to,
                      fmt::format("join edge {} -> {}:{} violates {} <= {}",
                                  str(e.src), str(e.to.thread), e.to.index,
                                  str(dst.prio.name), str(src.prio.name))};
      return false;
    }
    // (2) the sync target must be reachable through the syncing thread's own
    // lineage: a path from the spawn vertex that starts with a thread edge
    for (const auto &se : g.spawn_edges) {
      if (se.child != e.src) continue;
      const auto &spawner = g.threads[g.thread_index(se.from.thread)];
      bool ok = false;
      if (se.from.index + 1 < spawner.length) {
        int start =
            view.vertex_id(VertexId{se.from.thread, se.from.index + 1});
        std::vector<bool> desc =
            descendants_of(view, start, /*proper=*/false);
        ok = desc[view.vertex_id(e.to)];
      }
      if (!ok) {
        if (witness)
          *witness = WfWitness{
              e.src, e.to,
              fmt::format("no thread-edge-first path from spawn of {} to its "
                          "sync at {}:{}",
                          str(e.src), str(e.to.thread), e.to.index)};
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// DAG text format

std::string write_dag(const PartialOrder &store, const CostDag &dag) {
  std::string out;
  for (Ident c : store.consts())
    if (c != bot_name()) out += fmt::format("prio {}\n", str(c));
  for (const auto &[lo, hi] : store.edges())
    out += fmt::format("ord {} {}\n", str(lo), str(hi));
  for (const auto &t : dag.threads)
    out += fmt::format("thread {} {} {}\n", str(t.name), str(t.prio.name),
                       t.length);
  for (const auto &e : dag.spawn_edges)
    out += fmt::format("spawn {}:{} {}\n", str(e.from.thread), e.from.index,
                       str(e.child));
  for (const auto &e : dag.join_edges)
    out += fmt::format("join {} {}:{}\n", str(e.src), str(e.to.thread),
                       e.to.index);
  return out;
}

namespace {

VertexId parse_vertex(const std::string &token, int lineno) {
  size_t colon = token.rfind(':');
  if (colon == std::string::npos)
    fail(errcode::BadDag,
         fmt::format("line {}: expected thread:index, got '{}'", lineno,
                     token));
  try {
    return VertexId{intern(token.substr(0, colon)),
                    std::stoll(token.substr(colon + 1))};
  } catch (const std::exception &) {
    fail(errcode::BadDag,
         fmt::format("line {}: bad vertex index in '{}'", lineno, token));
  }
}

}  // namespace

DagFile parse_dag(const std::string &text) {
  DagFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    auto need = [&](std::string &dst) {
      if (!(ls >> dst))
        fail(errcode::BadDag,
             fmt::format("line {}: missing field after '{}'", lineno, word));
    };
    if (word == "prio") {
      std::string name;
      need(name);
      out.store.declare_priority(intern(name));
    } else if (word == "ord") {
      std::string lo, hi;
      need(lo);
      need(hi);
      out.store.declare_order(intern(lo), intern(hi));
    } else if (word == "thread") {
      std::string name, prio, len;
      need(name);
      need(prio);
      need(len);
      if (!out.store.declared(intern(prio)))
        fail(errcode::BadDag,
             fmt::format("line {}: unknown priority {}", lineno, prio));
      if (out.dag.thread_index(intern(name)) >= 0)
        fail(errcode::BadDag,
             fmt::format("line {}: duplicate thread {}", lineno, name));
      int64_t n;
      try {
        n = std::stoll(len);
      } catch (const std::exception &) {
        fail(errcode::BadDag,
             fmt::format("line {}: bad vertex count '{}'", lineno, len));
      }
      if (n < 0)
        fail(errcode::BadDag,
             fmt::format("line {}: negative vertex count", lineno));
      out.dag.threads.push_back(
          CostDag::Thread{intern(name), prio_const(intern(prio)), n});
    } else if (word == "spawn") {
      std::string from, child;
      need(from);
      need(child);
      VertexId v = parse_vertex(from, lineno);
      if (out.dag.thread_index(intern(child)) < 0)
        fail(errcode::BadDag,
             fmt::format("line {}: unknown child thread {}", lineno, child));
      const auto *t = out.dag.find(v.thread);
      if (!t || v.index < 0 || v.index >= t->length)
        fail(errcode::BadDag,
             fmt::format("line {}: spawn source out of range", lineno));
      out.dag.spawn_edges.push_back(SpawnEdge{v, intern(child)});
    } else if (word == "join") {
      std::string src, to;
      need(src);
      need(to);
      VertexId v = parse_vertex(to, lineno);
      if (out.dag.thread_index(intern(src)) < 0)
        fail(errcode::BadDag,
             fmt::format("line {}: unknown source thread {}", lineno, src));
      const auto *t = out.dag.find(v.thread);
      if (!t || v.index < 0 || v.index >= t->length)
        fail(errcode::BadDag,
             fmt::format("line {}: join target out of range", lineno));
      out.dag.join_edges.push_back(JoinEdge{intern(src), v});
    } else {
      fail(errcode::BadDag,
           fmt::format("line {}: unknown directive '{}'", lineno, word));
    }
  }
  DagView view(out.dag);
  topo_order(view);  // rejects cyclic graphs
  return out;
}

}  // namespace priml
