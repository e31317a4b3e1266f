#include "priml/correspond.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <deque>

namespace priml {

TraceDag trace_dag(const RunResult &r, int procs) {
  TraceDag out;
  for (const auto &st : r.stats)
    out.dag.threads.push_back(
        CostDag::Thread{st.id, st.prio, st.transitions});
  for (const auto &e : r.spawn_edges)
    out.dag.spawn_edges.push_back(
        SpawnEdge{VertexId{e.parent, e.parent_vertex}, e.child});
  for (const auto &e : r.join_edges)
    out.dag.join_edges.push_back(
        JoinEdge{e.src, VertexId{e.dst, e.dst_vertex}});
  out.schedule.procs = procs;
  for (const auto &step : r.step_log) {
    std::vector<VertexId> vs;
    for (const auto &[thread, idx] : step) vs.push_back(VertexId{thread, idx});
    out.schedule.steps.push_back(std::move(vs));
  }
  return out;
}

std::optional<std::unordered_map<Ident, Ident>> dag_isomorphism(
    const CostDag &a, const CostDag &b) {
  if (a.threads.size() != b.threads.size()) return std::nullopt;
  if (a.threads.empty()) return std::unordered_map<Ident, Ident>{};
  if (a.spawn_edges.size() != b.spawn_edges.size()) return std::nullopt;
  if (a.join_edges.size() != b.join_edges.size()) return std::nullopt;

  auto children_of = [](const CostDag &g, Ident t) {
    std::vector<SpawnEdge> out;
    for (const auto &e : g.spawn_edges)
      if (e.from.thread == t) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const auto &x, const auto &y) {
      return x.from.index < y.from.index;
    });
    return out;
  };

  std::unordered_map<Ident, Ident> map;
  std::deque<std::pair<Ident, Ident>> work;
  auto match = [&](Ident x, Ident y) {
    const auto *tx = a.find(x);
    const auto *ty = b.find(y);
    if (!tx || !ty) return false;
    if (!(tx->prio == ty->prio) || tx->length != ty->length) return false;
    map[x] = y;
    work.emplace_back(x, y);
    return true;
  };
  if (!match(a.threads[0].name, b.threads[0].name)) return std::nullopt;
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    auto cx = children_of(a, x);
    auto cy = children_of(b, y);
    if (cx.size() != cy.size()) return std::nullopt;
    for (size_t i = 0; i < cx.size(); ++i) {
      if (cx[i].from.index != cy[i].from.index) return std::nullopt;
      if (!match(cx[i].child, cy[i].child)) return std::nullopt;
    }
  }
  if (map.size() != a.threads.size()) return std::nullopt;  // unreferenced

  // join edges must correspond under the bijection
  auto key = [](const JoinEdge &e) {
    return fmt::format("{}|{}|{}", str(e.src), str(e.to.thread), e.to.index);
  };
  std::vector<std::string> ja, jb;
  for (const auto &e : a.join_edges)
    ja.push_back(key(JoinEdge{map.at(e.src),
                              VertexId{map.at(e.to.thread), e.to.index}}));
  for (const auto &e : b.join_edges) jb.push_back(key(e));
  std::sort(ja.begin(), ja.end());
  std::sort(jb.begin(), jb.end());
  if (ja != jb) return std::nullopt;
  return map;
}

CostDag rename_threads(const CostDag &g,
                       const std::unordered_map<Ident, Ident> &map) {
  CostDag out = g;
  for (auto &t : out.threads) t.name = map.at(t.name);
  for (auto &e : out.spawn_edges) {
    e.from.thread = map.at(e.from.thread);
    e.child = map.at(e.child);
  }
  for (auto &e : out.join_edges) {
    e.src = map.at(e.src);
    e.to.thread = map.at(e.to.thread);
  }
  return out;
}

Schedule rename_threads(const Schedule &s,
                        const std::unordered_map<Ident, Ident> &map) {
  Schedule out = s;
  for (auto &step : out.steps)
    for (auto &v : step) v.thread = map.at(v.thread);
  return out;
}

}  // namespace priml
