#include "priml/schedule.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace priml {

// ---------------------------------------------------------------------------
// Schedule predicates

namespace {

struct SimState {
  const DagView &view;
  std::vector<bool> done;
  std::vector<int> missing;  // unexecuted pred count

  explicit SimState(const DagView &v)
      : view(v), done(v.vertices.size(), false),
        missing(v.vertices.size(), 0) {
    for (size_t i = 0; i < v.vertices.size(); ++i)
      missing[i] = static_cast<int>(v.preds[i].size());
  }

  bool ready(int v) const { return !done[v] && missing[v] == 0; }

  int64_t ready_count() const {
    int64_t n = 0;
    for (size_t v = 0; v < done.size(); ++v)
      if (ready(static_cast<int>(v))) ++n;
    return n;
  }

  void execute(int v) {
    done[v] = true;
    for (int s : view.succs[v]) --missing[s];
  }
};

}  // namespace

bool schedule_valid(const Schedule &s, const CostDag &g, std::string *why) {
  DagView view(g);
  SimState st(view);
  std::vector<bool> seen(view.vertices.size(), false);
  auto explain = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  for (size_t step = 0; step < s.steps.size(); ++step) {
    if (s.steps[step].size() > static_cast<size_t>(s.procs))
      return explain(fmt::format("step {} uses more than P vertices", step + 1));
    for (const VertexId &v : s.steps[step]) {
      int id = view.vertex_id(v);
      if (seen[id])
        return explain(fmt::format("vertex {}:{} executed twice",
                                   str(v.thread), v.index));
      if (!st.ready(id))
        return explain(fmt::format("vertex {}:{} executed before its "
                                   "ancestors at step {}",
                                   str(v.thread), v.index, step + 1));
      seen[id] = true;
    }
    for (const VertexId &v : s.steps[step]) st.execute(view.vertex_id(v));
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      return explain(fmt::format("vertex {}:{} never executed",
                                 str(view.vertices[i].thread),
                                 view.vertices[i].index));
  return true;
}

bool schedule_greedy(const Schedule &s, const CostDag &g) {
  DagView view(g);
  SimState st(view);
  for (const auto &step : s.steps) {
    int64_t ready = st.ready_count();
    if (static_cast<int64_t>(step.size()) !=
        std::min<int64_t>(s.procs, ready))
      return false;
    for (const VertexId &v : step) st.execute(view.vertex_id(v));
  }
  return true;
}

bool schedule_prompt(const Schedule &s, const CostDag &g,
                     const PartialOrder &store) {
  DagView view(g);
  SimState st(view);
  for (const auto &step : s.steps) {
    std::vector<int> chosen;
    for (const VertexId &v : step) chosen.push_back(view.vertex_id(v));
    for (size_t v = 0; v < view.vertices.size(); ++v) {
      if (!st.ready(static_cast<int>(v))) continue;
      if (std::find(chosen.begin(), chosen.end(), static_cast<int>(v)) !=
          chosen.end())
        continue;
      // an unexecuted ready vertex must not strictly outrank any chosen one
      for (int c : chosen)
        if (store.strictly_less(view.prio_of(c).name,
                                view.prio_of(static_cast<int>(v)).name))
          return false;
    }
    for (int c : chosen) st.execute(c);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Schedulers

namespace {

std::vector<int> ready_list(const SimState &st) {
  std::vector<int> out;
  for (size_t v = 0; v < st.done.size(); ++v)
    if (st.ready(static_cast<int>(v))) out.push_back(static_cast<int>(v));
  return out;
}

// Vertices of maximal priority among `candidates`.
std::vector<int> maximal_of(const DagView &view, const PartialOrder &store,
                            const std::vector<int> &candidates) {
  std::vector<int> out;
  for (int v : candidates) {
    bool dominated = false;
    for (int u : candidates) {
      if (u == v) continue;
      if (store.strictly_less(view.prio_of(v).name, view.prio_of(u).name)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(v);
  }
  return out;
}

int pick_det(const DagView &view, const PartialOrder &store,
             const std::vector<int> &candidates) {
  int best = candidates.front();
  for (int v : candidates) {
    int tv = store.total_index(view.prio_of(v).name);
    int tb = store.total_index(view.prio_of(best).name);
    if (tv > tb || (tv == tb && v < best)) best = v;
  }
  return best;
}

}  // namespace

Schedule prompt_schedule(const CostDag &g, const PartialOrder &store, int P,
                         uint64_t seed, bool det) {
  DagView view(g);
  SimState st(view);
  Rng rng(seed);
  Schedule sched;
  sched.procs = P;
  int64_t remaining = view.count();
  while (remaining > 0) {
    std::vector<int> ready = ready_list(st);
    std::vector<VertexId> step;
    while (static_cast<int>(step.size()) < P && !ready.empty()) {
      std::vector<int> maximal = maximal_of(view, store, ready);
      int pick = det ? pick_det(view, store, maximal)
                     : maximal[rng.below(maximal.size())];
      step.push_back(view.vertices[pick]);
      ready.erase(std::find(ready.begin(), ready.end(), pick));
    }
    for (const VertexId &v : step) st.execute(view.vertex_id(v));
    remaining -= static_cast<int64_t>(step.size());
    sched.steps.push_back(std::move(step));
  }
  return sched;
}

void FairnessCriterion::validate() const {
  double sum = 0;
  for (const auto &[name, w] : weights) {
    if (w < 0 || w > 1)
      fail(errcode::Io,
           fmt::format("criterion weight for {} out of [0,1]", str(name)));
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(errcode::Io,
         fmt::format("criterion weights sum to {} (expected 1)", sum));
}

double FairnessCriterion::mass_not_below(const PartialOrder &store,
                                         Ident rho) const {
  double mass = 0;
  for (const auto &[name, w] : weights)
    if (!store.strictly_less(name, rho)) mass += w;
  return mass;
}

Schedule fair_prompt_schedule(const CostDag &g, const PartialOrder &store,
                              int P, const FairnessCriterion &criterion,
                              uint64_t seed) {
  criterion.validate();
  DagView view(g);
  SimState st(view);
  Rng rng(seed);
  Schedule sched;
  sched.procs = P;
  int64_t remaining = view.count();
  while (remaining > 0) {
    std::vector<int> ready = ready_list(st);
    std::vector<VertexId> step;
    auto take = [&](int pick) {
      step.push_back(view.vertices[pick]);
      ready.erase(std::find(ready.begin(), ready.end(), pick));
    };
    // processors draw priorities from the criterion
    int fallbacks = 0;
    for (int q = 0; q < P; ++q) {
      double r = rng.real();
      Ident drawn;
      double acc = 0;
      for (const auto &[name, w] : criterion.weights) {
        acc += w;
        drawn = name;
        if (r < acc) break;
      }
      std::vector<int> at_prio;
      for (int v : ready)
        if (view.prio_of(v).name == drawn) at_prio.push_back(v);
      if (at_prio.empty()) {
        ++fallbacks;
        continue;
      }
      take(at_prio[rng.below(at_prio.size())]);
    }
    // unsatisfied processors default to the prompt policy
    for (int q = 0; q < fallbacks && !ready.empty(); ++q) {
      std::vector<int> maximal = maximal_of(view, store, ready);
      take(maximal[rng.below(maximal.size())]);
    }
    for (const VertexId &v : step) st.execute(view.vertex_id(v));
    remaining -= static_cast<int64_t>(step.size());
    sched.steps.push_back(std::move(step));
  }
  return sched;
}

// ---------------------------------------------------------------------------
// Response time and bounds

int64_t response_time(const Schedule &s, const CostDag &g, Ident a) {
  const CostDag::Thread *t = g.find(a);
  if (!t)
    fail(errcode::BadDag,
         fmt::format("thread {} not in the graph", str(a)));
  DagView view(g);
  std::vector<int64_t> exec_step(view.vertices.size(), -1);
  for (size_t step = 0; step < s.steps.size(); ++step)
    for (const VertexId &v : s.steps[step])
      exec_step[view.vertex_id(v)] = static_cast<int64_t>(step) + 1;

  auto ready_step_of = [&](int vertex) {
    int64_t r = 0;
    for (int p : view.preds[vertex]) {
      if (exec_step[p] < 0)
        fail(errcode::BadDag, "schedule does not cover the thread's ancestors");
      r = std::max(r, exec_step[p]);
    }
    return r;
  };

  if (t->length == 0) {
    // An empty thread is done the step after it becomes ready; its spawn
    // vertex (if any) defines readiness.
    for (const auto &e : g.spawn_edges)
      if (e.child == a) {
        (void)exec_step[view.vertex_id(e.from)];
        return 1;
      }
    return 1;
  }
  int first = view.vertex_id(VertexId{a, 0});
  int last = view.vertex_id(VertexId{a, t->length - 1});
  if (exec_step[last] < 0)
    fail(errcode::BadDag,
         fmt::format("thread {} is not fully scheduled", str(a)));
  return exec_step[last] - ready_step_of(first);
}

BoundReport check_bound(const CostDag &g, const PartialOrder &store, Ident a,
                        int P, const Schedule &sched) {
  BoundReport report;
  report.procs = P;
  report.well_formed = check_well_formed(g, store);
  report.response = response_time(sched, g, a);
  CostDag comp = competitor_work(g, a);
  const CostDag::Thread *t = g.find(a);
  report.work = priority_work(comp, store, t->prio.name);
  report.span = t->length == 0 ? 0 : a_span(comp, store, a);
  // T <= W/P + span, compared exactly: T*P <= W + span*P
  report.holds = report.response * P <= report.work + report.span * P;
  return report;
}

FairReport check_fair_bound(const CostDag &g, const PartialOrder &store,
                            Ident a, int P, const FairnessCriterion &criterion,
                            Ident rho_prime, int64_t trials, uint64_t seed) {
  criterion.validate();
  const CostDag::Thread *t = g.find(a);
  if (!t)
    fail(errcode::BadDag, fmt::format("thread {} not in the graph", str(a)));
  if (!store.leq(rho_prime, t->prio.name))
    fail(errcode::Io,
         fmt::format("rho' = {} must be <= the thread priority {}",
                     str(rho_prime), str(t->prio.name)));
  FairReport report;
  report.trials = trials;
  report.mass = criterion.mass_not_below(store, rho_prime);
  if (report.mass <= 0)
    fail(errcode::ZeroMass,
         fmt::format("criterion mass at priorities not below {} is zero",
                     str(rho_prime)));
  CostDag comp = competitor_work(g, a);
  int64_t work = priority_work(comp, store, rho_prime);
  int64_t span = t->length == 0 ? 0 : a_span(comp, store, a);
  report.rhs = (static_cast<double>(work) / P + static_cast<double>(span)) /
               report.mass;

  double sum = 0, sumsq = 0;
  for (int64_t i = 0; i < trials; ++i) {
    Schedule s = fair_prompt_schedule(g, store, P, criterion, seed + i);
    double r = static_cast<double>(response_time(s, g, a));
    sum += r;
    sumsq += r * r;
  }
  report.mean_response = sum / trials;
  double var = trials > 1
                   ? (sumsq - sum * sum / trials) / (trials - 1)
                   : 0.0;
  report.std_error = std::sqrt(std::max(0.0, var) / trials);
  report.holds = report.mean_response <= report.rhs + 3 * report.std_error;
  return report;
}

// ---------------------------------------------------------------------------
// Generators

PartialOrder random_store(int n_prios, uint64_t seed) {
  Rng rng(seed);
  PartialOrder store;
  std::vector<Ident> names;
  for (int i = 0; i < n_prios; ++i) {
    Ident name = intern(fmt::format("p{}", i));
    store.declare_priority(name);
    names.push_back(name);
  }
  // random acyclic edges: only from earlier to later in a random permutation
  std::vector<int> perm(n_prios);
  for (int i = 0; i < n_prios; ++i) perm[i] = i;
  for (int i = n_prios - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);
  for (int i = 0; i < n_prios; ++i)
    for (int j = i + 1; j < n_prios; ++j)
      if (rng.below(100) < 30)
        store.declare_order(names[perm[i]], names[perm[j]]);
  return store;
}

CostDag random_wellformed_dag(int n_threads, int max_len,
                              const PartialOrder &store, uint64_t seed) {
  Rng rng(seed);
  const std::vector<Ident> &consts = store.consts();
  CostDag g;
  struct Spawned {
    int parent;
    int64_t spawn_idx;
  };
  std::vector<Spawned> meta;

  auto rand_prio = [&] {
    return prio_const(consts[rng.below(consts.size())]);
  };

  g.threads.push_back(
      CostDag::Thread{intern("t0"), rand_prio(),
                      1 + static_cast<int64_t>(rng.below(max_len))});
  meta.push_back(Spawned{-1, -1});

  for (int i = 1; i < n_threads; ++i) {
    // pick a parent with at least 2 remaining vertices after its last spawn,
    // so the spawn vertex always has a thread-edge successor
    int parent = static_cast<int>(rng.below(g.threads.size()));
    int64_t plen = g.threads[parent].length;
    int64_t min_idx = 0;
    for (const auto &e : g.spawn_edges)
      if (e.from.thread == g.threads[parent].name)
        min_idx = std::max(min_idx, e.from.index + 1);
    if (min_idx > plen - 2) {
      // grow the parent so there is room for spawn + later vertex
      g.threads[parent].length = min_idx + 2;
      plen = g.threads[parent].length;
    }
    int64_t spawn_idx =
        min_idx + static_cast<int64_t>(rng.below(plen - 1 - min_idx));
    Ident name = intern(fmt::format("t{}", i));
    g.threads.push_back(CostDag::Thread{
        name, rand_prio(), 1 + static_cast<int64_t>(rng.below(max_len))});
    g.spawn_edges.push_back(
        SpawnEdge{VertexId{g.threads[parent].name, spawn_idx}, name});
    meta.push_back(Spawned{parent, spawn_idx});

    // maybe join the child back into the parent, after the spawn vertex;
    // allowed only when parent priority <= child priority
    if (store.leq(g.threads[parent].prio.name, g.threads[i].prio.name) &&
        rng.below(100) < 70) {
      int64_t join_idx =
          spawn_idx + 1 + static_cast<int64_t>(
                              rng.below(g.threads[parent].length - spawn_idx - 1));
      g.join_edges.push_back(
          JoinEdge{name, VertexId{g.threads[parent].name, join_idx}});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Exhaustive minimum response time

namespace {

struct ExhaustiveSolver {
  const DagView &view;
  int P;
  int s_vertex, t_vertex;
  uint32_t all_mask;
  std::map<uint32_t, int64_t> memo_pre;   // min T from mask, a not yet ready
  std::map<uint32_t, int64_t> memo_post;  // min steps to execute t from mask

  uint32_t ready_mask(uint32_t done) const {
    uint32_t ready = 0;
    for (size_t v = 0; v < view.vertices.size(); ++v) {
      if (done & (1u << v)) continue;
      bool ok = true;
      for (int p : view.preds[v])
        if (!(done & (1u << p))) {
          ok = false;
          break;
        }
      if (ok) ready |= 1u << v;
    }
    return ready;
  }

  bool a_ready(uint32_t done) const {
    for (int p : view.preds[s_vertex])
      if (!(done & (1u << p))) return false;
    return true;
  }

  // enumerate nonempty subsets of `ready` with popcount <= P
  template <typename F>
  void subsets(uint32_t ready, F f) {
    for (uint32_t sub = ready; sub; sub = (sub - 1) & ready)
      if (__builtin_popcount(sub) <= P) f(sub);
  }

  int64_t solve_post(uint32_t done) {
    if (done & (1u << t_vertex)) return 0;
    auto it = memo_post.find(done);
    if (it != memo_post.end()) return it->second;
    uint32_t ready = ready_mask(done);
    int64_t best = INT64_MAX / 4;
    subsets(ready, [&](uint32_t sub) {
      best = std::min(best, 1 + solve_post(done | sub));
    });
    memo_post[done] = best;
    return best;
  }

  int64_t solve_pre(uint32_t done) {
    if (a_ready(done)) return solve_post(done);
    auto it = memo_pre.find(done);
    if (it != memo_pre.end()) return it->second;
    uint32_t ready = ready_mask(done);
    int64_t best = INT64_MAX / 4;
    subsets(ready, [&](uint32_t sub) {
      uint32_t next = done | sub;
      // steps before a is ready are free for a's response time
      best = std::min(best, solve_pre(next));
    });
    memo_pre[done] = best;
    return best;
  }
};

}  // namespace

int64_t exhaustive_min_response(const CostDag &g, Ident a, int P) {
  if (g.total_vertices() > 14)
    fail(errcode::TooLarge,
         "exhaustive search is capped at 14 vertices");
  const CostDag::Thread *t = g.find(a);
  if (!t)
    fail(errcode::BadDag, fmt::format("thread {} not in the graph", str(a)));
  if (t->length == 0) return 1;
  DagView view(g);
  ExhaustiveSolver solver{view, P, view.vertex_id(VertexId{a, 0}),
                          view.vertex_id(VertexId{a, t->length - 1}),
                          (1u << view.vertices.size()) - 1};
  return solver.solve_pre(0);
}

}  // namespace priml
