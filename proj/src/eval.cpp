#include "priml/eval.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <deque>

#include "priml/pretty.hpp"

namespace priml {

uint64_t Rng::next() {
  // splitmix64
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rng::below(uint64_t n) {
  if (n <= 1) return 0;
  // rejection sampling keeps the draw exactly uniform
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % n;
}

double Rng::real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Expression transitions (Fig. 10 shapes)

namespace {

[[noreturn]] void stuck(SourceSpan span, const std::string &what) {
  fail(errcode::Stuck, span,
       fmt::format("stuck: no dynamic rule applies to {}", what));
}

}  // namespace

ExprPtr step_expr(const Signature &sig, StepIo &io, const ExprPtr &e) {
  switch (e->kind) {
    case ExprKind::Let: {
      if (is_value(e->e1)) return subst_expr(e->e1, e->var, e->e2);
      return e_let(e->var, step_expr(sig, io, e->e1), e->e2, e->span);
    }
    case ExprKind::Ifz: {
      if (e->e1->kind != ExprKind::Num) stuck(e->span, "ifz on a non-numeral");
      if (e->e1->num == 0) return e->e2;
      return subst_expr(e_num(e->e1->num - 1), e->var, e->e3);
    }
    case ExprKind::App: {
      if (e->e1->kind != ExprKind::Fun)
        stuck(e->span, "application of a non-function");
      if (!is_value(e->e2)) stuck(e->span, "application to a non-value");
      return subst_expr(e->e2, e->e1->var, e->e1->e1);
    }
    case ExprKind::EPair:
      if (!is_value(e->e1) || !is_value(e->e2))
        stuck(e->span, "pair of non-values");
      return e_pair_v(e->e1, e->e2, e->span);
    case ExprKind::Fst:
      if (e->e1->kind != ExprKind::PairV) stuck(e->span, "fst of a non-pair");
      return e->e1->e1;
    case ExprKind::Snd:
      if (e->e1->kind != ExprKind::PairV) stuck(e->span, "snd of a non-pair");
      return e->e1->e2;
    case ExprKind::EInl:
      if (!is_value(e->e1)) stuck(e->span, "inl of a non-value");
      return e_inl_v(e->e1, e->type, e->span);
    case ExprKind::EInr:
      if (!is_value(e->e1)) stuck(e->span, "inr of a non-value");
      return e_inr_v(e->e1, e->type, e->span);
    case ExprKind::Case: {
      if (e->e1->kind == ExprKind::InlV)
        return subst_expr(e->e1->e1, e->var, e->e2);
      if (e->e1->kind == ExprKind::InrV)
        return subst_expr(e->e1->e1, e->var2, e->e3);
      stuck(e->span, "case on a non-injection");
    }
    case ExprKind::Output: {
      if (e->e1->kind != ExprKind::Num)
        stuck(e->span, "output of a non-numeral");
      io.outputs->push_back(e->e1->num);
      return e_unit(e->span);
    }
    case ExprKind::Input: {
      if (io.inputs->empty()) {
        io.input_underflow = true;
        return e_num(Nat(0), e->span);
      }
      Nat n = io.inputs->front();
      io.inputs->pop_front();
      return e_num(std::move(n), e->span);
    }
    case ExprKind::PrApp: {
      if (e->e1->kind != ExprKind::PrLam)
        stuck(e->span, "priority application of a non-abstraction");
      return subst_prio(e->prio, e->e1->var, e->e1->e1);
    }
    case ExprKind::Fix:
      return subst_expr(e, e->var, e->e1);
    default:
      stuck(e->span, fmt::format("value form {}", show(e)));
  }
}

// ---------------------------------------------------------------------------
// Command transitions (Fig. 11 shapes)

CmdStep step_cmd(const Signature &sig, StepIo &io, const CmdPtr &m,
                 const std::function<const ExprPtr *(Ident)> &retained,
                 const std::function<Ident()> &fresh_tid) {
  CmdStep out;
  switch (m->kind) {
    case CmdKind::Bind: {
      const ExprPtr &e = m->expr;
      if (e->kind == ExprKind::CmdVal) {
        const CmdPtr &m1 = e->cmd;
        if (m1->kind == CmdKind::Ret && is_value(m1->expr)) {
          // D-Bind3
          out.next = subst_expr(m1->expr, m->var, m->rest);
          return out;
        }
        // D-Bind2
        CmdStep inner = step_cmd(sig, io, m1, retained, fresh_tid);
        if (inner.blocked) return inner;
        out.next = c_bind(e_cmd(e->prio, inner.next, e->span), m->var, m->rest,
                          m->span);
        out.action = inner.action;
        out.spawned = inner.spawned;
        return out;
      }
      if (is_value(e)) stuck(m->span, "bind of a non-command value");
      // D-Bind1
      out.next = c_bind(step_expr(sig, io, e), m->var, m->rest, m->span);
      return out;
    }
    case CmdKind::Spawn: {
      Ident b = fresh_tid();
      out.spawned = SpawnRequest{b, m->prio, m->ret_type, m->rest};
      out.next = c_ret(e_tid(b, m->span), m->span);
      return out;
    }
    case CmdKind::Sync: {
      const ExprPtr &e = m->expr;
      if (e->kind == ExprKind::Tid) {
        const ExprPtr *v = retained(e->tid);
        if (!v) {
          out.blocked = true;
          out.blocked_on = e->tid;
          return out;
        }
        out.action = Action{ActionKind::SyncFrom, e->tid, *v};
        out.next = c_ret(*v, m->span);
        return out;
      }
      if (is_value(e)) stuck(m->span, "sync of a non-thread value");
      out.next = c_sync(step_expr(sig, io, e), m->span);  // D-Sync1
      return out;
    }
    case CmdKind::Ret: {
      if (is_value(m->expr)) stuck(m->span, "step of a finished command");
      out.next = c_ret(step_expr(sig, io, m->expr), m->span);
      return out;
    }
  }
  stuck(m->span, "unreachable command");
}

std::optional<Ident> pending_sync_target(const CmdPtr &m) {
  switch (m->kind) {
    case CmdKind::Bind:
      if (m->expr->kind == ExprKind::CmdVal) {
        const CmdPtr &m1 = m->expr->cmd;
        if (m1->kind == CmdKind::Ret && is_value(m1->expr)) return std::nullopt;
        return pending_sync_target(m1);
      }
      return std::nullopt;
    case CmdKind::Sync:
      if (m->expr->kind == ExprKind::Tid) return m->expr->tid;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// The scheduler loop

namespace {

struct TState {
  Ident id;
  Priority prio;
  int prio_slot = 0;
  CmdPtr cmd;
  TypePtr ret_type;
  int64_t transitions = 0;
  int64_t ready_step = 0;
  int64_t finish_step = -1;
  bool finished = false;
  ExprPtr value;
  bool parked = false;
  std::vector<int> waiters;
  int home = 0;
  int64_t spawn_seq = 0;
};

struct Machine {
  const PartialOrder &store;
  RunOptions opts;
  std::deque<TState> threads;
  std::unordered_map<Ident, int> tindex;
  Signature sig;
  std::vector<std::vector<std::deque<int>>> dq;  // [proc][prio slot]
  std::deque<Nat> inputs;
  RunResult result;
  Rng rng;
  int64_t spawn_counter = 0;
  StepIo io;

  Machine(const PartialOrder &s, const RunOptions &o)
      : store(s), opts(o), rng(o.seed) {
    dq.assign(opts.procs, std::vector<std::deque<int>>(
                              store.total_order().size()));
    for (const Nat &n : opts.inputs) inputs.push_back(n);
    io.inputs = &inputs;
    io.outputs = &result.output_log;
  }

  Ident fresh_tid() {
    return intern(fmt::format("t{}", spawn_counter++));
  }

  const ExprPtr *retained_value(Ident b) {
    auto it = tindex.find(b);
    if (it == tindex.end()) return nullptr;
    const TState &t = threads[it->second];
    return t.finished ? &t.value : nullptr;
  }

  void enqueue(int idx, int proc, bool front) {
    TState &t = threads[idx];
    t.home = proc;
    if (front)
      dq[proc][t.prio_slot].push_front(idx);
    else
      dq[proc][t.prio_slot].push_back(idx);
  }

  void finish_thread(int idx, int64_t step) {
    TState &t = threads[idx];
    t.finished = true;
    t.finish_step = step;
    t.value = t.cmd->expr;
    std::vector<int> waiters = std::move(t.waiters);
    t.waiters.clear();
    for (int w : waiters) {
      threads[w].parked = false;
      enqueue(w, threads[w].home, false);
    }
  }

  int add_thread(Ident id, Priority prio, CmdPtr cmd, TypePtr ret_type,
                 int64_t step, int proc) {
    if (!prio.is_const())
      fail(errcode::Stuck, cmd->span,
           "spawn at an uninstantiated priority variable");
    TState t;
    t.id = id;
    t.prio = prio;
    t.prio_slot = store.total_index(prio.name);
    t.cmd = std::move(cmd);
    t.ret_type = std::move(ret_type);
    t.ready_step = step;
    t.home = proc;
    t.spawn_seq = static_cast<int64_t>(threads.size());
    sig.add(id, t.ret_type, prio);
    threads.push_back(std::move(t));
    int idx = static_cast<int>(threads.size()) - 1;
    tindex[id] = idx;
    TState &nt = threads[idx];
    if (nt.cmd->kind == CmdKind::Ret && is_value(nt.cmd->expr)) {
      finish_thread(idx, step);
    } else if (auto target = pending_sync_target(nt.cmd)) {
      auto it = tindex.find(*target);
      if (it != tindex.end() && !threads[it->second].finished) {
        nt.parked = true;
        threads[it->second].waiters.push_back(idx);
      } else {
        enqueue(idx, proc, false);
      }
    } else {
      enqueue(idx, proc, false);
    }
    return idx;
  }

  bool done() const {
    if (opts.join_all) {
      for (const auto &t : threads)
        if (!t.finished) return false;
      return true;
    }
    return threads[0].finished;
  }

  void deal_phase() {
    if (opts.procs < 2) return;
    for (int q1 = 0; q1 < opts.procs; ++q1) {
      size_t pending = 0;
      for (const auto &d : dq[q1]) pending += d.size();
      if (pending < 2) continue;
      int q2 = static_cast<int>(rng.below(opts.procs - 1));
      if (q2 >= q1) ++q2;
      std::vector<int> slots;
      for (size_t s = 0; s < dq[q1].size(); ++s)
        if (!dq[q1][s].empty()) slots.push_back(static_cast<int>(s));
      int slot = opts.lowest_deal
                     ? slots.front()
                     : slots[rng.below(slots.size())];
      if (!dq[q2][slot].empty()) continue;
      int moved = dq[q1][slot].back();
      dq[q1][slot].pop_back();
      threads[moved].home = q2;
      dq[q2][slot].push_back(moved);
    }
  }

  // Prompt assignment: repeatedly pick a ready thread no other ready thread
  // strictly outranks; prefer each free processor's own top work.
  std::vector<std::pair<int, int>> select_phase() {
    std::vector<int> avail;
    for (int q = 0; q < opts.procs; ++q)
      for (const auto &d : dq[q])
        for (int idx : d) avail.push_back(idx);

    std::vector<std::pair<int, int>> selected;  // (thread, proc)
    std::vector<bool> proc_free(opts.procs, true);
    int free_count = opts.procs;

    auto maximal = [&](int idx) {
      for (int other : avail) {
        if (other == idx) continue;
        if (store.strictly_less(threads[idx].prio.name,
                                threads[other].prio.name))
          return false;
      }
      return true;
    };

    while (free_count > 0 && !avail.empty()) {
      int pick = -1, proc = -1;
      // Locality first: a free processor whose top-of-highest-deque is
      // globally maximal takes it.
      for (int q = 0; q < opts.procs && pick < 0; ++q) {
        if (!proc_free[q]) continue;
        for (int s = static_cast<int>(dq[q].size()) - 1; s >= 0; --s) {
          if (dq[q][s].empty()) continue;
          int cand = dq[q][s].front();
          if (maximal(cand)) {
            pick = cand;
            proc = q;
          }
          break;  // only the locally highest slot counts
        }
      }
      if (pick < 0) {
        // Otherwise take the best remaining thread anywhere.
        for (int idx : avail) {
          if (!maximal(idx)) continue;
          if (pick < 0) {
            pick = idx;
            continue;
          }
          int a = store.total_index(threads[idx].prio.name);
          int b = store.total_index(threads[pick].prio.name);
          if (a > b || (a == b && threads[idx].spawn_seq <
                                      threads[pick].spawn_seq))
            pick = idx;
        }
        proc = threads[pick].home;
        if (!proc_free[proc])
          for (int q = 0; q < opts.procs; ++q)
            if (proc_free[q]) {
              proc = q;
              break;
            }
      }
      auto &d = dq[threads[pick].home][threads[pick].prio_slot];
      d.erase(std::find(d.begin(), d.end(), pick));
      avail.erase(std::find(avail.begin(), avail.end(), pick));
      selected.emplace_back(pick, proc);
      proc_free[proc] = false;
      --free_count;

      // Promptness self-check: nothing still available strictly outranks the
      // thread we just took.
      for (int other : avail)
        if (store.strictly_less(threads[pick].prio.name,
                                threads[other].prio.name))
          fail(errcode::Audit, "prompt selection invariant violated");
    }
    std::sort(selected.begin(), selected.end(),
              [](const auto &a, const auto &b) { return a.second < b.second; });
    return selected;
  }

  void audit_pool();

  void execute(int64_t step, const std::vector<std::pair<int, int>> &sel) {
    result.step_log.emplace_back();
    for (auto [idx, proc] : sel) {
      CmdStep res =
          step_cmd(sig, io, threads[idx].cmd,
                   [this](Ident b) { return retained_value(b); },
                   [this] { return fresh_tid(); });
      if (res.blocked)
        fail(errcode::Audit,
             fmt::format("selected thread {} was blocked", str(threads[idx].id)));
      TState &t = threads[idx];
      t.cmd = res.next;
      int64_t vertex = t.transitions++;
      result.step_log.back().emplace_back(t.id, vertex);

      std::string action = "eps";
      if (res.spawned) action = fmt::format("spawn {}", str(res.spawned->id));
      if (res.action.kind == ActionKind::SyncFrom)
        action = fmt::format("sync {}", str(res.action.thread));
      result.trace.push_back(TraceEntry{step, proc, t.id, action});

      if (opts.audit) type_action(store, sig, res.action);

      if (res.action.kind == ActionKind::SyncFrom)
        result.join_edges.push_back(
            RunJoinEdge{res.action.thread, t.id, vertex});

      if (res.spawned) {
        result.spawn_edges.push_back(
            RunSpawnEdge{threads[idx].id, vertex, res.spawned->id});
        add_thread(res.spawned->id, res.spawned->prio, res.spawned->body,
                   res.spawned->ret_type, step, proc);
      }

      TState &t2 = threads[idx];  // threads may have grown
      if (t2.cmd->kind == CmdKind::Ret && is_value(t2.cmd->expr)) {
        finish_thread(idx, step);
      } else if (auto target = pending_sync_target(t2.cmd)) {
        auto it = tindex.find(*target);
        if (it == tindex.end())
          fail(errcode::UnknownThread, t2.cmd->span,
               fmt::format("sync on unknown thread {}", str(*target)));
        if (!threads[it->second].finished) {
          t2.parked = true;
          threads[it->second].waiters.push_back(idx);
        } else {
          enqueue(idx, proc, true);
        }
      } else {
        enqueue(idx, proc, true);
      }
    }
  }

  RunResult take_result() {
    for (const auto &t : threads) {
      ThreadStats st;
      st.id = t.id;
      st.prio = t.prio;
      st.ready_step = t.ready_step;
      st.finish_step = t.finish_step;
      st.transitions = t.transitions;
      st.finished = t.finished;
      result.stats.push_back(st);
    }
    if (threads[0].finished) result.value = threads[0].value;
    result.input_underflow = io.input_underflow;
    return std::move(result);
  }
};

void Machine::audit_pool() {
  std::vector<PoolThread> pool;
  for (const auto &t : threads) {
    CmdPtr cmd = t.finished ? c_ret(t.value) : t.cmd;
    pool.push_back(PoolThread{t.id, t.prio, t.ret_type, cmd});
  }
  Signature ambient;
  type_threadpool(store, ambient, pool);  // throws on preservation failure

  // Progress: every thread is finished, parked on a live target, or can
  // take a silent step right now.
  for (const auto &t : threads) {
    if (t.finished) continue;
    if (t.parked) {
      auto target = pending_sync_target(t.cmd);
      if (!target || !tindex.count(*target))
        fail(errcode::Audit,
             fmt::format("thread {} parked without a sync target", str(t.id)));
      continue;
    }
    std::deque<Nat> probe_inputs = inputs;
    std::vector<Nat> probe_outputs;
    StepIo probe{&probe_inputs, &probe_outputs};
    int64_t probe_counter = spawn_counter;
    CmdStep res = step_cmd(
        sig, probe, t.cmd, [this](Ident b) { return retained_value(b); },
        [&] { return intern(fmt::format("probe{}", probe_counter++)); });
    (void)res;  // throwing Stuck here is the progress violation
  }
}

}  // namespace

RunResult run(const PartialOrder &store, const CmdPtr &m0,
              const TypePtr &main_type, const RunOptions &opts) {
  if (opts.procs < 1) fail(errcode::Io, "procs must be >= 1");
  Machine mc(store, opts);
  mc.add_thread(intern("main"), prio_bot(), m0, main_type, 0, 0);

  int64_t step = 0;
  while (!mc.done()) {
    ++step;
    if (step > opts.max_steps)
      fail(errcode::Fuel, fmt::format("exceeded {} steps", opts.max_steps));
    mc.deal_phase();
    auto sel = mc.select_phase();
    if (sel.empty()) {
      std::string blocked;
      for (const auto &t : mc.threads)
        if (!t.finished && t.parked)
          blocked += fmt::format(" {}->{}", str(t.id),
                                 str(*pending_sync_target(t.cmd)));
      fail(errcode::Deadlock,
           fmt::format("no runnable thread; blocked:{}", blocked));
    }
    // Greediness self-check: selected = min(P, #ready).
    size_t ready = sel.size();
    for (int q = 0; q < opts.procs; ++q)
      for (const auto &d : mc.dq[q]) ready += d.size();
    if (sel.size() !=
        std::min<size_t>(static_cast<size_t>(opts.procs), ready))
      fail(errcode::Audit, "greedy selection invariant violated");
    mc.execute(step, sel);
    if (opts.audit) mc.audit_pool();
  }
  mc.result.global_steps = step;
  return mc.take_result();
}

std::string format_trace(const RunResult &r) {
  std::string out = "# step proc thread action\n";
  for (const auto &t : r.trace)
    out += fmt::format("{} {} {} {}\n", t.step, t.proc, str(t.thread),
                       t.action);
  return out;
}

}  // namespace priml
