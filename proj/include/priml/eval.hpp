#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "priml/typecheck.hpp"

namespace priml {

// Splitmix-based bounded draw; independent of libstdc++ distribution
// internals so traces are reproducible anywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}
  uint64_t next();
  // Uniform in [0, n).
  uint64_t below(uint64_t n);
  // Uniform real in [0, 1).
  double real();

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small-step dynamics

struct StepIo {
  std::deque<Nat> *inputs = nullptr;
  std::vector<Nat> *outputs = nullptr;
  bool input_underflow = false;  // input on empty queue (yields 0 + warning)
};

// One expression transition. Throws E-STUCK when no rule applies.
ExprPtr step_expr(const Signature &sig, StepIo &io, const ExprPtr &e);

struct SpawnRequest {
  Ident id;  // the freshly minted thread name
  Priority prio;
  TypePtr ret_type;
  CmdPtr body;
};

struct CmdStep {
  bool blocked = false;
  Ident blocked_on;      // valid when blocked
  CmdPtr next;           // valid when !blocked
  Action action;         // Silent or SyncFrom
  std::optional<SpawnRequest> spawned;
};

// One command transition under a signature. `retained` resolves finished
// threads' values (D-Sync2 matched with DT-Ret); `fresh_tid` mints spawn
// names. Precondition: m is not `ret v` with v a value.
CmdStep step_cmd(const Signature &sig, StepIo &io, const CmdPtr &m,
                 const std::function<const ExprPtr *(Ident)> &retained,
                 const std::function<Ident()> &fresh_tid);

// Next sync target if the command is about to sync (descends bind nesting).
std::optional<Ident> pending_sync_target(const CmdPtr &m);

// ---------------------------------------------------------------------------
// Deterministic P-processor run. The thread pool is kept in the nu-Sigma
// normal form: one global signature, flat thread table, finished threads
// retain their value indefinitely.

struct RunOptions {
  int procs = 1;
  uint64_t seed = 0;
  std::vector<Nat> inputs;
  bool audit = false;
  bool join_all = false;
  // Dealing picks the priority slot uniformly at random by default; with
  // lowest_deal it always offers its lowest-priority work.
  bool lowest_deal = false;
  int64_t max_steps = 50'000'000;
};

struct TraceEntry {
  int64_t step;  // 1-based global step
  int proc;
  Ident thread;
  // "eps", "spawn <child>", or "sync <target>"
  std::string action;
};

struct ThreadStats {
  Ident id;
  Priority prio;
  int64_t ready_step = 0;   // step at whose end the thread became ready
  int64_t finish_step = -1; // step during which it reached ret v (-1: never)
  int64_t transitions = 0;  // command transitions taken = vertices executed
  bool finished = false;
  int64_t response_time() const {
    return finish_step < 0 ? -1 : std::max<int64_t>(1, finish_step - ready_step);
  }
};

struct RunSpawnEdge {
  Ident parent;
  int64_t parent_vertex;  // index of the spawn transition in parent
  Ident child;
};

struct RunJoinEdge {
  Ident src;  // synced thread
  Ident dst;
  int64_t dst_vertex;  // index of the sync transition in dst
};

struct RunResult {
  ExprPtr value;  // main thread's return value
  std::vector<Nat> output_log;
  bool input_underflow = false;
  std::vector<ThreadStats> stats;  // spawn order, main first
  std::vector<TraceEntry> trace;
  std::vector<RunSpawnEdge> spawn_edges;
  std::vector<RunJoinEdge> join_edges;
  // steps[s] = (thread, vertex index) pairs executed at global step s+1.
  std::vector<std::vector<std::pair<Ident, int64_t>>> step_log;
  int64_t global_steps = 0;
};

// Runs m0 (typechecked at bot) as thread `main` on a simulated P-processor
// prompt scheduler with per-priority deques and randomized dealing.
RunResult run(const PartialOrder &store, const CmdPtr &m0,
              const TypePtr &main_type, const RunOptions &opts);

std::string format_trace(const RunResult &r);

}  // namespace priml
