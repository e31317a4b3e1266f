#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "priml/typecheck.hpp"

namespace priml {

// A vertex is (thread, index); threads are sequences of unit-time vertices.
struct VertexId {
  Ident thread;
  int64_t index = 0;
  bool operator==(const VertexId &) const = default;
};

struct SpawnEdge {
  VertexId from;
  Ident child;
  bool operator==(const SpawnEdge &) const = default;
};

struct JoinEdge {
  Ident src;  // synced thread; edge leaves its last vertex
  VertexId to;
  bool operator==(const JoinEdge &) const = default;
};

struct CostDag {
  struct Thread {
    Ident name;
    Priority prio;  // constant
    int64_t length = 0;
  };
  std::vector<Thread> threads;  // creation order
  std::vector<SpawnEdge> spawn_edges;
  std::vector<JoinEdge> join_edges;
  // E_p: carried by the 4-tuple but never populated; asserted empty.
  std::vector<std::pair<VertexId, VertexId>> aux_edges;

  const Thread *find(Ident name) const;
  int thread_index(Ident name) const;  // -1 if absent
  int64_t total_vertices() const;
};

// ---------------------------------------------------------------------------
// Cost semantics (big-step evaluation into a DAG)

struct CostOptions {
  int64_t fuel = 10'000'000;  // one unit per charged vertex
  std::vector<Nat> inputs;
};

struct CostResult {
  ExprPtr value;
  CostDag dag;
  // Thread record: name -> (value, transitively spawned signature).
  struct RecordEntry {
    ExprPtr value;
    Signature spawned;
  };
  std::vector<std::pair<Ident, RecordEntry>> record;
  Signature sig;
};

// Evaluates a closed expression; returns its value and the charged vertex
// count. Shares the fuel/inputs state via CostState.
struct CostState;
std::pair<ExprPtr, int64_t> cost_expr(CostState &state, const ExprPtr &e);

// Evaluates command m as thread `name` at `prio`, producing the full DAG
// including eagerly evaluated children.
CostResult cost_program(const PartialOrder &store, const CmdPtr &m,
                        const CostOptions &opts, Ident root_name);

// Test-support entry: cost of a bare expression with fresh state.
std::pair<ExprPtr, int64_t> cost_expr_standalone(const ExprPtr &e,
                                                 const CostOptions &opts);

// Sequential composition at thread a (vertex sequences concatenate, edges
// union; other thread names must be disjoint).
CostDag seq_compose(const CostDag &g1, Ident a, const CostDag &g2);

// ---------------------------------------------------------------------------
// Metrics (Theorem-side quantities)

// Vertices whose priority is not below rho: |{u : NOT(prio(u) < rho)}|.
int64_t priority_work(const CostDag &g, const PartialOrder &store,
                      Ident rho);

// Length (vertex count) of the longest path ending at a's last vertex.
int64_t a_span(const CostDag &g, const PartialOrder &store, Ident a);

// Subgraph executable while a is live: g minus proper ancestors of a's first
// vertex minus proper descendants of a's last vertex.
CostDag competitor_work(const CostDag &g, Ident a);

struct WfWitness {
  Ident thread;
  VertexId offender;
  std::string reason;
};

bool check_well_formed(const CostDag &g, const PartialOrder &store,
                       WfWitness *witness = nullptr);
bool check_strongly_well_formed(const CostDag &g, const PartialOrder &store,
                                WfWitness *witness = nullptr);

// ---------------------------------------------------------------------------
// Flattened adjacency view used by schedulers and metrics

struct DagView {
  const CostDag *dag;
  std::vector<VertexId> vertices;            // global order
  std::unordered_map<Ident, int> thread_of;  // thread -> index in dag->threads
  std::vector<int64_t> thread_first;         // global id of first vertex (-1)
  std::vector<std::vector<int>> preds;
  std::vector<std::vector<int>> succs;

  explicit DagView(const CostDag &g);
  int vertex_id(const VertexId &v) const;
  int64_t count() const { return static_cast<int64_t>(vertices.size()); }
  Priority prio_of(int v) const;
};

// ---------------------------------------------------------------------------
// DAG text format
//
//   prio <name>
//   ord <lo> <hi>
//   thread <name> <prio> <nVertices>
//   spawn <thread>:<index> <childThread>
//   join <srcThread> <thread>:<index>
//
// '#' starts a comment; blank lines ignored; indices 0-based.

struct DagFile {
  PartialOrder store;
  CostDag dag;
};

std::string write_dag(const PartialOrder &store, const CostDag &dag);
DagFile parse_dag(const std::string &text);

}  // namespace priml
