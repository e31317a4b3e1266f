#pragma once

#include <optional>
#include <unordered_map>

#include "priml/costgraph.hpp"
#include "priml/eval.hpp"
#include "priml/schedule.hpp"

namespace priml {

// The DAG and schedule a run actually performed: one vertex per command
// transition, spawn/join edges as observed.
struct TraceDag {
  CostDag dag;
  Schedule schedule;
};

TraceDag trace_dag(const RunResult &r, int procs);

// Canonical thread bijection between two DAGs with the same spawn-tree
// structure (roots correspond; children matched by spawn vertex index).
// Also requires matching priorities, lengths and join edges. Empty when the
// graphs are not isomorphic.
std::optional<std::unordered_map<Ident, Ident>> dag_isomorphism(
    const CostDag &a, const CostDag &b);

CostDag rename_threads(const CostDag &g,
                       const std::unordered_map<Ident, Ident> &map);
Schedule rename_threads(const Schedule &s,
                        const std::unordered_map<Ident, Ident> &map);

}  // namespace priml
