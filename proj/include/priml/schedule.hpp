#pragma once

#include "priml/costgraph.hpp"
#include "priml/eval.hpp"

namespace priml {

// A schedule: per step, the set of vertices executed (at most P).
struct Schedule {
  int procs = 1;
  std::vector<std::vector<VertexId>> steps;
};

// Validity: every vertex exactly once, only when all ancestors already ran.
bool schedule_valid(const Schedule &s, const CostDag &g,
                    std::string *why = nullptr);
// Greedy: |step| = min(P, #ready) at every step.
bool schedule_greedy(const Schedule &s, const CostDag &g);
// Prompt: no executed vertex is strictly outranked by a ready unexecuted one.
bool schedule_prompt(const Schedule &s, const CostDag &g,
                     const PartialOrder &store);

// Greedy prompt scheduler; ties among maximal-priority candidates broken by
// the seeded rng, or by total order (then vertex id) under det.
Schedule prompt_schedule(const CostDag &g, const PartialOrder &store, int P,
                         uint64_t seed, bool det = false);

struct FairnessCriterion {
  std::vector<std::pair<Ident, double>> weights;  // must sum to 1 (1e-9)
  void validate() const;
  double mass_not_below(const PartialOrder &store, Ident rho) const;
};

// Per step, P priorities are drawn from the criterion; processors that find
// no ready vertex at their drawn priority fall back to the prompt policy.
Schedule fair_prompt_schedule(const CostDag &g, const PartialOrder &store,
                              int P, const FairnessCriterion &criterion,
                              uint64_t seed);

// Steps from thread readiness (exclusive) to its last vertex (inclusive).
// An empty thread completes the step after it becomes ready: 1.
int64_t response_time(const Schedule &s, const CostDag &g, Ident a);

struct BoundReport {
  int64_t response = 0;
  int64_t work = 0;  // priority work of comp(a) at a's priority
  int64_t span = 0;  // a-span of comp(a)
  int procs = 1;
  double rhs() const {
    return static_cast<double>(work) / procs + static_cast<double>(span);
  }
  bool holds = false;  // response * P <= work + span * P (exact integers)
  bool well_formed = true;
};

BoundReport check_bound(const CostDag &g, const PartialOrder &store, Ident a,
                        int P, const Schedule &sched);

struct FairReport {
  double mean_response = 0;
  double std_error = 0;
  double rhs = 0;
  double mass = 0;  // C(not-below rho')
  int64_t trials = 0;
  bool holds = false;  // mean <= rhs + 3 * SE
};

FairReport check_fair_bound(const CostDag &g, const PartialOrder &store,
                            Ident a, int P, const FairnessCriterion &criterion,
                            Ident rho_prime, int64_t trials, uint64_t seed);

// Spawn-tree-structured generator; joins only target same-or-higher-priority
// children, so results are strongly well-formed by construction.
CostDag random_wellformed_dag(int n_threads, int max_len,
                              const PartialOrder &store, uint64_t seed);

// Random small partial order (bot plus n constants, random acyclic edges).
PartialOrder random_store(int n_prios, uint64_t seed);

// Brute force minimum response time over all valid schedules; |V| <= 14.
int64_t exhaustive_min_response(const CostDag &g, Ident a, int P);

}  // namespace priml
