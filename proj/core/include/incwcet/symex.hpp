#pragma once

#include <vector>

#include "incwcet/cache.hpp"
#include "incwcet/ir.hpp"
#include "incwcet/lattice.hpp"
#include "incwcet/solver.hpp"

namespace incwcet {

// A state of symbolic execution. The store maps each program variable to a
// linear term over the input symbols; variable j's input symbol has id
// num_vars + j, so store and path condition live in a 2n universe. The
// concrete cache and prefix cost are exactly what replaying the trail from
// an empty cache yields; along a symbolic path all block ids are concrete,
// so the dynamic cost of the prefix is deterministic.
struct SymbolicState {
  PointId point = 0;
  std::vector<LinearExpr> store;  // per program variable, over input symbols
  Conjunction path_condition;     // over input symbols
  std::vector<TransId> trail;
  ConcreteCacheState cache;
  uint64_t prefix_cost = 0;
};

inline VarId input_symbol(const TransitionSystem& ts, VarId program_var) {
  return static_cast<VarId>(ts.num_vars()) + program_var;
}

// Start state: identity store, true path condition, empty trail and cache.
SymbolicState make_root_state(const TransitionSystem& ts, const CacheConfig& cfg);

struct StepResult {
  SymbolicState state;
  bool feasible = true;  // false: the extended path condition is unsat
};

// One transition step. Assumes extend the path condition (infeasible when
// the solver refutes it; unknown counts as feasible), assigns substitute
// into the store. Trail, cache and prefix cost always advance.
// Throws PreconditionError if the transition does not start at state.point.
StepResult symstep(const TransitionSystem& ts, const CacheConfig& cfg,
                   const SymbolicState& v, TransId t,
                   const SolverLimits& limits = {});

// Rewrite a constraint over program variables into one over input symbols
// under the state's store.
Constraint eval_under_store(const SymbolicState& v, const TransitionSystem& ts,
                            const Constraint& c);

// Conjunction over the program variables equivalent to (vars = store) and
// the path condition with input symbols eliminated. Falls back to a sound
// weaker conjunction when elimination exceeds its caps.
Conjunction project(const TransitionSystem& ts, const SymbolicState& v,
                    const SolverLimits& limits = {});

// Exact cost of the full path; requires a terminal state.
WcetValue theta(const TransitionSystem& ts, const SymbolicState& v);

// Recompute the cost of a transition sequence from scratch (consistency
// checks and suffix costing). `start` threads an initial cache when given.
uint64_t path_cost(const TransitionSystem& ts, const std::vector<TransId>& path,
                   const CacheConfig& cfg,
                   const ConcreteCacheState* start = nullptr);

}  // namespace incwcet
