#pragma once

#include <optional>
#include <vector>

#include "incwcet/linear.hpp"

namespace incwcet {

enum class SatResult { sat, unsat, unknown };
enum class Entailment { yes, unknown };

// Resource caps for the decision procedure. Exceeding a cap degrades the
// answer to `unknown`, never to an unsound verdict.
struct SolverLimits {
  int max_ne_splits = 16;        // disequality constraints case-split per query
  std::size_t max_rows = 20000;  // derived rows during elimination
  std::size_t max_out = 256;     // constraints kept by a projection
};

// Rational-relaxation feasibility via Fourier-Motzkin elimination with exact
// integer arithmetic. `unsat` is definite (no rational, hence no integer,
// solution). `sat` is reported only when an integer witness was found and
// verified; a rationally feasible system without such a witness reports
// `unknown`, which callers treat as feasible.
SatResult is_satisfiable(const Conjunction& c, const SolverLimits& limits = {});

// `yes` only if every integer model of `a` satisfies `b`, established by
// refuting a && not(beta) for each constraint beta of `b`.
Entailment entails(const Conjunction& a, const Conjunction& b,
                   const SolverLimits& limits = {});

// Deletion-minimal unsatisfiable subset, scanning constraints in stored
// order. Throws PreconditionError unless `c` is unsat.
Conjunction unsat_core(const Conjunction& c, const SolverLimits& limits = {});

struct Projection {
  Conjunction conjunction;
  bool complete = true;  // false: some implied constraints were discarded
};

// Existentially eliminate every variable with drop[v] set. The result is
// implied by `c`; when the size cap is hit, remaining constraints that still
// mention dropped variables are discarded (sound weakening) and `complete`
// is cleared. Disequalities over dropped variables are always discarded.
Projection eliminate(const Conjunction& c, const std::vector<bool>& drop,
                     const SolverLimits& limits = {});

struct VarBounds {
  std::optional<Coeff> lo, hi;
  bool infeasible = false;  // the conjunction itself has no rational solution
};

// Tightest derivable bounds for one variable.
VarBounds implied_bounds(const Conjunction& c, VarId v,
                         const SolverLimits& limits = {});

}  // namespace incwcet
