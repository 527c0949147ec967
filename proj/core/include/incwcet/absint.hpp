#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "incwcet/cache.hpp"
#include "incwcet/ir.hpp"
#include "incwcet/lattice.hpp"
#include "incwcet/symex.hpp"

namespace incwcet {

class CyclicGraphError : public std::runtime_error {
 public:
  explicit CyclicGraphError(const std::string& what) : std::runtime_error(what) {}
};

// Integer bound extended with the two infinities.
struct IBound {
  Coeff v = 0;
  int inf = 0;  // -1, 0, +1

  static IBound neg_inf() { return {0, -1}; }
  static IBound pos_inf() { return {0, 1}; }
  static IBound finite(Coeff x) { return {x, 0}; }
  friend bool operator==(const IBound&, const IBound&) = default;
};

IBound add(IBound a, IBound b);
IBound scale(IBound a, Coeff k);  // k != 0
bool less(IBound a, IBound b);
inline IBound bmin(IBound a, IBound b) { return less(a, b) ? a : b; }
inline IBound bmax(IBound a, IBound b) { return less(a, b) ? b : a; }

struct Interval {
  IBound lo = IBound::neg_inf();
  IBound hi = IBound::pos_inf();

  static Interval top() { return {}; }
  static Interval constant(Coeff k) { return {IBound::finite(k), IBound::finite(k)}; }
  bool is_top() const { return lo.inf == -1 && hi.inf == 1; }
  bool empty() const { return less(hi, lo); }
  bool contains(const Interval& other) const;
  friend bool operator==(const Interval&, const Interval&) = default;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);

// Interval environment plus must-cache; absent variables are unconstrained.
struct AbstractContext {
  std::map<VarId, Interval> intervals;
  AbstractCacheState cache;

  Interval interval_of(VarId v) const;
  void constrain(VarId v, const Interval& iv);
  bool any_empty() const;
  friend bool operator==(const AbstractContext&, const AbstractContext&) = default;
};

bool leq(const AbstractContext& a, const AbstractContext& b);
AbstractContext join(const AbstractContext& a, const AbstractContext& b);

// Abstraction of a symbolic state: per-variable bounds implied by its
// projection, and the must view of its concrete cache.
AbstractContext alpha(const TransitionSystem& ts, const CacheConfig& cfg,
                      const SymbolicState& v, const SolverLimits& limits = {});

Interval range_of(const std::vector<std::pair<VarId, Coeff>>& terms,
                  const AbstractContext& ctx);

using CfgPath = std::vector<TransId>;

struct AiResult {
  WcetValue lower;  // always bottom: nontrivial lowers come from paths
  WcetValue upper;
  std::vector<CfgPath> witnesses;  // at most one; empty if no path reaches O
  std::map<PointId, WcetValue> per_point_upper;
};

// Interval + must-cache abstract interpretation over the acyclic CFG.
// Forward pass: propagate the context in topological order, joining at merge
// points and dropping assume edges whose guard is definitely false. Backward
// pass: worst-case suffix cost per point, costing each transition's accesses
// against the forward abstract cache at its source. The witness follows the
// argmax edges (ties: lexicographically smallest destination id).
//
// Results are memoized; a query is served from an earlier run whenever that
// run reached the point with a context no more precise than the query's, in
// which case the run's per-point estimate is a sound (coarser) answer.
class AbstractInterpreter {
 public:
  AbstractInterpreter(const TransitionSystem& ts, CacheConfig cfg,
                      SolverLimits limits = {});

  // Memoized query.
  AiResult query(PointId at, const AbstractContext& ctx);
  // Uncached single run (used by tests and by query on a miss).
  AiResult run(PointId at, const AbstractContext& ctx) const;

  uint64_t runs() const { return runs_; }
  uint64_t memo_hits() const { return memo_hits_; }

 private:
  struct Run {
    PointId at;
    std::vector<std::optional<AbstractContext>> ctx_at;
    std::vector<std::optional<WcetValue>> upper;
    std::vector<std::optional<TransId>> argmax;
  };

  AiResult extract(const Run& run, PointId at) const;
  Run execute(PointId at, const AbstractContext& ctx) const;

  const TransitionSystem& ts_;
  CacheConfig cfg_;
  SolverLimits limits_;
  std::vector<std::vector<TransId>> out_;
  std::vector<PointId> topo_;
  std::vector<Run> memo_;
  uint64_t runs_ = 0;
  uint64_t memo_hits_ = 0;
};

}  // namespace incwcet
