#include "incwcet/symex.hpp"

#include "incwcet/errors.hpp"

namespace incwcet {

SymbolicState make_root_state(const TransitionSystem& ts, const CacheConfig& cfg) {
  SymbolicState v;
  v.point = ts.start;
  v.store.reserve(static_cast<size_t>(ts.num_vars()));
  for (VarId x = 0; x < ts.num_vars(); ++x)
    v.store.push_back(LinearExpr::variable(input_symbol(ts, x)));
  v.path_condition = Conjunction(2 * ts.num_vars());
  v.cache = ConcreteCacheState(cfg.num_sets);
  return v;
}

Constraint eval_under_store(const SymbolicState& v, const TransitionSystem& ts,
                            const Constraint& c) {
  LinearExpr lhs;
  for (auto& [var, k] : c.terms)
    lhs = add(lhs, scaled(v.store[static_cast<size_t>(var)], k));
  (void)ts;
  Coeff rhs = c.rhs - lhs.constant;
  lhs.constant = 0;
  return normalized(std::move(lhs.terms), c.rel, rhs);
}

StepResult symstep(const TransitionSystem& ts, const CacheConfig& cfg,
                   const SymbolicState& v, TransId t,
                   const SolverLimits& limits) {
  const Transition& tr = ts.transitions[static_cast<size_t>(t)];
  if (tr.src != v.point)
    throw PreconditionError("symstep: transition does not start at the state's point");

  StepResult out{v, true};
  SymbolicState& s = out.state;
  s.point = tr.dst;
  s.trail.push_back(t);
  s.prefix_cost += tr.cost.static_cycles;
  for (BlockId b : tr.cost.accesses) s.prefix_cost += s.cache.access(b, cfg);

  if (const auto* assume = std::get_if<AssumeOp>(&tr.op)) {
    Constraint c = eval_under_store(v, ts, assume->guard);
    s.path_condition.add(c);
    if (is_satisfiable(s.path_condition, limits) == SatResult::unsat)
      out.feasible = false;
  } else {
    const auto& assign = std::get<AssignOp>(tr.op);
    LinearExpr rhs;
    rhs.constant = assign.expr.constant;
    for (auto& [var, k] : assign.expr.terms)
      rhs = add(rhs, scaled(v.store[static_cast<size_t>(var)], k));
    s.store[static_cast<size_t>(assign.var)] = rhs;
  }
  return out;
}

Conjunction project(const TransitionSystem& ts, const SymbolicState& v,
                    const SolverLimits& limits) {
  int n = ts.num_vars();
  Conjunction full(2 * n);
  for (VarId x = 0; x < n; ++x) {
    // x - store(x) = 0 over the combined universe.
    std::vector<std::pair<VarId, Coeff>> terms{{x, 1}};
    for (auto& [sym, k] : v.store[static_cast<size_t>(x)].terms)
      terms.emplace_back(sym, -k);
    full.add(normalized(std::move(terms), Rel::eq,
                        v.store[static_cast<size_t>(x)].constant));
  }
  full.add_all(v.path_condition);

  std::vector<bool> drop(static_cast<size_t>(2 * n), false);
  for (VarId x = 0; x < n; ++x) drop[static_cast<size_t>(input_symbol(ts, x))] = true;
  Projection p = eliminate(full, drop, limits);

  Conjunction out(n);
  for (const auto& c : p.conjunction.constraints()) out.add(c);
  return out;
}

WcetValue theta(const TransitionSystem& ts, const SymbolicState& v) {
  if (!ts.is_terminal(v.point))
    throw PreconditionError("theta: state is not at a terminal point");
  return WcetValue(v.prefix_cost);
}

uint64_t path_cost(const TransitionSystem& ts, const std::vector<TransId>& path,
                   const CacheConfig& cfg, const ConcreteCacheState* start) {
  ConcreteCacheState cache = start ? *start : ConcreteCacheState(cfg.num_sets);
  uint64_t total = 0;
  for (TransId t : path) {
    const Transition& tr = ts.transitions[static_cast<size_t>(t)];
    total += tr.cost.static_cycles;
    for (BlockId b : tr.cost.accesses) total += cache.access(b, cfg);
  }
  return total;
}

}  // namespace incwcet
