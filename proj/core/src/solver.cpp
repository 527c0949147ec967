#include "incwcet/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>

#include "incwcet/errors.hpp"

namespace incwcet {

namespace {

using I128 = __int128;

constexpr int64_t kI64Max = INT64_MAX;
constexpr int64_t kI64Min = INT64_MIN;

bool fits64(I128 x) { return x >= I128(kI64Min) && x <= I128(kI64Max); }

I128 iabs(I128 x) { return x < 0 ? -x : x; }

I128 gcd128(I128 a, I128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

I128 floordiv128(I128 a, I128 b) {
  I128 q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

Coeff floordiv(Coeff a, Coeff b) {
  Coeff q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

Coeff ceildiv(Coeff a, Coeff b) { return -floordiv(-a, b); }

// Reduce a 128-bit row and shrink it back to 64-bit coefficients.
// Returns nullopt on overflow (callers degrade to `unknown`).
std::optional<Constraint> reduce_row(const std::map<VarId, I128>& acc, Rel rel,
                                     I128 rhs) {
  I128 g = 0;
  for (auto& [v, c] : acc)
    if (c != 0) g = gcd128(g, c);
  std::vector<std::pair<VarId, Coeff>> terms;
  if (g == 0) {
    // Ground row.
    if (!fits64(rhs)) rhs = rhs > 0 ? kI64Max : kI64Min;
    return normalized({}, rel, static_cast<Coeff>(rhs));
  }
  if (g > 1) {
    switch (rel) {
      case Rel::le: rhs = floordiv128(rhs, g); break;
      case Rel::eq:
        if (rhs % g != 0) return Constraint{{}, Rel::le, -1};
        rhs /= g;
        break;
      case Rel::ne:
        if (rhs % g != 0) return Constraint{{}, Rel::le, 0};
        rhs /= g;
        break;
    }
  }
  if (!fits64(rhs)) return std::nullopt;
  for (auto& [v, c] : acc) {
    if (c == 0) continue;
    I128 r = c / g;
    if (!fits64(r)) return std::nullopt;
    terms.emplace_back(v, static_cast<Coeff>(r));
  }
  return normalized(std::move(terms), rel, static_cast<Coeff>(rhs));
}

// res = a*r1 + b*r2 with a, b chosen by the caller so a target variable
// cancels. Relation of the result is `rel`.
std::optional<Constraint> combine_rows(const Constraint& r1, I128 a,
                                       const Constraint& r2, I128 b, Rel rel) {
  std::map<VarId, I128> acc;
  for (auto& [v, c] : r1.terms) acc[v] += a * I128(c);
  for (auto& [v, c] : r2.terms) acc[v] += b * I128(c);
  I128 rhs = a * I128(r1.rhs) + b * I128(r2.rhs);
  return reduce_row(acc, rel, rhs);
}

Coeff coeff_of(const Constraint& c, VarId v) {
  for (auto& [w, k] : c.terms)
    if (w == v) return k;
  return 0;
}

struct Stage {
  VarId var;
  std::vector<Constraint> rows;  // rows mentioning `var` at elimination time
};

enum class CoreResult { unsat, rational_sat, unknown };

// Eliminate the variables selected by `which` (all when empty) from a le/eq
// system. Exact integer arithmetic throughout; FM is complete for rational
// feasibility, so `unsat` here is definite.
CoreResult run_elimination(std::vector<Constraint> rows, int num_vars,
                           const std::vector<bool>* which,
                           const SolverLimits& limits,
                           std::vector<Stage>* stages,
                           std::vector<Constraint>* residue) {
  std::set<Constraint> seen(rows.begin(), rows.end());
  std::size_t produced = rows.size();
  for (const auto& r : rows)
    if (r.trivially_false()) return CoreResult::unsat;

  for (VarId v = 0; v < num_vars; ++v) {
    if (which && !(*which)[static_cast<size_t>(v)]) continue;
    std::vector<Constraint> with_v, rest;
    for (auto& r : rows)
      (coeff_of(r, v) != 0 ? with_v : rest).push_back(r);
    if (with_v.empty()) continue;
    if (stages) stages->push_back(Stage{v, with_v});

    auto emit = [&](std::optional<Constraint> oc) -> std::optional<CoreResult> {
      if (!oc) return CoreResult::unknown;
      if (oc->trivially_false()) return CoreResult::unsat;
      if (oc->trivially_true()) return std::nullopt;
      if (seen.insert(*oc).second) {
        rest.push_back(*oc);
        if (++produced > limits.max_rows) return CoreResult::unknown;
      }
      return std::nullopt;
    };

    // Prefer an equality pivot; it keeps the system small and exact.
    int pivot = -1;
    for (size_t i = 0; i < with_v.size(); ++i) {
      if (with_v[i].rel != Rel::eq) continue;
      if (pivot < 0 || std::abs(coeff_of(with_v[i], v)) <
                           std::abs(coeff_of(with_v[static_cast<size_t>(pivot)], v)))
        pivot = static_cast<int>(i);
    }
    if (pivot >= 0) {
      Constraint p = with_v[static_cast<size_t>(pivot)];
      Coeff pc = coeff_of(p, v);
      if (pc < 0) {
        for (auto& [w, k] : p.terms) k = -k;
        p.rhs = -p.rhs;
        pc = -pc;
      }
      for (size_t i = 0; i < with_v.size(); ++i) {
        if (static_cast<int>(i) == pivot) continue;
        const Constraint& r = with_v[i];
        Coeff a = coeff_of(r, v);
        if (auto stop = emit(combine_rows(r, pc, p, -I128(a), r.rel))) return *stop;
      }
    } else {
      std::vector<const Constraint*> uppers, lowers;
      for (auto& r : with_v)
        (coeff_of(r, v) > 0 ? uppers : lowers).push_back(&r);
      for (auto* u : uppers)
        for (auto* l : lowers) {
          I128 a = coeff_of(*u, v);
          I128 b = -I128(coeff_of(*l, v));
          if (auto stop = emit(combine_rows(*u, b, *l, a, Rel::le))) return *stop;
        }
    }
    rows = std::move(rest);
  }
  if (residue) *residue = std::move(rows);
  return CoreResult::rational_sat;
}

// Exact rational with 64-bit numerator/denominator; nullopt on overflow.
struct Rat {
  Coeff num = 0;
  Coeff den = 1;
};

std::optional<Rat> make_rat(I128 num, I128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  I128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) return std::nullopt;
  return Rat{static_cast<Coeff>(num), static_cast<Coeff>(den)};
}

int rat_cmp(const Rat& a, const Rat& b) {
  I128 l = I128(a.num) * b.den, r = I128(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

Coeff rat_floor(const Rat& a) {
  return static_cast<Coeff>(floordiv128(a.num, a.den));
}
Coeff rat_ceil(const Rat& a) {
  return static_cast<Coeff>(-floordiv128(-I128(a.num), a.den));
}

// Walk elimination stages backwards assigning one variable at a time,
// preferring small integers within the admissible rational interval.
bool extract_witness(const std::vector<Stage>& stages, int num_vars,
                     std::vector<int64_t>* out) {
  std::vector<Rat> value(static_cast<size_t>(num_vars), Rat{0, 1});
  std::vector<bool> assigned(static_cast<size_t>(num_vars), false);
  bool all_integral = true;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    std::optional<Rat> lo, hi;
    for (const auto& row : it->rows) {
      Coeff cv = coeff_of(row, it->var);
      I128 num = row.rhs;
      I128 den_scale = 1;
      // rest = sum of assigned terms as an exact rational
      I128 rest_num = 0, rest_den = 1;
      bool bad = false;
      for (auto& [w, k] : row.terms) {
        if (w == it->var) continue;
        const Rat& val = value[static_cast<size_t>(w)];
        // rest += k * val
        I128 nn = rest_num * val.den + I128(k) * val.num * rest_den;
        I128 dd = rest_den * val.den;
        I128 g = gcd128(nn, dd);
        if (g > 1) {
          nn /= g;
          dd /= g;
        }
        if (!fits64(nn) || !fits64(dd)) {
          bad = true;
          break;
        }
        rest_num = nn;
        rest_den = dd;
      }
      if (bad) return false;
      // cv * x REL rhs - rest  =>  x REL' (rhs*rest_den - rest_num) / (cv*rest_den)
      num = I128(row.rhs) * rest_den - rest_num;
      den_scale = I128(cv) * rest_den;
      auto bound = make_rat(num, den_scale);
      if (!bound) return false;
      if (row.rel == Rel::eq) {
        if (!lo || rat_cmp(*bound, *lo) > 0) lo = bound;
        if (!hi || rat_cmp(*bound, *hi) < 0) hi = bound;
      } else if (cv > 0) {
        if (!hi || rat_cmp(*bound, *hi) < 0) hi = bound;
      } else {
        if (!lo || rat_cmp(*bound, *lo) > 0) lo = bound;
      }
    }
    Rat chosen;
    std::optional<Coeff> ilo, ihi;
    if (lo) ilo = rat_ceil(*lo);
    if (hi) ihi = rat_floor(*hi);
    if (ilo && ihi && *ilo > *ihi) {
      // No integer inside; fall back to a rational point (midpoint).
      I128 nn = I128(lo->num) * hi->den + I128(hi->num) * lo->den;
      I128 dd = I128(lo->den) * hi->den * 2;
      auto mid = make_rat(nn, dd);
      if (!mid) return false;
      chosen = *mid;
      all_integral = false;
    } else {
      Coeff pick = 0;
      if (ilo && *ilo > 0) pick = *ilo;
      if (ihi && *ihi < 0) pick = *ihi;
      chosen = Rat{pick, 1};
    }
    value[static_cast<size_t>(it->var)] = chosen;
    assigned[static_cast<size_t>(it->var)] = true;
  }
  if (!all_integral) return false;
  out->assign(static_cast<size_t>(num_vars), 0);
  for (int v = 0; v < num_vars; ++v)
    if (assigned[static_cast<size_t>(v)])
      (*out)[static_cast<size_t>(v)] = value[static_cast<size_t>(v)].num;
  return true;
}

SatResult solve_split(const Conjunction& original,
                      std::vector<Constraint> base,
                      const std::vector<Constraint>& nes, size_t idx,
                      const SolverLimits& limits) {
  std::vector<Stage> stages;
  bool leaf = idx == nes.size();
  CoreResult core = run_elimination(base, original.num_vars(), nullptr, limits,
                                    leaf ? &stages : nullptr, nullptr);
  if (core == CoreResult::unsat) return SatResult::unsat;
  if (leaf) {
    if (core == CoreResult::unknown) return SatResult::unknown;
    std::vector<int64_t> witness;
    if (extract_witness(stages, original.num_vars(), &witness) &&
        eval(original, witness))
      return SatResult::sat;
    return SatResult::unknown;
  }
  const Constraint& ne = nes[idx];
  Constraint left = normalized(ne.terms, Rel::le, ne.rhs - 1);
  auto neg_terms = ne.terms;
  for (auto& [v, k] : neg_terms) k = -k;
  Constraint right = normalized(std::move(neg_terms), Rel::le, -ne.rhs - 1);

  auto lhs = base;
  lhs.push_back(left);
  SatResult a = solve_split(original, std::move(lhs), nes, idx + 1, limits);
  if (a == SatResult::sat) return SatResult::sat;
  base.push_back(right);
  SatResult b = solve_split(original, std::move(base), nes, idx + 1, limits);
  if (b == SatResult::sat) return SatResult::sat;
  if (a == SatResult::unsat && b == SatResult::unsat) return SatResult::unsat;
  return SatResult::unknown;
}

}  // namespace

SatResult is_satisfiable(const Conjunction& c, const SolverLimits& limits) {
  std::vector<Constraint> base, nes;
  for (const auto& k : c.constraints()) {
    if (k.trivially_false()) return SatResult::unsat;
    (k.rel == Rel::ne ? nes : base).push_back(k);
  }
  if (static_cast<int>(nes.size()) > limits.max_ne_splits) {
    // Still allow a definite refutation of the disequality-free part.
    CoreResult core =
        run_elimination(base, c.num_vars(), nullptr, limits, nullptr, nullptr);
    return core == CoreResult::unsat ? SatResult::unsat : SatResult::unknown;
  }
  return solve_split(c, std::move(base), nes, 0, limits);
}

Entailment entails(const Conjunction& a, const Conjunction& b,
                   const SolverLimits& limits) {
  for (const auto& beta : b.constraints()) {
    Conjunction query = a;
    query.add(negated(beta));
    if (is_satisfiable(query, limits) != SatResult::unsat)
      return Entailment::unknown;
  }
  return Entailment::yes;
}

Conjunction unsat_core(const Conjunction& c, const SolverLimits& limits) {
  if (is_satisfiable(c, limits) != SatResult::unsat)
    throw PreconditionError("unsat_core: conjunction is not unsatisfiable");
  std::vector<Constraint> kept = c.constraints();
  size_t i = 0;
  while (i < kept.size()) {
    Conjunction candidate(c.num_vars());
    for (size_t j = 0; j < kept.size(); ++j)
      if (j != i) candidate.add(kept[j]);
    if (is_satisfiable(candidate, limits) == SatResult::unsat)
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  Conjunction core(c.num_vars());
  for (auto& k : kept) core.add(k);
  return core;
}

Projection eliminate(const Conjunction& c, const std::vector<bool>& drop,
                     const SolverLimits& limits) {
  std::vector<Constraint> rows;
  Projection out;
  out.conjunction = Conjunction(c.num_vars());
  auto mentions_dropped = [&](const Constraint& k) {
    return std::any_of(k.terms.begin(), k.terms.end(), [&](auto& t) {
      return drop[static_cast<size_t>(t.first)];
    });
  };
  for (const auto& k : c.constraints()) {
    if (k.rel == Rel::ne) {
      // Disequalities cannot be FM-eliminated; keeping only the ones free of
      // dropped variables weakens the result, which is the sound direction.
      if (mentions_dropped(k))
        out.complete = false;
      else
        out.conjunction.add(k);
      continue;
    }
    rows.push_back(k);
  }
  std::vector<Constraint> residue;
  CoreResult core =
      run_elimination(std::move(rows), c.num_vars(), &drop, limits, nullptr,
                      &residue);
  if (core == CoreResult::unsat) {
    Conjunction f(c.num_vars());
    f.add(Constraint{{}, Rel::le, -1});
    return Projection{f, true};
  }
  if (core == CoreResult::unknown) {
    out.complete = false;
    return out;  // keep only what was already free of dropped variables
  }
  std::size_t emitted = 0;
  for (auto& r : residue) {
    if (mentions_dropped(r)) continue;  // defensive; elimination removed them
    if (++emitted > limits.max_out) {
      out.complete = false;
      break;
    }
    out.conjunction.add(std::move(r));
  }
  return out;
}

VarBounds implied_bounds(const Conjunction& c, VarId v,
                         const SolverLimits& limits) {
  std::vector<bool> drop(static_cast<size_t>(c.num_vars()), true);
  drop[static_cast<size_t>(v)] = false;
  Projection p = eliminate(c, drop, limits);
  VarBounds out;
  for (const auto& k : p.conjunction.constraints()) {
    if (k.trivially_false()) {
      out.infeasible = true;
      return out;
    }
    Coeff a = coeff_of(k, v);
    if (a == 0) continue;
    if (k.rel == Rel::le) {
      if (a > 0) {
        Coeff b = floordiv(k.rhs, a);
        if (!out.hi || b < *out.hi) out.hi = b;
      } else {
        Coeff b = ceildiv(k.rhs, a);
        if (!out.lo || b > *out.lo) out.lo = b;
      }
    } else if (k.rel == Rel::eq) {
      if (k.rhs % a != 0) {
        out.infeasible = true;
        return out;
      }
      Coeff val = k.rhs / a;
      if (!out.lo || val > *out.lo) out.lo = val;
      if (!out.hi || val < *out.hi) out.hi = val;
    }
  }
  if (out.lo && out.hi && *out.lo > *out.hi) out.infeasible = true;
  return out;
}

}  // namespace incwcet
