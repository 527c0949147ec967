#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace incwcet {

using VarId = int32_t;
using Coeff = int64_t;

// Sparse linear form: sum of coeff*var plus an integer constant.
// Terms are kept sorted by variable id with no zero coefficients.
struct LinearExpr {
  std::vector<std::pair<VarId, Coeff>> terms;
  Coeff constant = 0;

  static LinearExpr variable(VarId v) { return LinearExpr{{{v, 1}}, 0}; }
  static LinearExpr literal(Coeff k) { return LinearExpr{{}, k}; }

  bool is_constant() const { return terms.empty(); }
  Coeff coeff_of(VarId v) const;

  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

LinearExpr canonical(std::vector<std::pair<VarId, Coeff>> terms, Coeff constant);
LinearExpr add(const LinearExpr& a, const LinearExpr& b);
LinearExpr sub(const LinearExpr& a, const LinearExpr& b);
LinearExpr negated(const LinearExpr& a);
LinearExpr scaled(const LinearExpr& a, Coeff k);
// Replace `v` by `repl` everywhere in `e`.
LinearExpr substituted(const LinearExpr& e, VarId v, const LinearExpr& repl);
int64_t eval(const LinearExpr& e, std::span<const int64_t> values);
std::string to_string(const LinearExpr& e, const std::vector<std::string>& names);

// Relations as written in source programs.
enum class RelSrc { lt, le, eq, ne, ge, gt };

// Canonical storage relations. Strict and reversed inequalities are folded
// into <= over the integers (a < k becomes a <= k-1; a >= k becomes -a <= -k).
enum class Rel { le, eq, ne };

// A normalized linear constraint: sum coeff_i*x_i REL rhs, gcd-reduced.
// Empty term lists encode ground facts (0 <= -1 is the canonical `false`).
struct Constraint {
  std::vector<std::pair<VarId, Coeff>> terms;
  Rel rel = Rel::le;
  Coeff rhs = 0;

  bool is_ground() const { return terms.empty(); }
  bool trivially_true() const;
  bool trivially_false() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

// Build the normalized form of `lhs REL rhs`. Integer tightening and gcd
// reduction preserve the integer solution set exactly.
Constraint make_constraint(const LinearExpr& lhs, RelSrc rel, const LinearExpr& rhs);
Constraint normalized(std::vector<std::pair<VarId, Coeff>> terms, Rel rel, Coeff rhs);

// Integer complement: not(a <= k) is a >= k+1, not(=) is !=, not(!=) is =.
Constraint negated(const Constraint& c);
Constraint substituted(const Constraint& c, VarId v, const LinearExpr& repl);
bool eval(const Constraint& c, std::span<const int64_t> values);
std::string to_string(const Constraint& c, const std::vector<std::string>& names);

// Ordered conjunction of normalized constraints over a fixed variable
// universe [0, num_vars). Trivially true constraints are dropped on add and
// exact duplicates are kept only once; insertion order is preserved.
class Conjunction {
 public:
  Conjunction() = default;
  explicit Conjunction(int num_vars) : num_vars_(num_vars) {}

  int num_vars() const { return num_vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  bool empty() const { return constraints_.empty(); }
  std::size_t size() const { return constraints_.size(); }

  void add(Constraint c);
  void add_all(const Conjunction& other);
  bool has_ground_false() const;
  bool contains(const Constraint& c) const;

  friend bool operator==(const Conjunction&, const Conjunction&) = default;

 private:
  int num_vars_ = 0;
  std::vector<Constraint> constraints_;
};

bool eval(const Conjunction& c, std::span<const int64_t> values);
std::string to_string(const Conjunction& c, const std::vector<std::string>& names);

}  // namespace incwcet
