#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "incwcet/cache.hpp"
#include "incwcet/linear.hpp"

namespace incwcet {

using PointId = int32_t;
using TransId = int32_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line(line) {}
  int line;
};

class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(const std::string& what) : std::runtime_error(what) {}
};

class UnboundedLoopError : public std::runtime_error {
 public:
  explicit UnboundedLoopError(const std::string& what)
      : std::runtime_error(what) {}
};

struct AssignOp {
  VarId var;
  LinearExpr expr;
  friend bool operator==(const AssignOp&, const AssignOp&) = default;
};

struct AssumeOp {
  Constraint guard;
  friend bool operator==(const AssumeOp&, const AssumeOp&) = default;
};

using Op = std::variant<AssignOp, AssumeOp>;

// Static cycles plus the ordered memory blocks touched while executing the
// transition; the blocks' timing depends on the cache context.
struct CostAnnotation {
  uint64_t static_cycles = 0;
  std::vector<BlockId> accesses;
  friend bool operator==(const CostAnnotation&, const CostAnnotation&) = default;
};

struct Transition {
  PointId src;
  PointId dst;
  Op op;
  CostAnnotation cost;
  friend bool operator==(const Transition&, const Transition&) = default;
};

// A program: finite set of points, unique start, transitions, terminals.
// Immutable after construction; safe to share read-only across threads.
struct TransitionSystem {
  std::vector<std::string> point_ids;   // index -> label
  std::vector<std::string> var_names;   // index -> name
  PointId start = 0;
  std::set<PointId> terminals;
  std::vector<Transition> transitions;
  std::map<PointId, uint64_t> loop_bounds;

  int num_points() const { return static_cast<int>(point_ids.size()); }
  int num_vars() const { return static_cast<int>(var_names.size()); }
  bool is_terminal(PointId p) const { return terminals.count(p) != 0; }
  std::optional<PointId> point_by_id(const std::string& id) const;
  // Outgoing transition indices per point, in declaration order.
  std::vector<std::vector<TransId>> outgoing() const;

  friend bool operator==(const TransitionSystem&, const TransitionSystem&) =
      default;
};

struct Diagnostic {
  std::string message;
};

// Parse the line-oriented program format; see README for the grammar.
// Throws ParseError on syntax violations and SemanticError on undeclared
// variables, duplicate points, or dangling transitions.
TransitionSystem parse_program(const std::string& text);

// Render in the same format; parse(print(ts)) == ts.
std::string print_program(const TransitionSystem& ts);

// Structural checks beyond what parsing enforces: points unreachable from
// the start, points that reach no terminal, and cycles without a bound.
std::vector<Diagnostic> validate(const TransitionSystem& ts);

// Statically unroll bounded loops. `loopbound h n` means the point h is
// visited at most n times per execution: the looping component is replicated
// n times with fresh ids (`h#2`, ...), back edges chain the copies and the
// last back edge is dropped. Replication debris that cannot reach a terminal
// is pruned so the result is a DAG in which every point reaches a terminal.
// Throws UnboundedLoopError when a cycle avoids every bounded point.
TransitionSystem unroll_loops(const TransitionSystem& ts);

bool has_cycle(const TransitionSystem& ts);

// Topological order of all points (start first among sources); throws
// SemanticError if the graph is cyclic.
std::vector<PointId> topo_order(const TransitionSystem& ts);

}  // namespace incwcet
