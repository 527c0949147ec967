#include "incwcet/ir.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace incwcet {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' ||
         c == '\'' || c == '.';
}

std::vector<std::string> tokenize(const std::string& line, int lineno) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      size_t j = i;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    auto two = line.substr(i, 2);
    if (two == "->" || two == ":=" || two == "<=" || two == ">=" ||
        two == "!=" || two == "==") {
      out.push_back(two == "==" ? "=" : two);
      i += 2;
      continue;
    }
    if (std::string("+-*<>=[]").find(c) != std::string::npos) {
      out.push_back(std::string(1, c));
      ++i;
      continue;
    }
    throw ParseError(lineno, std::string("unexpected character '") + c + "'");
  }
  return out;
}

struct TokenStream {
  const std::vector<std::string>& toks;
  size_t pos = 0;
  int lineno;

  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const {
    static const std::string empty;
    return done() ? empty : toks[pos];
  }
  std::string next() {
    if (done()) throw ParseError(lineno, "unexpected end of line");
    return toks[pos++];
  }
  void expect(const std::string& t) {
    if (peek() != t)
      throw ParseError(lineno, "expected '" + t + "', got '" +
                                   (done() ? "<eol>" : peek()) + "'");
    ++pos;
  }
  bool accept(const std::string& t) {
    if (peek() == t) {
      ++pos;
      return true;
    }
    return false;
  }
};

bool is_number(const std::string& t) {
  return !t.empty() && std::isdigit(static_cast<unsigned char>(t[0]));
}

struct ParserState {
  std::map<std::string, VarId> vars;
  std::map<std::string, PointId> points;
};

// expr := ['+'|'-'] term (('+'|'-') term)*
// term := number ['*'? var] | var
LinearExpr parse_expr(TokenStream& ts, const ParserState& st) {
  LinearExpr acc;
  bool first = true;
  while (true) {
    Coeff sign = 1;
    if (ts.accept("-"))
      sign = -1;
    else if (ts.accept("+"))
      sign = 1;
    else if (!first)
      break;
    if (ts.done())
      throw ParseError(ts.lineno, "expected a term in linear expression");
    const std::string tok = ts.next();
    if (is_number(tok)) {
      Coeff k = sign * static_cast<Coeff>(std::stoll(tok));
      ts.accept("*");
      if (!ts.done() && is_ident_start(ts.peek()[0]) &&
          st.vars.count(ts.peek())) {
        auto it = st.vars.find(ts.next());
        acc = add(acc, LinearExpr{{{it->second, k}}, 0});
      } else {
        acc.constant += k;
      }
    } else {
      auto it = st.vars.find(tok);
      if (it == st.vars.end())
        throw SemanticError("undeclared variable '" + tok + "' on line " +
                            std::to_string(ts.lineno));
      acc = add(acc, LinearExpr{{{it->second, sign}}, 0});
    }
    first = false;
    if (ts.done()) break;
    if (ts.peek() != "+" && ts.peek() != "-") break;
  }
  return canonical(std::move(acc.terms), acc.constant);
}

RelSrc parse_rel(TokenStream& ts) {
  std::string t = ts.next();
  if (t == "<") return RelSrc::lt;
  if (t == "<=") return RelSrc::le;
  if (t == "=") return RelSrc::eq;
  if (t == "!=") return RelSrc::ne;
  if (t == ">=") return RelSrc::ge;
  if (t == ">") return RelSrc::gt;
  throw ParseError(ts.lineno, "expected a relation, got '" + t + "'");
}

Constraint parse_constraint(TokenStream& ts, const ParserState& st) {
  LinearExpr lhs = parse_expr(ts, st);
  RelSrc rel = parse_rel(ts);
  LinearExpr rhs = parse_expr(ts, st);
  return make_constraint(lhs, rel, rhs);
}

PointId lookup_point(const ParserState& st, const std::string& id, int lineno) {
  auto it = st.points.find(id);
  if (it == st.points.end())
    throw SemanticError("unknown point '" + id + "' on line " +
                        std::to_string(lineno));
  return it->second;
}

bool comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '#';
  }
  return true;
}

}  // namespace

std::optional<PointId> TransitionSystem::point_by_id(const std::string& id) const {
  for (size_t i = 0; i < point_ids.size(); ++i)
    if (point_ids[i] == id) return static_cast<PointId>(i);
  return std::nullopt;
}

std::vector<std::vector<TransId>> TransitionSystem::outgoing() const {
  std::vector<std::vector<TransId>> out(static_cast<size_t>(num_points()));
  for (size_t t = 0; t < transitions.size(); ++t)
    out[static_cast<size_t>(transitions[t].src)].push_back(
        static_cast<TransId>(t));
  return out;
}

TransitionSystem parse_program(const std::string& text) {
  TransitionSystem ts;
  ParserState st;
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (comment_or_blank(line)) continue;
      lines.emplace_back(lineno, tokenize(line, lineno));
    }
  }

  // Pass 1: declarations, so later lines may reference points in any order.
  for (auto& [lineno, toks] : lines) {
    TokenStream s{toks, 0, lineno};
    std::string head = s.next();
    if (head == "vars") {
      while (!s.done()) {
        std::string name = s.next();
        if (!is_ident_start(name[0]))
          throw ParseError(lineno, "bad variable name '" + name + "'");
        if (st.vars.count(name))
          throw SemanticError("duplicate variable '" + name + "' on line " +
                              std::to_string(lineno));
        st.vars[name] = static_cast<VarId>(ts.var_names.size());
        ts.var_names.push_back(name);
      }
    } else if (head == "point") {
      std::string id = s.next();
      if (st.points.count(id))
        throw SemanticError("duplicate point '" + id + "' on line " +
                            std::to_string(lineno));
      PointId p = static_cast<PointId>(ts.point_ids.size());
      st.points[id] = p;
      ts.point_ids.push_back(id);
      if (s.accept("terminal")) ts.terminals.insert(p);
      if (!s.done()) throw ParseError(lineno, "trailing tokens after point");
    }
  }

  // Pass 2: everything that references declarations.
  bool saw_start = false;
  for (auto& [lineno, toks] : lines) {
    TokenStream s{toks, 0, lineno};
    std::string head = s.next();
    if (head == "vars" || head == "point") continue;
    if (head == "start") {
      if (saw_start)
        throw SemanticError("duplicate start on line " + std::to_string(lineno));
      ts.start = lookup_point(st, s.next(), lineno);
      saw_start = true;
      if (!s.done()) throw ParseError(lineno, "trailing tokens after start");
    } else if (head == "trans") {
      Transition t;
      t.src = lookup_point(st, s.next(), lineno);
      s.expect("->");
      t.dst = lookup_point(st, s.next(), lineno);
      std::string kind = s.next();
      if (kind == "assume") {
        t.op = AssumeOp{parse_constraint(s, st)};
      } else if (kind == "assign") {
        std::string var = s.next();
        auto it = st.vars.find(var);
        if (it == st.vars.end())
          throw SemanticError("undeclared variable '" + var + "' on line " +
                              std::to_string(lineno));
        s.expect(":=");
        t.op = AssignOp{it->second, parse_expr(s, st)};
      } else {
        throw ParseError(lineno, "expected 'assume' or 'assign', got '" + kind + "'");
      }
      if (s.accept("cost")) {
        std::string k = s.next();
        if (!is_number(k)) throw ParseError(lineno, "cost must be a non-negative integer");
        t.cost.static_cycles = std::stoull(k);
      }
      if (s.accept("access")) {
        s.expect("[");
        while (!s.accept("]")) {
          std::string b = s.next();
          if (!b.empty() && (b[0] == 'm' || b[0] == 'M')) b = b.substr(1);
          if (!is_number(b))
            throw ParseError(lineno, "memory block must be a non-negative integer");
          t.cost.accesses.push_back(static_cast<BlockId>(std::stoll(b)));
        }
      }
      if (!s.done()) throw ParseError(lineno, "trailing tokens after transition");
      ts.transitions.push_back(std::move(t));
    } else if (head == "loopbound") {
      PointId p = lookup_point(st, s.next(), lineno);
      std::string n = s.next();
      if (!is_number(n) || std::stoll(n) < 1)
        throw ParseError(lineno, "loop bound must be a positive integer");
      if (ts.loop_bounds.count(p))
        throw SemanticError("duplicate loopbound for '" + ts.point_ids[static_cast<size_t>(p)] + "'");
      ts.loop_bounds[p] = std::stoull(n);
      if (!s.done()) throw ParseError(lineno, "trailing tokens after loopbound");
    } else {
      throw ParseError(lineno, "unknown directive '" + head + "'");
    }
  }

  if (!saw_start) throw SemanticError("program has no start point");
  if (ts.terminals.empty()) throw SemanticError("program has no terminal point");
  return ts;
}

std::string print_program(const TransitionSystem& ts) {
  std::ostringstream out;
  if (!ts.var_names.empty()) {
    out << "vars";
    for (auto& v : ts.var_names) out << " " << v;
    out << "\n";
  }
  for (size_t p = 0; p < ts.point_ids.size(); ++p) {
    out << "point " << ts.point_ids[p];
    if (ts.is_terminal(static_cast<PointId>(p))) out << " terminal";
    out << "\n";
  }
  out << "start " << ts.point_ids[static_cast<size_t>(ts.start)] << "\n";
  for (const auto& t : ts.transitions) {
    out << "trans " << ts.point_ids[static_cast<size_t>(t.src)] << " -> "
        << ts.point_ids[static_cast<size_t>(t.dst)] << " ";
    if (const auto* a = std::get_if<AssignOp>(&t.op)) {
      out << "assign " << ts.var_names[static_cast<size_t>(a->var)] << " := "
          << to_string(a->expr, ts.var_names);
    } else {
      out << "assume " << to_string(std::get<AssumeOp>(t.op).guard, ts.var_names);
    }
    out << " cost " << t.cost.static_cycles << " access [";
    for (size_t i = 0; i < t.cost.accesses.size(); ++i) {
      if (i) out << " ";
      out << t.cost.accesses[i];
    }
    out << "]\n";
  }
  for (auto& [p, n] : ts.loop_bounds)
    out << "loopbound " << ts.point_ids[static_cast<size_t>(p)] << " " << n << "\n";
  return out.str();
}

namespace {

std::vector<bool> reachable_from_start(const TransitionSystem& ts) {
  std::vector<bool> seen(static_cast<size_t>(ts.num_points()), false);
  std::vector<PointId> work{ts.start};
  seen[static_cast<size_t>(ts.start)] = true;
  auto out = ts.outgoing();
  while (!work.empty()) {
    PointId p = work.back();
    work.pop_back();
    for (TransId t : out[static_cast<size_t>(p)]) {
      PointId d = ts.transitions[static_cast<size_t>(t)].dst;
      if (!seen[static_cast<size_t>(d)]) {
        seen[static_cast<size_t>(d)] = true;
        work.push_back(d);
      }
    }
  }
  return seen;
}

std::vector<bool> reaches_terminal(const TransitionSystem& ts) {
  std::vector<bool> seen(static_cast<size_t>(ts.num_points()), false);
  std::vector<std::vector<PointId>> preds(static_cast<size_t>(ts.num_points()));
  for (auto& t : ts.transitions)
    preds[static_cast<size_t>(t.dst)].push_back(t.src);
  std::vector<PointId> work;
  for (PointId t : ts.terminals) {
    seen[static_cast<size_t>(t)] = true;
    work.push_back(t);
  }
  while (!work.empty()) {
    PointId p = work.back();
    work.pop_back();
    for (PointId q : preds[static_cast<size_t>(p)]) {
      if (!seen[static_cast<size_t>(q)]) {
        seen[static_cast<size_t>(q)] = true;
        work.push_back(q);
      }
    }
  }
  return seen;
}

// Iterative Tarjan SCC; components are reported in a deterministic order.
std::vector<std::vector<PointId>> strongly_connected(const TransitionSystem& ts) {
  int n = ts.num_points();
  auto adj = ts.outgoing();
  std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<size_t>(n), false);
  std::vector<PointId> stack;
  std::vector<std::vector<PointId>> comps;
  int counter = 0;

  struct Frame {
    PointId v;
    size_t edge = 0;
  };
  for (PointId root = 0; root < n; ++root) {
    if (index[static_cast<size_t>(root)] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<size_t>(root)] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto& edges = adj[static_cast<size_t>(f.v)];
      if (f.edge < edges.size()) {
        PointId w = ts.transitions[static_cast<size_t>(edges[f.edge++])].dst;
        if (index[static_cast<size_t>(w)] == -1) {
          index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<size_t>(w)] = true;
          call.push_back({w, 0});
        } else if (on_stack[static_cast<size_t>(w)]) {
          low[static_cast<size_t>(f.v)] =
              std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
        }
      } else {
        if (low[static_cast<size_t>(f.v)] == index[static_cast<size_t>(f.v)]) {
          std::vector<PointId> comp;
          while (true) {
            PointId w = stack.back();
            stack.pop_back();
            on_stack[static_cast<size_t>(w)] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        PointId v = f.v;
        call.pop_back();
        if (!call.empty())
          low[static_cast<size_t>(call.back().v)] =
              std::min(low[static_cast<size_t>(call.back().v)],
                       low[static_cast<size_t>(v)]);
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

bool component_is_loop(const TransitionSystem& ts, const std::vector<PointId>& comp) {
  if (comp.size() > 1) return true;
  for (auto& t : ts.transitions)
    if (t.src == comp.front() && t.dst == comp.front()) return true;
  return false;
}

std::string unique_id(const std::set<std::string>& taken, std::string candidate) {
  while (taken.count(candidate)) candidate += "'";
  return candidate;
}

// Replicate one looping component `bound` times; back edges into the header
// chain consecutive copies, the final back edge is dropped.
TransitionSystem unroll_component(const TransitionSystem& ts,
                                  const std::vector<PointId>& comp) {
  std::set<PointId> in_comp(comp.begin(), comp.end());

  std::set<PointId> entries;
  if (in_comp.count(ts.start)) entries.insert(ts.start);
  for (auto& t : ts.transitions)
    if (!in_comp.count(t.src) && in_comp.count(t.dst)) entries.insert(t.dst);

  PointId header = -1;
  for (PointId p : comp)
    if (ts.loop_bounds.count(p) && entries.count(p)) {
      header = p;
      break;
    }
  if (header < 0)
    for (PointId p : comp)
      if (ts.loop_bounds.count(p)) {
        header = p;
        break;
      }
  if (header < 0) {
    std::string ids;
    for (PointId p : comp) {
      if (!ids.empty()) ids += " ";
      ids += ts.point_ids[static_cast<size_t>(p)];
    }
    throw UnboundedLoopError("cycle through { " + ids + " } has no loopbound");
  }
  uint64_t bound = ts.loop_bounds.at(header);

  TransitionSystem out;
  out.var_names = ts.var_names;
  std::set<std::string> taken;
  std::map<PointId, PointId> plain;                    // old -> new (outside comp)
  std::map<std::pair<PointId, uint64_t>, PointId> copy;  // (old, k) -> new

  auto add_point = [&](const std::string& id, bool terminal) {
    PointId np = static_cast<PointId>(out.point_ids.size());
    std::string uid = unique_id(taken, id);
    taken.insert(uid);
    out.point_ids.push_back(uid);
    if (terminal) out.terminals.insert(np);
    return np;
  };

  for (PointId p = 0; p < ts.num_points(); ++p) {
    bool term = ts.is_terminal(p);
    const std::string& id = ts.point_ids[static_cast<size_t>(p)];
    if (!in_comp.count(p)) {
      plain[p] = add_point(id, term);
    } else {
      for (uint64_t k = 1; k <= bound; ++k)
        copy[{p, k}] = add_point(id + "#" + std::to_string(k), term);
    }
  }

  out.start = in_comp.count(ts.start) ? copy.at({ts.start, 1}) : plain.at(ts.start);

  for (auto& [p, n] : ts.loop_bounds) {
    if (!in_comp.count(p)) {
      out.loop_bounds[plain.at(p)] = n;
    } else if (p != header) {
      // Inner loops keep their bound in every replica.
      for (uint64_t k = 1; k <= bound; ++k) out.loop_bounds[copy.at({p, k})] = n;
    }
  }

  for (const auto& t : ts.transitions) {
    bool su = in_comp.count(t.src) != 0, sv = in_comp.count(t.dst) != 0;
    if (!su && !sv) {
      Transition nt = t;
      nt.src = plain.at(t.src);
      nt.dst = plain.at(t.dst);
      out.transitions.push_back(std::move(nt));
    } else if (!su && sv) {
      Transition nt = t;
      nt.src = plain.at(t.src);
      nt.dst = copy.at({t.dst, 1});
      out.transitions.push_back(std::move(nt));
    } else if (su && !sv) {
      for (uint64_t k = 1; k <= bound; ++k) {
        Transition nt = t;
        nt.src = copy.at({t.src, k});
        nt.dst = plain.at(t.dst);
        out.transitions.push_back(std::move(nt));
      }
    } else if (t.dst != header) {
      for (uint64_t k = 1; k <= bound; ++k) {
        Transition nt = t;
        nt.src = copy.at({t.src, k});
        nt.dst = copy.at({t.dst, k});
        out.transitions.push_back(std::move(nt));
      }
    } else {
      // Back edge: advance to the next replica; the last one is dropped.
      for (uint64_t k = 1; k < bound; ++k) {
        Transition nt = t;
        nt.src = copy.at({t.src, k});
        nt.dst = copy.at({header, k + 1});
        out.transitions.push_back(std::move(nt));
      }
    }
  }
  return out;
}

TransitionSystem prune_unproductive(const TransitionSystem& ts) {
  auto fwd = reachable_from_start(ts);
  auto bwd = reaches_terminal(ts);
  std::vector<bool> keep(static_cast<size_t>(ts.num_points()));
  bool all = true;
  for (int p = 0; p < ts.num_points(); ++p) {
    keep[static_cast<size_t>(p)] =
        fwd[static_cast<size_t>(p)] && bwd[static_cast<size_t>(p)];
    all = all && keep[static_cast<size_t>(p)];
  }
  if (all) return ts;

  TransitionSystem out;
  out.var_names = ts.var_names;
  std::map<PointId, PointId> remap;
  for (PointId p = 0; p < ts.num_points(); ++p) {
    if (!keep[static_cast<size_t>(p)]) continue;
    remap[p] = static_cast<PointId>(out.point_ids.size());
    out.point_ids.push_back(ts.point_ids[static_cast<size_t>(p)]);
    if (ts.is_terminal(p)) out.terminals.insert(remap[p]);
  }
  out.start = remap.at(ts.start);
  for (const auto& t : ts.transitions) {
    if (!keep[static_cast<size_t>(t.src)] || !keep[static_cast<size_t>(t.dst)])
      continue;
    Transition nt = t;
    nt.src = remap.at(t.src);
    nt.dst = remap.at(t.dst);
    out.transitions.push_back(std::move(nt));
  }
  for (auto& [p, n] : ts.loop_bounds)
    if (keep[static_cast<size_t>(p)]) out.loop_bounds[remap.at(p)] = n;
  return out;
}

}  // namespace

bool has_cycle(const TransitionSystem& ts) {
  for (const auto& comp : strongly_connected(ts))
    if (component_is_loop(ts, comp)) return true;
  return false;
}

std::vector<PointId> topo_order(const TransitionSystem& ts) {
  int n = ts.num_points();
  std::vector<int> indeg(static_cast<size_t>(n), 0);
  for (auto& t : ts.transitions) ++indeg[static_cast<size_t>(t.dst)];
  auto adj = ts.outgoing();
  std::set<PointId> ready;
  for (PointId p = 0; p < n; ++p)
    if (indeg[static_cast<size_t>(p)] == 0) ready.insert(p);
  std::vector<PointId> order;
  while (!ready.empty()) {
    PointId p = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(p);
    for (TransId t : adj[static_cast<size_t>(p)]) {
      PointId d = ts.transitions[static_cast<size_t>(t)].dst;
      if (--indeg[static_cast<size_t>(d)] == 0) ready.insert(d);
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw SemanticError("transition graph contains a cycle");
  return order;
}

std::vector<Diagnostic> validate(const TransitionSystem& ts) {
  std::vector<Diagnostic> out;
  if (ts.terminals.empty()) out.push_back({"program has no terminal point"});
  auto fwd = reachable_from_start(ts);
  auto bwd = reaches_terminal(ts);
  for (PointId p = 0; p < ts.num_points(); ++p) {
    const std::string& id = ts.point_ids[static_cast<size_t>(p)];
    if (!fwd[static_cast<size_t>(p)])
      out.push_back({"unreachable point '" + id + "'"});
    if (!bwd[static_cast<size_t>(p)])
      out.push_back({"dead-end point '" + id + "' reaches no terminal"});
  }
  for (const auto& comp : strongly_connected(ts)) {
    if (!component_is_loop(ts, comp)) continue;
    bool bounded = std::any_of(comp.begin(), comp.end(), [&](PointId p) {
      return ts.loop_bounds.count(p) != 0;
    });
    if (!bounded) {
      std::string ids;
      for (PointId p : comp) {
        if (!ids.empty()) ids += " ";
        ids += ts.point_ids[static_cast<size_t>(p)];
      }
      out.push_back({"cycle through { " + ids + " } has no loopbound"});
    }
  }
  return out;
}

TransitionSystem unroll_loops(const TransitionSystem& ts) {
  TransitionSystem cur = ts;
  bool changed = false;
  while (true) {
    auto comps = strongly_connected(cur);
    const std::vector<PointId>* next = nullptr;
    for (const auto& comp : comps)
      if (component_is_loop(cur, comp)) {
        next = &comp;
        break;
      }
    if (!next) break;
    cur = unroll_component(cur, *next);
    changed = true;
  }
  return changed ? prune_unproductive(cur) : cur;
}

}  // namespace incwcet
