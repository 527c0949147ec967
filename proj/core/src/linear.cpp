#include "incwcet/linear.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace incwcet {

namespace {

using I128 = __int128;

std::vector<std::pair<VarId, Coeff>> combine_terms(
    std::vector<std::pair<VarId, Coeff>> terms) {
  std::map<VarId, Coeff> acc;
  for (auto& [v, c] : terms) acc[v] += c;
  std::vector<std::pair<VarId, Coeff>> out;
  for (auto& [v, c] : acc)
    if (c != 0) out.emplace_back(v, c);
  return out;
}

Coeff floordiv(Coeff a, Coeff b) {
  Coeff q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace

Coeff LinearExpr::coeff_of(VarId v) const {
  for (auto& [w, c] : terms)
    if (w == v) return c;
  return 0;
}

LinearExpr canonical(std::vector<std::pair<VarId, Coeff>> terms, Coeff constant) {
  return LinearExpr{combine_terms(std::move(terms)), constant};
}

LinearExpr add(const LinearExpr& a, const LinearExpr& b) {
  auto terms = a.terms;
  terms.insert(terms.end(), b.terms.begin(), b.terms.end());
  return canonical(std::move(terms), a.constant + b.constant);
}

LinearExpr negated(const LinearExpr& a) { return scaled(a, -1); }

LinearExpr sub(const LinearExpr& a, const LinearExpr& b) {
  return add(a, negated(b));
}

LinearExpr scaled(const LinearExpr& a, Coeff k) {
  if (k == 0) return LinearExpr::literal(0);
  LinearExpr out;
  out.constant = a.constant * k;
  for (auto& [v, c] : a.terms) out.terms.emplace_back(v, c * k);
  return out;
}

LinearExpr substituted(const LinearExpr& e, VarId v, const LinearExpr& repl) {
  Coeff c = e.coeff_of(v);
  if (c == 0) return e;
  LinearExpr rest;
  rest.constant = e.constant;
  for (auto& [w, k] : e.terms)
    if (w != v) rest.terms.emplace_back(w, k);
  return add(rest, scaled(repl, c));
}

int64_t eval(const LinearExpr& e, std::span<const int64_t> values) {
  I128 acc = e.constant;
  for (auto& [v, c] : e.terms) acc += I128(c) * values[static_cast<size_t>(v)];
  return static_cast<int64_t>(acc);
}

bool Constraint::trivially_true() const {
  if (!terms.empty()) return false;
  switch (rel) {
    case Rel::le: return 0 <= rhs;
    case Rel::eq: return rhs == 0;
    case Rel::ne: return rhs != 0;
  }
  return false;
}

bool Constraint::trivially_false() const {
  return terms.empty() && !trivially_true();
}

Constraint normalized(std::vector<std::pair<VarId, Coeff>> raw, Rel rel, Coeff rhs) {
  Constraint c;
  c.terms = combine_terms(std::move(raw));
  c.rel = rel;
  c.rhs = rhs;
  if (c.terms.empty()) {
    // Ground fact; canonicalize the false case to 0 <= -1.
    if (c.trivially_true()) return Constraint{{}, Rel::le, 0};
    return Constraint{{}, Rel::le, -1};
  }
  Coeff g = 0;
  for (auto& [v, k] : c.terms) g = std::gcd(g, std::abs(k));
  if (g > 1) {
    for (auto& [v, k] : c.terms) k /= g;
    switch (c.rel) {
      case Rel::le:
        c.rhs = floordiv(c.rhs, g);
        break;
      case Rel::eq:
        if (c.rhs % g != 0) return Constraint{{}, Rel::le, -1};
        c.rhs /= g;
        break;
      case Rel::ne:
        if (c.rhs % g != 0) return Constraint{{}, Rel::le, 0};  // always holds
        c.rhs /= g;
        break;
    }
  }
  // Sign-normalize = and != so that syntactic duplicates collapse.
  if (c.rel != Rel::le && c.terms.front().second < 0) {
    for (auto& [v, k] : c.terms) k = -k;
    c.rhs = -c.rhs;
  }
  return c;
}

Constraint make_constraint(const LinearExpr& lhs, RelSrc rel, const LinearExpr& rhs) {
  LinearExpr d = sub(lhs, rhs);  // d REL 0, then move constant right
  Coeff k = -d.constant;
  auto terms = d.terms;
  switch (rel) {
    case RelSrc::le: return normalized(std::move(terms), Rel::le, k);
    case RelSrc::lt: return normalized(std::move(terms), Rel::le, k - 1);
    case RelSrc::eq: return normalized(std::move(terms), Rel::eq, k);
    case RelSrc::ne: return normalized(std::move(terms), Rel::ne, k);
    case RelSrc::ge: {
      for (auto& [v, c] : terms) c = -c;
      return normalized(std::move(terms), Rel::le, -k);
    }
    case RelSrc::gt: {
      for (auto& [v, c] : terms) c = -c;
      return normalized(std::move(terms), Rel::le, -k - 1);
    }
  }
  return Constraint{{}, Rel::le, -1};
}

Constraint negated(const Constraint& c) {
  switch (c.rel) {
    case Rel::le: {
      auto terms = c.terms;
      for (auto& [v, k] : terms) k = -k;
      return normalized(std::move(terms), Rel::le, -c.rhs - 1);
    }
    case Rel::eq: return normalized(c.terms, Rel::ne, c.rhs);
    case Rel::ne: return normalized(c.terms, Rel::eq, c.rhs);
  }
  return Constraint{{}, Rel::le, -1};
}

Constraint substituted(const Constraint& c, VarId v, const LinearExpr& repl) {
  LinearExpr lhs{c.terms, 0};
  LinearExpr r = substituted(lhs, v, repl);
  Coeff k = c.rhs - r.constant;
  return normalized(std::move(r.terms), c.rel, k);
}

bool eval(const Constraint& c, std::span<const int64_t> values) {
  I128 acc = 0;
  for (auto& [v, k] : c.terms) acc += I128(k) * values[static_cast<size_t>(v)];
  switch (c.rel) {
    case Rel::le: return acc <= c.rhs;
    case Rel::eq: return acc == c.rhs;
    case Rel::ne: return acc != c.rhs;
  }
  return false;
}

void Conjunction::add(Constraint c) {
  if (c.trivially_true()) return;
  if (contains(c)) return;
  constraints_.push_back(std::move(c));
}

void Conjunction::add_all(const Conjunction& other) {
  for (const auto& c : other.constraints()) add(c);
}

bool Conjunction::has_ground_false() const {
  return std::any_of(constraints_.begin(), constraints_.end(),
                     [](const Constraint& c) { return c.trivially_false(); });
}

bool Conjunction::contains(const Constraint& c) const {
  return std::find(constraints_.begin(), constraints_.end(), c) !=
         constraints_.end();
}

bool eval(const Conjunction& c, std::span<const int64_t> values) {
  return std::all_of(c.constraints().begin(), c.constraints().end(),
                     [&](const Constraint& k) { return eval(k, values); });
}

std::string to_string(const LinearExpr& e, const std::vector<std::string>& names) {
  std::string out;
  bool first = true;
  for (auto& [v, c] : e.terms) {
    Coeff a = c;
    if (first) {
      if (a < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += a < 0 ? " - " : " + ";
      if (a < 0) a = -a;
    }
    if (a != 1) out += std::to_string(a) + "*";
    out += names[static_cast<size_t>(v)];
    first = false;
  }
  if (first) return std::to_string(e.constant);
  if (e.constant > 0) out += " + " + std::to_string(e.constant);
  if (e.constant < 0) out += " - " + std::to_string(-e.constant);
  return out;
}

std::string to_string(const Constraint& c, const std::vector<std::string>& names) {
  std::string rel;
  switch (c.rel) {
    case Rel::le: rel = "<="; break;
    case Rel::eq: rel = "="; break;
    case Rel::ne: rel = "!="; break;
  }
  return to_string(LinearExpr{c.terms, 0}, names) + " " + rel + " " +
         std::to_string(c.rhs);
}

std::string to_string(const Conjunction& c, const std::vector<std::string>& names) {
  if (c.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < c.constraints().size(); ++i) {
    if (i) out += " && ";
    out += to_string(c.constraints()[i], names);
  }
  return out;
}

}  // namespace incwcet
