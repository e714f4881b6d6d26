#include "ndprover/term.hpp"

#include <algorithm>

namespace ndp {

namespace {

std::size_t kind_seed(Term::Kind k) { return static_cast<std::size_t>(k) * 0x100000001b3ULL + 17; }

void append_args(std::string& out, std::span<const Term> args) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += args[i].to_string();
  }
  out += ')';
}

}  // namespace

Term Term::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->hash = hash_combine(kind_seed(n->kind), std::hash<std::string>{}(name));
  n->name = std::move(name);
  n->ground = false;
  return Term(std::move(n));
}

Term Term::constant(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->hash = hash_combine(kind_seed(n->kind), std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Integer;
  n->value = value;
  n->name = std::to_string(value);
  n->hash = hash_combine(kind_seed(n->kind), std::hash<std::int64_t>{}(value));
  return Term(std::move(n));
}

Term Term::function(std::string symbol, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Function;
  std::size_t h = hash_combine(kind_seed(n->kind), std::hash<std::string>{}(symbol));
  for (const Term& a : args) {
    h = hash_combine(h, a.hash());
    n->ground = n->ground && a.is_ground();
  }
  n->hash = h;
  n->name = std::move(symbol);
  n->args = std::move(args);
  return Term(std::move(n));
}

bool Term::contains_variable(std::string_view var) const {
  if (is_ground()) return false;
  if (is_variable()) return name() == var;
  return std::any_of(args().begin(), args().end(),
                     [&](const Term& a) { return a.contains_variable(var); });
}

std::string Term::to_string() const {
  if (!is_function()) return name();
  std::string out = name();
  append_args(out, args());
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Integer:
      return a.value() == b.value();
    case Term::Kind::Variable:
    case Term::Kind::Constant:
      return a.name() == b.name();
    case Term::Kind::Function:
      return a.name() == b.name() && std::equal(a.args().begin(), a.args().end(),
                                                b.args().begin(), b.args().end());
  }
  return false;
}

bool operator<(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  if (a.is_integer()) return a.value() < b.value();
  if (a.name() != b.name()) return a.name() < b.name();
  return std::lexicographical_compare(a.args().begin(), a.args().end(), b.args().begin(),
                                      b.args().end());
}

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::size_t Atom::hash() const {
  std::size_t h = std::hash<std::string>{}(predicate);
  for (const Term& t : args) h = hash_combine(h, t.hash());
  return h;
}

std::string Atom::to_string() const {
  std::string out = predicate;
  if (!args.empty()) append_args(out, args);
  return out;
}

bool operator<(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

std::size_t Literal::hash() const { return hash_combine(atom.hash(), positive ? 1 : 2); }

std::string Literal::to_string() const { return positive ? atom.to_string() : "~" + atom.to_string(); }

bool operator<(const Literal& a, const Literal& b) {
  if (a.atom == b.atom) return a.positive && !b.positive;
  return a.atom < b.atom;
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_ground()) return;
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_variables(a, out);
}

void collect_variables(const Atom& a, std::vector<std::string>& out) {
  for (const Term& t : a.args) collect_variables(t, out);
}

}  // namespace ndp
