#include "ndprover/formula.hpp"

#include <algorithm>
#include <cassert>

namespace ndp {

Formula Formula::make(Kind k, Atom a, std::shared_ptr<const Formula> l,
                      std::shared_ptr<const Formula> r, std::string var) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->atom = std::move(a);
  n->size = 1 + (l ? l->size() : 0) + (r ? r->size() : 0);
  n->left = std::move(l);
  n->right = std::move(r);
  n->var = std::move(var);
  return Formula(std::move(n));
}

Formula Formula::atomic(Atom a) { return make(Kind::Atomic, std::move(a), nullptr, nullptr, {}); }

Formula Formula::conj(Formula l, Formula r) {
  return make(Kind::And, {}, std::make_shared<const Formula>(std::move(l)),
              std::make_shared<const Formula>(std::move(r)), {});
}

Formula Formula::disj(Formula l, Formula r) {
  return make(Kind::Or, {}, std::make_shared<const Formula>(std::move(l)),
              std::make_shared<const Formula>(std::move(r)), {});
}

Formula Formula::implies(Formula l, Formula r) {
  return make(Kind::Implies, {}, std::make_shared<const Formula>(std::move(l)),
              std::make_shared<const Formula>(std::move(r)), {});
}

Formula Formula::forall(std::string var, Formula body) {
  return make(Kind::ForAll, {}, std::make_shared<const Formula>(std::move(body)), nullptr,
              std::move(var));
}

Formula Formula::exists(std::string var, Formula body) {
  return make(Kind::Exists, {}, std::make_shared<const Formula>(std::move(body)), nullptr,
              std::move(var));
}

Formula Formula::bottom() {
  static const Formula bot = make(Kind::Bottom, {}, nullptr, nullptr, {});
  return bot;
}

Formula Formula::from_literal(const Literal& l) {
  Formula a = atomic(l.atom);
  return l.positive ? a : implies(std::move(a), bottom());
}

Formula Formula::conj_of(const std::vector<Formula>& parts) {
  assert(!parts.empty());
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = conj(parts[i], std::move(acc));
  return acc;
}

Formula Formula::disj_of(const std::vector<Formula>& parts) {
  assert(!parts.empty());
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = disj(parts[i], std::move(acc));
  return acc;
}

std::string Formula::to_string() const {
  switch (kind()) {
    case Kind::Atomic:
      return atom().to_string();
    case Kind::Bottom:
      return "bot";
    case Kind::And:
      return "(and " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Or:
      return "(or " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Implies:
      return "(imp " + left().to_string() + " " + right().to_string() + ")";
    case Kind::ForAll:
      return "(forall " + var() + " " + body().to_string() + ")";
    case Kind::Exists:
      return "(exists " + var() + " " + body().to_string() + ")";
  }
  return {};
}

namespace {

void key_term(const Term& t, const std::vector<std::string>& bound, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      auto it = std::find(bound.rbegin(), bound.rend(), t.name());
      if (it != bound.rend()) {
        out += '#';
        out += std::to_string(std::distance(it, bound.rend()) - 1);
      } else {
        out += '?';
        out += t.name();
      }
      return;
    }
    case Term::Kind::Constant:
    case Term::Kind::Integer:
      out += t.name();
      return;
    case Term::Kind::Function:
      out += t.name();
      out += '(';
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += ',';
        key_term(t.args()[i], bound, out);
      }
      out += ')';
      return;
  }
}

void key_formula(const Formula& f, std::vector<std::string>& bound, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atomic:
      out += f.atom().predicate;
      out += '(';
      for (std::size_t i = 0; i < f.atom().args.size(); ++i) {
        if (i) out += ',';
        key_term(f.atom().args[i], bound, out);
      }
      out += ')';
      return;
    case K::Bottom:
      out += '!';
      return;
    case K::And:
    case K::Or:
    case K::Implies:
      out += f.is(K::And) ? "&(" : f.is(K::Or) ? "|(" : ">(";
      key_formula(f.left(), bound, out);
      out += ',';
      key_formula(f.right(), bound, out);
      out += ')';
      return;
    case K::ForAll:
    case K::Exists:
      out += f.is(K::ForAll) ? "A(" : "E(";
      bound.push_back(f.var());
      key_formula(f.body(), bound, out);
      bound.pop_back();
      out += ')';
      return;
  }
}

}  // namespace

const std::string& Formula::alpha_key() const {
  if (node_->key.empty()) {
    std::vector<std::string> bound;
    std::string out;
    out.reserve(size() * 8);
    key_formula(*this, bound, out);
    node_->key = std::move(out);
  }
  return node_->key;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Atomic:
      return a.atom() == b.atom();
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::ForAll:
    case Formula::Kind::Exists:
      return a.var() == b.var() && a.body() == b.body();
    default:
      return a.left() == b.left() && a.right() == b.right();
  }
}

bool alpha_equal(const Formula& a, const Formula& b) { return a.alpha_key() == b.alpha_key(); }

Term apply_substitution(const Term& t, const Substitution& s) {
  if (t.is_ground() || s.empty()) return t;
  if (t.is_variable()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(apply_substitution(a, s));
  return Term::function(t.name(), std::move(args));
}

Atom apply_substitution(const Atom& a, const Substitution& s) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(apply_substitution(t, s));
  return out;
}

Literal apply_substitution(const Literal& l, const Substitution& s) {
  return {l.positive, apply_substitution(l.atom, s)};
}

Conjunct apply_substitution(const Conjunct& c, const Substitution& s) {
  Conjunct out;
  out.reserve(c.size());
  for (const Literal& l : c) out.push_back(apply_substitution(l, s));
  return out;
}

namespace {

void free_vars_into(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atomic: {
      std::vector<std::string> vs;
      collect_variables(f.atom(), vs);
      for (auto& v : vs)
        if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
      return;
    }
    case K::Bottom:
      return;
    case K::ForAll:
    case K::Exists:
      bound.push_back(f.var());
      free_vars_into(f.body(), bound, out);
      bound.pop_back();
      return;
    default:
      free_vars_into(f.left(), bound, out);
      free_vars_into(f.right(), bound, out);
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  free_vars_into(f, bound, out);
  return out;
}

std::set<std::string> free_variables(const Conjunct& c) {
  std::vector<std::string> vs;
  for (const Literal& l : c) collect_variables(l.atom, vs);
  return {vs.begin(), vs.end()};
}

bool occurs_free(const Formula& f, const std::string& var) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atomic:
      return std::any_of(f.atom().args.begin(), f.atom().args.end(),
                         [&](const Term& t) { return t.contains_variable(var); });
    case K::Bottom:
      return false;
    case K::ForAll:
    case K::Exists:
      return f.var() != var && occurs_free(f.body(), var);
    default:
      return occurs_free(f.left(), var) || occurs_free(f.right(), var);
  }
}

namespace {

bool term_mentions(const Term& t, const std::string& name) {
  if (t.is_variable()) return false;
  if (t.name() == name) return true;
  return std::any_of(t.args().begin(), t.args().end(),
                     [&](const Term& a) { return term_mentions(a, name); });
}

}  // namespace

bool mentions_symbol(const Formula& f, const std::string& name) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atomic:
      return std::any_of(f.atom().args.begin(), f.atom().args.end(),
                         [&](const Term& t) { return term_mentions(t, name); });
    case K::Bottom:
      return false;
    case K::ForAll:
    case K::Exists:
      return mentions_symbol(f.body(), name);
    default:
      return mentions_symbol(f.left(), name) || mentions_symbol(f.right(), name);
  }
}

Formula apply_substitution(const Formula& f, const Substitution& s) {
  using K = Formula::Kind;
  if (s.empty()) return f;
  switch (f.kind()) {
    case K::Atomic:
      return Formula::atomic(apply_substitution(f.atom(), s));
    case K::Bottom:
      return f;
    case K::And:
      return Formula::conj(apply_substitution(f.left(), s), apply_substitution(f.right(), s));
    case K::Or:
      return Formula::disj(apply_substitution(f.left(), s), apply_substitution(f.right(), s));
    case K::Implies:
      return Formula::implies(apply_substitution(f.left(), s), apply_substitution(f.right(), s));
    case K::ForAll:
    case K::Exists: {
      Substitution inner = s;
      inner.erase(f.var());
      if (inner.empty()) return f;
      std::set<std::string> body_free = free_variables(f.body());
      bool captures = false;
      std::set<std::string> avoid = body_free;
      for (const auto& [v, t] : inner) {
        if (!body_free.count(v)) continue;
        std::vector<std::string> tv;
        collect_variables(t, tv);
        avoid.insert(tv.begin(), tv.end());
        if (std::find(tv.begin(), tv.end(), f.var()) != tv.end()) captures = true;
      }
      std::string var = f.var();
      Formula body = f.body();
      if (captures) {
        for (const auto& [v, t] : inner) avoid.insert(v);
        var = fresh_name(f.var(), avoid);
        body = apply_substitution(body, Substitution{{f.var(), Term::variable(var)}});
      }
      Formula nb = apply_substitution(body, inner);
      return f.is(K::ForAll) ? Formula::forall(var, nb) : Formula::exists(var, nb);
    }
  }
  return f;
}

Formula instantiate(const Formula& f, const std::string& var, const Term& t) {
  return apply_substitution(f, Substitution{{var, t}});
}

namespace {

DnfBody dnf_product(const DnfBody& a, const DnfBody& b) {
  DnfBody out;
  out.reserve(a.size() * b.size());
  for (const Conjunct& x : a)
    for (const Conjunct& y : b) {
      Conjunct c = x;
      for (const Literal& l : y)
        if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
      out.push_back(std::move(c));
    }
  return out;
}

DnfBody dnf_polar(const Formula& f, bool positive) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Atomic:
      return {{Literal{positive, f.atom()}}};
    case K::And:
    case K::Or: {
      bool product = f.is(K::And) == positive;
      DnfBody l = dnf_polar(f.left(), positive);
      DnfBody r = dnf_polar(f.right(), positive);
      if (product) return dnf_product(l, r);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case K::Implies: {
      // A -> B is ~A | B; its negation is A & ~B.
      DnfBody l = dnf_polar(f.left(), !positive);
      DnfBody r = dnf_polar(f.right(), positive);
      if (!positive) return dnf_product(l, r);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case K::ForAll:
    case K::Exists:
      throw DnfError("to_dnf: quantifier in input " + f.to_string());
    case K::Bottom:
      throw DnfError("to_dnf: bot in input");
  }
  return {};
}

}  // namespace

DnfBody to_dnf(const Formula& f) { return dnf_polar(f, true); }

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s) {
    if (!first) out += ", ";
    first = false;
    out += v + "->" + t.to_string();
  }
  return out + "}";
}

}  // namespace ndp
