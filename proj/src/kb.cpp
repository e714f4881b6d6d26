#include "ndprover/kb.hpp"

#include <algorithm>

namespace ndp {

namespace {

std::string join_literals(const std::vector<Literal>& ls, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += sep;
    out += ls[i].to_string();
  }
  return out;
}

void collect_constants(const Term& t, std::set<Term>& out) {
  switch (t.kind()) {
    case Term::Kind::Constant:
    case Term::Kind::Integer:
      out.insert(t);
      return;
    case Term::Kind::Function:
      for (const Term& a : t.args()) collect_constants(a, out);
      return;
    case Term::Kind::Variable:
      return;
  }
}

void collect_constants(const Literal& l, std::set<Term>& out) {
  for (const Term& t : l.atom.args) collect_constants(t, out);
}

template <typename Fn>
void for_each_literal(const KnowledgeBase& kb, Fn&& fn) {
  for (const Literal& l : kb.facts) fn(l);
  for (const DisjunctiveFact& d : kb.disjunctive_facts)
    for (const Literal& l : d.alternatives) fn(l);
  for (const Rule& r : kb.rules) {
    for (const Literal& l : r.head) fn(l);
    for (const Conjunct& c : r.body)
      for (const Literal& l : c) fn(l);
  }
}

}  // namespace

Rule Rule::make(std::vector<Literal> head, HeadKind kind, DnfBody body, SourceSpan span) {
  Rule r;
  r.head = std::move(head);
  r.head_kind = kind;
  r.body = std::move(body);
  r.span = std::move(span);
  for (const Literal& l : r.head) collect_variables(l.atom, r.universals);
  std::vector<std::string> body_vars;
  for (const Conjunct& c : r.body)
    for (const Literal& l : c) collect_variables(l.atom, body_vars);
  for (const std::string& v : body_vars)
    if (std::find(r.universals.begin(), r.universals.end(), v) == r.universals.end())
      r.existentials.push_back(v);
  return r;
}

std::vector<std::string> Rule::existentials_in(std::size_t d) const {
  std::set<std::string> vars = free_variables(body[d]);
  std::vector<std::string> out;
  for (const std::string& e : existentials)
    if (vars.count(e)) out.push_back(e);
  return out;
}

Formula Rule::body_formula() const {
  std::vector<Formula> disjuncts;
  for (const Conjunct& c : body) {
    std::vector<Formula> parts;
    for (const Literal& l : c) parts.push_back(Formula::from_literal(l));
    disjuncts.push_back(Formula::conj_of(parts));
  }
  return Formula::disj_of(disjuncts);
}

Formula Rule::head_formula() const {
  std::vector<Formula> parts;
  for (const Literal& l : head) parts.push_back(Formula::from_literal(l));
  return head_kind == HeadKind::Disjunctive ? Formula::disj_of(parts) : Formula::conj_of(parts);
}

Formula Rule::to_formula() const {
  Formula antecedent = body_formula();
  for (std::size_t i = existentials.size(); i-- > 0;)
    antecedent = Formula::exists(existentials[i], std::move(antecedent));
  Formula f = Formula::implies(std::move(antecedent), head_formula());
  for (std::size_t i = universals.size(); i-- > 0;) f = Formula::forall(universals[i], std::move(f));
  return f;
}

std::string Rule::to_string() const {
  std::string out = join_literals(head, head_kind == HeadKind::Disjunctive ? " | " : " & ");
  out += " <- ";
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += " ; ";
    out += join_literals(body[i], " & ");
  }
  return out;
}

bool operator==(const Rule& a, const Rule& b) {
  return a.head == b.head && a.head_kind == b.head_kind && a.body == b.body &&
         a.universals == b.universals && a.existentials == b.existentials;
}

Formula DisjunctiveFact::to_formula() const {
  std::vector<Formula> parts;
  for (const Literal& l : alternatives) parts.push_back(Formula::from_literal(l));
  return Formula::disj_of(parts);
}

std::string DisjunctiveFact::to_string() const { return join_literals(alternatives, " | "); }

bool KnowledgeBase::add_fact(const Literal& l) {
  if (fact_set_.size() != facts.size()) fact_set_ = {facts.begin(), facts.end()};
  if (!fact_set_.insert(l).second) return false;
  facts.push_back(l);
  return true;
}

std::set<Term> KnowledgeBase::domain() const {
  std::set<Term> out;
  for_each_literal(*this, [&](const Literal& l) { collect_constants(l, out); });
  return out;
}

std::set<Term> KnowledgeBase::domain(Sort s) const {
  std::set<Term> out;
  for (const Term& t : domain())
    if (t.is_integer() == (s == Sort::Integer)) out.insert(t);
  return out;
}

KnowledgeBase::SortMap KnowledgeBase::position_sorts() const {
  SortMap out;
  for_each_literal(*this, [&](const Literal& l) {
    for (std::size_t i = 0; i < l.atom.args.size(); ++i) {
      const Term& t = l.atom.args[i];
      if (!t.is_ground()) continue;
      out.emplace(std::pair{l.atom.predicate, i}, t.is_integer() ? Sort::Integer : Sort::Object);
    }
  });
  return out;
}

Sort variable_sort(const KnowledgeBase::SortMap& sorts, const Rule& r, const std::string& var) {
  for (const Conjunct& c : r.body)
    for (const Literal& l : c)
      for (std::size_t i = 0; i < l.atom.args.size(); ++i) {
        const Term& t = l.atom.args[i];
        if (!t.is_variable() || t.name() != var) continue;
        auto it = sorts.find({l.atom.predicate, i});
        if (it != sorts.end()) return it->second;
      }
  return Sort::Object;
}

namespace {

template <typename T>
std::vector<std::string> sorted_texts(const std::vector<T>& xs) {
  std::vector<std::string> out;
  for (const T& x : xs) out.push_back(x.to_string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  return sorted_texts(a.facts) == sorted_texts(b.facts) &&
         sorted_texts(a.disjunctive_facts) == sorted_texts(b.disjunctive_facts) &&
         sorted_texts(a.rules) == sorted_texts(b.rules);
}

}  // namespace ndp
