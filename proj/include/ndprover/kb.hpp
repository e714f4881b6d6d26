#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ndprover/formula.hpp"

namespace ndp {

struct SourceSpan {
  std::string file;
  std::size_t line = 0;  // one-based; 0 when the value was built in code
  std::size_t column = 0;
  std::size_t length = 0;
};

enum class HeadKind { Conjunctive, Disjunctive };

// body -> head, universally closed over the head variables. Body-only variables
// are existentials. A conjunctive head with one literal is a plain Horn rule.
struct Rule {
  std::vector<Literal> head;
  HeadKind head_kind = HeadKind::Conjunctive;
  DnfBody body;
  std::vector<std::string> universals;    // head variables, first-occurrence order
  std::vector<std::string> existentials;  // body-only variables, first-occurrence order
  SourceSpan span;

  static Rule make(std::vector<Literal> head, HeadKind kind, DnfBody body, SourceSpan span = {});

  bool disjunctive() const { return head_kind == HeadKind::Disjunctive && head.size() > 1; }
  // Existentials that occur in disjunct `d`, in rule order.
  std::vector<std::string> existentials_in(std::size_t d) const;

  // forall U. ((exists E. D1 | ... | Dm) -> (H1 & ... & Hn)), or a disjoined head.
  Formula to_formula() const;
  Formula body_formula() const;  // D1 | ... | Dm with existentials free
  Formula head_formula() const;
  std::string to_string() const;  // concrete syntax, without the final '.'

  friend bool operator==(const Rule& a, const Rule& b);
};

struct DisjunctiveFact {
  std::vector<Literal> alternatives;
  SourceSpan span;

  Formula to_formula() const;  // right-nested disjunction
  std::string to_string() const;
  friend bool operator==(const DisjunctiveFact& a, const DisjunctiveFact& b) {
    return a.alternatives == b.alternatives;
  }
};

enum class Sort { Object, Integer };

struct KnowledgeBase {
  std::vector<Literal> facts;  // ground, deduplicated, insertion order
  std::vector<DisjunctiveFact> disjunctive_facts;
  std::vector<Rule> rules;

  // Returns false if the fact was already present.
  bool add_fact(const Literal& l);

  // Every constant and integer mentioned anywhere, including inside function terms.
  std::set<Term> domain() const;
  // Constants of the given sort.
  std::set<Term> domain(Sort s) const;
  // Sort of each (predicate, argument position), fixed by its first ground use.
  using SortMap = std::map<std::pair<std::string, std::size_t>, Sort>;
  SortMap position_sorts() const;

  // Order-insensitive structural equality.
  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

 private:
  std::unordered_set<Literal, LiteralHash> fact_set_;  // mirrors `facts` for add_fact
};

// Sort of a rule variable: that of its first direct argument position.
Sort variable_sort(const KnowledgeBase::SortMap& sorts, const Rule& r, const std::string& var);

}  // namespace ndp
