#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndprover/term.hpp"

namespace ndp {

// Variable name -> replacement term. Ordered so that printing and iteration are stable.
using Substitution = std::map<std::string, Term>;

// Outer disjunction of inner conjunctions.
using Conjunct = std::vector<Literal>;
using DnfBody = std::vector<Conjunct>;

class Formula {
 public:
  enum class Kind : std::uint8_t { Atomic, And, Or, Implies, ForAll, Exists, Bottom };

  static Formula atomic(Atom a);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);
  static Formula bottom();

  // ~p(a) is encoded as p(a) -> bot; the calculus has no primitive negation.
  static Formula from_literal(const Literal& l);
  // Right-nested folds; both require a nonempty list.
  static Formula conj_of(const std::vector<Formula>& parts);
  static Formula disj_of(const std::vector<Formula>& parts);

  Kind kind() const { return node_->kind; }
  const Atom& atom() const { return node_->atom; }
  const Formula& left() const { return *node_->left; }
  const Formula& right() const { return *node_->right; }
  const std::string& var() const { return node_->var; }
  // Body of a quantifier (stored in the left slot).
  const Formula& body() const { return *node_->left; }

  bool is(Kind k) const { return kind() == k; }
  bool is_quantifier() const { return is(Kind::ForAll) || is(Kind::Exists); }
  bool is_negation() const { return is(Kind::Implies) && right().is(Kind::Bottom); }

  // Prefix notation used by proof documents: (and F G), (forall X F), bot, p(a).
  std::string to_string() const;
  // Canonical text up to renaming of bound variables. Equal keys <=> alpha-equivalent.
  const std::string& alpha_key() const;
  // Total number of connective and atom nodes.
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    Atom atom;
    std::shared_ptr<const Formula> left, right;
    std::string var;
    std::size_t size = 1;
    mutable std::string key;  // lazily computed alpha key
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Kind k, Atom a, std::shared_ptr<const Formula> l,
                      std::shared_ptr<const Formula> r, std::string var);
  std::shared_ptr<const Node> node_;
};

bool alpha_equal(const Formula& a, const Formula& b);

Term apply_substitution(const Term& t, const Substitution& s);
Atom apply_substitution(const Atom& a, const Substitution& s);
Literal apply_substitution(const Literal& l, const Substitution& s);
Conjunct apply_substitution(const Conjunct& c, const Substitution& s);
// Capture-avoiding; bound occurrences are never replaced.
Formula apply_substitution(const Formula& f, const Substitution& s);
// f[t/x]
Formula instantiate(const Formula& f, const std::string& var, const Term& t);

std::set<std::string> free_variables(const Formula& f);
std::set<std::string> free_variables(const Conjunct& c);
bool occurs_free(const Formula& f, const std::string& var);
// True if constant or function symbol `name` appears anywhere in f.
bool mentions_symbol(const Formula& f, const std::string& name);

struct DnfError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Naive distribution into disjunctive normal form. Implications become
// negative literals. Throws DnfError on quantifiers or bot.
DnfBody to_dnf(const Formula& f);

std::string to_string(const Substitution& s);

}  // namespace ndp
