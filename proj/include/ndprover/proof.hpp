#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ndprover/formula.hpp"

namespace ndp {

// Set of formulas modulo alpha-equivalence, iterated in canonical-key order.
class FormulaSet {
 public:
  FormulaSet() = default;
  FormulaSet(std::initializer_list<Formula> fs);

  bool insert(const Formula& f);
  bool erase(const Formula& f);
  bool contains(const Formula& f) const { return items_.count(f.alpha_key()) > 0; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool subset_of(const FormulaSet& other) const;
  // Formulas of *this that are not in `other`.
  std::vector<Formula> minus(const FormulaSet& other) const;
  std::vector<Formula> to_vector() const;
  std::size_t total_size() const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const FormulaSet& a, const FormulaSet& b);

 private:
  std::map<std::string, Formula> items_;
};

// A theorem pair: every model of the assumptions satisfies every conclusion.
struct Sequent {
  FormulaSet assumptions;
  FormulaSet conclusions;
  friend bool operator==(const Sequent&, const Sequent&) = default;
};

enum class RuleTag {
  Axiom,
  AndIntro,
  AndElim,
  OrIntro,
  OrElim,
  ImpIntro,
  ImpElim,
  ForAllIntro,
  ForAllElim,
  ExistsIntro,
  ExistsElim,
  BottomIntro,
  BottomElim,
};

inline constexpr RuleTag kAllRules[] = {
    RuleTag::AndIntro,    RuleTag::AndElim,     RuleTag::OrIntro,     RuleTag::OrElim,
    RuleTag::ImpIntro,    RuleTag::ImpElim,     RuleTag::ForAllIntro, RuleTag::ForAllElim,
    RuleTag::ExistsIntro, RuleTag::ExistsElim,  RuleTag::BottomIntro, RuleTag::BottomElim,
};

std::string_view tag_name(RuleTag r);     // "AndIntro", as written in proof documents
std::string_view display_name(RuleTag r); // "∧-Intro"
std::optional<RuleTag> parse_tag(std::string_view s);

// Rule-specific data. `term` is the instance for ForAllElim/ExistsIntro and the
// fresh constant for ExistsElim; `principal` and `conclusion` optionally pin the
// disjunction/existential and case conclusion of OrElim/ExistsElim.
struct Witness {
  std::optional<Term> term;
  std::optional<Formula> principal;
  std::optional<Formula> conclusion;
  bool empty() const { return !term && !principal && !conclusion; }
  friend bool operator==(const Witness&, const Witness&) = default;
};

struct ProofStep {
  RuleTag rule = RuleTag::Axiom;
  std::vector<std::size_t> inputs;  // zero-based indices of strictly earlier steps
  Sequent output;
  Witness witness;
  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct Proof {
  Sequent goal;
  std::vector<ProofStep> steps;
  std::size_t total_size() const;
  friend bool operator==(const Proof&, const Proof&) = default;
};

struct Violation {
  std::size_t step = 0;  // zero-based; reported one-based
  std::optional<RuleTag> rule;
  std::string condition;
  std::string message() const;
};

class Verdict {
 public:
  Verdict() = default;
  Verdict(Violation v) : violation_(std::move(v)) {}
  bool ok() const { return !violation_; }
  explicit operator bool() const { return ok(); }
  const Violation& violation() const { return *violation_; }

 private:
  std::optional<Violation> violation_;
};

// `index` is the position of `step` in its proof; inputs must be < index.
Verdict check_step(const ProofStep& step, std::span<const Sequent> earlier, std::size_t index);
Verdict verify_proof(const Proof& p);

enum class Fragment { Forward, Query, Planning, Full };
std::string_view fragment_name(Fragment f);

// Smallest fragment containing every rule of a verified proof. A ForAllElim is
// safe when the instantiated variable occurs in the consequent it feeds.
Fragment rules_used(const Proof& p);

}  // namespace ndp
