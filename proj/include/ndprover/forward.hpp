#pragma once

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndprover/kb.hpp"
#include "ndprover/proof.hpp"
#include "ndprover/unify.hpp"

namespace ndp {

// ---- safety -------------------------------------------------------------

struct SafetyIssue {
  enum class Side {
    BodyOnly,    // occurs in the body but not in the head
    HeadUnbound  // occurs in the head but in no positive body literal
  };
  std::string variable;
  Side side;
  std::size_t disjunct;
  friend bool operator==(const SafetyIssue&, const SafetyIssue&) = default;
};

struct SafetyVerdict {
  std::vector<SafetyIssue> issues;
  bool safe() const { return issues.empty(); }
  std::set<std::string> variables() const;
  std::string describe() const;
};

// Two-sided safety, checked for every (disjunct, head literal) pair.
SafetyVerdict validate_safety(const Rule& r);
// Only the range-restriction half: every head variable bound by a positive body literal.
bool range_restricted(const Rule& r);

// Conjoins heads of rules with alpha-equivalent bodies and disjoins bodies of
// rules with alpha-equivalent heads. Disjunctive-head rules pass through.
std::vector<Rule> merge_rules(const std::vector<Rule>& rules);

// ---- compiled rules -----------------------------------------------------

struct Derivation {
  enum class Kind { Given, Rule, Builtin };
  Kind kind = Kind::Given;
  std::size_t rule = 0;     // index into the source rule list
  std::size_t disjunct = 0;
  Substitution subst;       // binds universals and the existentials of the disjunct
};

// A rule set prepared for semi-naive evaluation. Entries refer back to their
// source rules so that provenance and proofs use the original rule formulas.
class RuleProgram {
 public:
  struct Entry {
    std::size_t source = 0;
    std::size_t disjunct = 0;
    Conjunct body;            // builtins last
    Substitution fixed;       // pre-assigned existentials (grounding)
    std::vector<Literal> head;
    bool disjunctive = false;
    // Counted entries only: the counted-atom id of each head literal, or kNoAtom.
    std::vector<std::uint32_t> head_atoms;
  };
  static constexpr std::uint32_t kNoAtom = ~std::uint32_t{0};

  // Existential bindings outside `existential_domain` (if given) are discarded,
  // which makes direct matching agree with grounding over that domain.
  RuleProgram(std::vector<Rule> rules, std::vector<Entry> entries,
              std::optional<std::set<Term>> existential_domain = std::nullopt);

  // One entry per (rule, disjunct); existentials are bound by matching.
  static std::shared_ptr<const RuleProgram> direct(
      std::vector<Rule> rules, std::optional<std::set<Term>> existential_domain = std::nullopt);

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t entry_count() const { return entries_.size(); }

  struct Trigger {
    std::size_t entry;
    std::size_t literal;
  };
  // Entry literals that can match `fact`.
  void triggers_for(const Literal& fact, std::vector<Trigger>& out) const;
  const std::vector<std::size_t>& unconditional() const { return unconditional_; }
  bool admits(const Entry& e, const Substitution& s) const;

  // Entries whose body is ground once `fixed` is applied are not matched:
  // each keeps a count of body atoms still missing and fires when it hits zero.
  std::optional<std::uint32_t> ground_atom(const Literal& fact) const;
  std::span<const std::uint32_t> watchers(std::uint32_t atom) const {
    return {watch_flat_.data() + watch_start_[atom], watch_start_[atom + 1] - watch_start_[atom]};
  }
  const std::vector<std::uint32_t>& ground_needs() const { return ground_needs_; }
  bool has_matched_entries() const { return !positive_.empty() || !negative_.empty(); }

 private:
  struct TriggerIndex {
    std::unordered_map<Term, std::vector<Trigger>, TermHash> by_first;
    std::vector<Trigger> any;
  };
  std::vector<Rule> rules_;
  std::vector<Entry> entries_;
  std::optional<std::set<Term>> existential_domain_;
  std::unordered_map<std::string, TriggerIndex> positive_, negative_;
  std::vector<std::size_t> unconditional_;  // entries with no fact literal
  FactStore ground_atoms_;
  std::vector<std::uint32_t> watch_start_, watch_flat_;
  std::vector<std::uint32_t> ground_needs_;  // per entry; 0 for matched entries
};

struct Contradiction {
  Literal positive, negative;
  Derivation positive_derivation, negative_derivation;
  std::string describe() const;
};

// A disjunctive head instance produced by a rule firing.
struct FiredDisjunction {
  std::vector<Literal> alternatives;
  Derivation derivation;
};

// Semi-naive forward chaining state. Copyable, so that case splits can resume
// from a parent's saturated state.
class Chainer {
 public:
  explicit Chainer(std::shared_ptr<const RuleProgram> program);

  // Returns false if the fact was already known.
  bool add_given(const Literal& fact);
  // Runs rounds until no new facts. Each round matches rules only against
  // facts new in the previous round. Stops early on a contradiction.
  void saturate();

  const FactStore& facts() const { return store_; }
  bool contains(const Literal& l) const { return store_.contains(l); }
  const Derivation& derivation(FactId id) const { return provenance_[id]; }
  std::optional<Derivation> derivation_of(const Literal& l) const;
  const std::optional<Contradiction>& contradiction() const { return contradiction_; }
  const std::vector<FiredDisjunction>& fired() const { return fired_; }
  const RuleProgram& program() const { return *program_; }
  std::size_t rounds() const { return rounds_; }
  std::size_t given_count() const { return given_count_; }

 private:
  bool insert(Literal l, Derivation d, std::uint32_t atom);
  void fire(const RuleProgram::Entry& e, std::size_t entry_index, const Substitution& s);

  std::shared_ptr<const RuleProgram> program_;
  FactStore store_;
  std::vector<Derivation> provenance_;
  std::vector<FactId> pending_;
  std::vector<std::uint32_t> waiting_;  // missing body atoms per counted entry
  std::vector<std::uint32_t> fact_atom_;  // counted-atom id per fact, or kNoAtom
  std::vector<FiredDisjunction> fired_;
  std::set<std::vector<Literal>> fired_seen_;
  std::optional<Contradiction> contradiction_;
  std::size_t rounds_ = 0;
  std::size_t given_count_ = 0;
  bool unconditional_done_ = false;
};

struct UnsafeRuleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FixpointResult {
  Chainer state;
  // All facts in canonical dump order: by predicate, then argument text.
  std::vector<Literal> sorted_facts() const;
};

// Least fixpoint of a safe knowledge base. Throws UnsafeRuleError if a rule is
// unsafe or has a disjunctive head. Disjunctive facts are ignored.
FixpointResult fixpoint(const KnowledgeBase& kb);

// Proof of `goal` from the knowledge base, using only forward-fragment rules.
std::optional<Proof> entails_with_proof(const KnowledgeBase& kb, const Literal& goal);

// Orders literals by predicate, then argument text.
void sort_for_dump(std::vector<Literal>& facts);

}  // namespace ndp
