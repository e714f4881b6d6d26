#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ndprover/formula.hpp"

namespace ndp {

// Most general unifier with occurs check. The result is idempotent.
std::optional<Substitution> unify(const Atom& a, const Atom& b);

// One-way matching of `pattern` against a ground term, extending `s`.
bool match_term(const Term& pattern, const Term& ground, Substitution& s);
bool match_atom(const Atom& pattern, const Atom& ground, Substitution& s);

using FactId = std::uint32_t;

// Ground literal store. Lookup goes through an open-addressing table of ids;
// the per-predicate, per-position index used by `candidates` is built on first
// use and maintained from then on, so stores that are only probed never pay for it.
class FactStore {
 public:
  // Returns the id and whether the literal was newly inserted.
  std::pair<FactId, bool> insert(const Literal& l);
  std::pair<FactId, bool> insert(Literal&& l);
  std::optional<FactId> find(const Literal& l) const;
  // The literal with the same atom and opposite sign.
  std::optional<FactId> find_complement(const Literal& l) const;
  bool contains(const Literal& l) const { return find(l).has_value(); }
  const Literal& at(FactId id) const { return facts_[id]; }
  const std::vector<Literal>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }

  // Facts that may match `pattern` under `s`: the shortest index list among the
  // positions that are ground after substitution, or every fact of the predicate.
  std::span<const FactId> candidates(const Literal& pattern, const Substitution& s) const;

 private:
  struct PredIndex {
    std::vector<FactId> all;
    std::vector<std::unordered_map<Term, std::vector<FactId>, TermHash>> by_position;
  };
  std::optional<FactId> probe(std::size_t hash, bool positive, const Atom& a) const;
  void grow();
  void index(FactId id) const;
  const PredIndex* index_for(const Literal& l) const;

  static constexpr FactId kEmpty = ~FactId{0};
  std::vector<Literal> facts_;
  std::vector<std::size_t> atom_hashes_;
  std::vector<FactId> slots_;
  mutable bool indexed_ = false;
  mutable std::unordered_map<std::string, PredIndex> positive_, negative_;
};

// Called once per complete match; return false to stop the enumeration.
using MatchVisitor = std::function<bool(const Substitution&)>;

// Enumerates every extension of `seed` under which all literals of `conjunct`
// (except index `skip`, if given) are in `store`. Builtin literals are evaluated
// once ground. Literals are visited in ascending candidate-count order.
// Returns false if the visitor stopped the enumeration.
bool match_conjunct(const FactStore& store, const Conjunct& conjunct, const Substitution& seed,
                    const MatchVisitor& visit, std::optional<std::size_t> skip = std::nullopt);

// All substitutions sigma with sigma(conjunct) a subset of `facts`.
std::vector<Substitution> match_premise(const Conjunct& conjunct, std::span<const Literal> facts);

}  // namespace ndp
