#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ndprover/forward.hpp"
#include "ndprover/kb.hpp"
#include "ndprover/proof.hpp"
#include "ndprover/unify.hpp"

namespace ndp {

struct RuleClass {
  Fragment fragment = Fragment::Forward;  // Planning for disjunctive heads
  std::size_t existentials = 0;           // maximum over disjuncts
};

RuleClass classify_rule(const Rule& r);

inline constexpr std::size_t kDefaultGroundingCeiling = 1'000'000;

struct GroundingLimitError : std::runtime_error {
  GroundingLimitError(std::size_t domain, std::size_t existentials, std::size_t bound);
  std::size_t domain, existentials, bound;
};

// One safe rule per assignment of the existentials to `domain`: exactly D^N rules.
std::vector<Rule> ground_existentials(const Rule& r, const std::set<Term>& domain,
                                      std::size_t ceiling = kDefaultGroundingCeiling);

// Existentials range over the constants of their sort in the knowledge base.
struct GroundedProgram {
  std::shared_ptr<const RuleProgram> program;
  std::size_t ground_rules = 0;  // sum over rules of the product of existential domain sizes
};
GroundedProgram ground_program(const std::vector<Rule>& rules, const KnowledgeBase& kb,
                               std::size_t ceiling = kDefaultGroundingCeiling);

// Extensions of `bound` that satisfy `body` against stored facts only.
std::vector<Substitution> shallow_query(const FactStore& idx, const Conjunct& body,
                                        const Substitution& bound);

// Candidate scores per (predicate, argument position, constant). The default
// score is the constant's frequency at that position in stored positive facts, plus one.
class RankingModel {
 public:
  RankingModel() = default;
  explicit RankingModel(const std::vector<Literal>& facts);

  double score(const std::string& pred, std::size_t pos, const Term& c) const;
  void set_score(const std::string& pred, std::size_t pos, const Term& c, double s);

 private:
  std::map<std::tuple<std::string, std::size_t, Term>, double> scores_;
};

// Descending score; ties by constant name.
std::vector<Term> rank_candidates(const RankingModel& m, const std::string& pred, std::size_t pos,
                                  const std::set<Term>& domain);

struct Strategy {
  enum class Kind { FullGrounding, Shallow, TopOneRanked, AStar };
  Kind kind = Kind::FullGrounding;
  std::size_t budget = std::numeric_limits<std::size_t>::max();  // AStar node expansions

  static Strategy full_grounding() { return {Kind::FullGrounding}; }
  static Strategy shallow() { return {Kind::Shallow}; }
  static Strategy top_one() { return {Kind::TopOneRanked}; }
  static Strategy astar(std::size_t budget = std::numeric_limits<std::size_t>::max());
  std::string name() const;
};

enum class AnswerStatus { Found, NotFound, BudgetExhausted, GroundingLimit };
std::string_view status_name(AnswerStatus s);

struct QueryStats {
  std::size_t expansions = 0;
  std::size_t rules_generated = 0;
  std::size_t facts_derived = 0;
};

struct Answer {
  AnswerStatus status = AnswerStatus::NotFound;
  Substitution witness;             // existential bindings of the rule used
  std::optional<std::size_t> rule;  // absent when the goal is a stored fact
  std::size_t disjunct = 0;
  Substitution bindings;            // universals and existentials
  std::optional<Proof> proof;
  QueryStats stats;
  std::string detail;

  bool found() const { return status == AnswerStatus::Found; }
};

struct QueryOptions {
  std::size_t grounding_ceiling = kDefaultGroundingCeiling;
};

class QueryEngine {
 public:
  explicit QueryEngine(KnowledgeBase kb, QueryOptions opts = {});

  Answer answer(const Literal& goal, const Strategy& s, bool want_proof = false);

  // Strategy check against a caller-supplied stored-fact set and closure. The
  // closure must come from this engine's rules (direct or grounded program);
  // Shallow never looks at it and accepts null.
  Answer resolve(const Literal& goal, const Strategy& s, const FactStore& stored,
                 const Chainer* closure) const;

  const KnowledgeBase& kb() const { return kb_; }
  const FactStore& index() const { return stored_; }
  RankingModel& ranking() { return ranking_; }
  const RankingModel& ranking() const { return ranking_; }
  const std::set<Term>& domain(const Rule& r, const std::string& var) const;
  const std::set<Term>& domain() const { return all_constants_; }

  // Saturated closures over the stored facts, built on first use.
  const Chainer& direct_closure();
  const Chainer& grounded_closure();  // throws GroundingLimitError
  std::size_t ground_rule_count();

  std::shared_ptr<const RuleProgram> direct_program() const { return direct_; }
  GroundedProgram grounded_program() const;

 private:
  struct Target {
    std::size_t rule, disjunct;
    Substitution seed;
    // Body variables the goal leaves unbound: the disjunct's existentials,
    // then head variables absent from the matched head atom.
    std::vector<std::string> open;
  };
  std::vector<Target> targets(const Literal& goal) const;
  Answer via_rule(const Target& t, Substitution s, AnswerStatus st) const;
  Answer top_one(const Literal& goal, const Chainer& closure) const;
  Answer astar(const Literal& goal, const Chainer& closure, std::size_t budget) const;
  std::pair<std::string, std::size_t> rank_position(const Conjunct& body, const std::string& var) const;

  KnowledgeBase kb_;
  QueryOptions opts_;
  FactStore stored_;
  RankingModel ranking_;
  std::map<std::pair<bool, std::string>, std::vector<std::size_t>> by_head_;
  KnowledgeBase::SortMap sorts_;
  std::set<Term> all_constants_, objects_, integers_;
  std::shared_ptr<const RuleProgram> direct_;
  std::optional<Chainer> direct_closure_, grounded_closure_;
  std::optional<GroundedProgram> grounded_;
};

// Convenience: a fresh engine per call.
Answer answer(const KnowledgeBase& kb, const Literal& goal, const Strategy& s, bool want_proof = false);

}  // namespace ndp
