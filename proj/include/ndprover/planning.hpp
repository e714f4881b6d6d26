#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ndprover/kb.hpp"
#include "ndprover/proof.hpp"
#include "ndprover/query.hpp"

namespace ndp {

// Outcome of case analysis. A leaf is one branch, identified by the case
// assumptions on its path; a split branches on a disjunction.
struct CaseTree {
  enum class Kind { Leaf, Split };
  Kind kind = Kind::Leaf;

  // Leaf
  bool holds = false;
  bool contradiction = false;
  std::vector<Literal> path;
  std::string detail;  // body instance used, or why the goal failed

  // Split
  std::vector<Literal> alternatives;
  std::string origin;  // "stated", or the rule whose head fired
  std::vector<CaseTree> children;

  std::size_t leaf_count() const;
  std::size_t depth() const;
  bool guaranteed() const;  // every leaf holds
};

struct PlanOptions {
  std::size_t max_leaves = std::size_t{1} << 20;
  std::size_t grounding_ceiling = kDefaultGroundingCeiling;
};

struct PlanStats {
  std::size_t leaves = 0;
  std::size_t splits = 0;
  std::size_t depth = 0;
  std::size_t ground_rules = 0;
};

struct PlanResult {
  bool guaranteed = false;
  bool truncated = false;  // leaf guard tripped; the tree is partial
  CaseTree tree;
  PlanStats stats;
};

// One branch per alternative, with the alternative added as a fact and `d` removed.
std::vector<KnowledgeBase> split_cases(const KnowledgeBase& kb, const DisjunctiveFact& d);

// Splits lazily, depth-first and first-alternative-first, on stated disjunctive
// facts and on fired disjunctive rule heads until the goal holds in every
// branch under `s` or a branch has nothing left to split on.
// Throws GroundingLimitError when FullGrounding exceeds its ceiling.
PlanResult decide_guaranteed(const KnowledgeBase& kb, const Literal& goal,
                             const Strategy& s = Strategy::full_grounding(), PlanOptions opts = {});

// One binary OrElim per split (wider splits fold to the right). Throws
// std::invalid_argument if some leaf fails or the tree is partial.
Proof plan_proof(const KnowledgeBase& kb, const Literal& goal, const CaseTree& tree);

}  // namespace ndp
