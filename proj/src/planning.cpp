#include "ndprover/planning.hpp"

#include <algorithm>
#include <stdexcept>

#include "ndprover/builtins.hpp"
#include "proof_builder.hpp"

namespace ndp {

std::size_t CaseTree::leaf_count() const {
  if (kind == Kind::Leaf) return 1;
  std::size_t n = 0;
  for (const CaseTree& c : children) n += c.leaf_count();
  return n;
}

std::size_t CaseTree::depth() const {
  std::size_t d = 0;
  for (const CaseTree& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

bool CaseTree::guaranteed() const {
  if (kind == Kind::Leaf) return holds;
  return children.size() == alternatives.size() && std::all_of(children.begin(), children.end(),
                                          [](const CaseTree& c) { return c.guaranteed(); });
}

std::vector<KnowledgeBase> split_cases(const KnowledgeBase& kb, const DisjunctiveFact& d) {
  std::vector<KnowledgeBase> out;
  for (const Literal& alt : d.alternatives) {
    KnowledgeBase branch = kb;
    auto it = std::find(branch.disjunctive_facts.begin(), branch.disjunctive_facts.end(), d);
    if (it != branch.disjunctive_facts.end()) branch.disjunctive_facts.erase(it);
    branch.add_fact(alt);
    out.push_back(std::move(branch));
  }
  return out;
}

namespace {

std::string join(const std::vector<Literal>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ", ";
    out += ls[i].to_string();
  }
  return out;
}

class Planner {
 public:
  Planner(const KnowledgeBase& kb, const Literal& goal, const Strategy& s, PlanOptions opts)
      : kb_(kb), goal_(goal), strategy_(s), opts_(opts),
        engine_(kb, QueryOptions{opts.grounding_ceiling}) {
    if (s.kind == Strategy::Kind::FullGrounding) {
      GroundedProgram g = engine_.grounded_program();
      program_ = g.program;
      result_.stats.ground_rules = g.ground_rules;
    } else {
      program_ = engine_.direct_program();
    }
  }

  PlanResult run() {
    Chainer root(program_);
    for (const Literal& f : kb_.facts) root.add_given(f);
    const bool shallow = strategy_.kind == Strategy::Kind::Shallow;
    FactStore stored;
    if (shallow)
      for (const Literal& f : kb_.facts) stored.insert(f);
    result_.tree = explore(root, shallow ? &stored : nullptr, {});
    result_.guaranteed = !result_.truncated && result_.tree.guaranteed();
    result_.stats.leaves = result_.tree.leaf_count();
    result_.stats.depth = result_.tree.depth();
    return std::move(result_);
  }

 private:
  CaseTree explore(Chainer& c, const FactStore* stored, const std::vector<Literal>& path) {
    c.saturate();
    CaseTree node;
    node.path = path;
    if (c.contradiction()) {
      node.contradiction = true;
      node.detail = c.contradiction()->describe();
      ++leaves_;
      return node;
    }
    Answer a = engine_.resolve(goal_, strategy_, stored ? *stored : engine_.index(), &c);
    if (a.found()) {
      node.holds = true;
      node.detail = a.rule ? instance(*a.rule, a.disjunct, a.bindings) : goal_.to_string() + " given";
      ++leaves_;
      return node;
    }
    auto split = next_split(c);
    if (!split) {
      node.detail = explain_failure(c);
      ++leaves_;
      return node;
    }
    node.kind = CaseTree::Kind::Split;
    node.alternatives = split->first;
    node.origin = split->second;
    node.path.clear();
    ++result_.stats.splits;
    for (const Literal& alt : node.alternatives) {
      if (leaves_ >= opts_.max_leaves) {
        result_.truncated = true;
        break;
      }
      Chainer child = c;
      child.add_given(alt);
      std::vector<Literal> child_path = path;
      child_path.push_back(alt);
      if (stored) {
        FactStore s = *stored;
        s.insert(alt);
        node.children.push_back(explore(child, &s, child_path));
      } else {
        node.children.push_back(explore(child, nullptr, child_path));
      }
    }
    return node;
  }

  std::optional<std::pair<std::vector<Literal>, std::string>> next_split(const Chainer& c) const {
    auto open = [&](const std::vector<Literal>& alts) {
      return std::none_of(alts.begin(), alts.end(), [&](const Literal& l) { return c.contains(l); });
    };
    for (const DisjunctiveFact& d : kb_.disjunctive_facts)
      if (open(d.alternatives)) return std::pair{d.alternatives, std::string("stated")};
    for (const FiredDisjunction& f : c.fired())
      if (open(f.alternatives))
        return std::pair{f.alternatives, c.program().rules()[f.derivation.rule].to_string()};
    return std::nullopt;
  }

  std::string instance(std::size_t rule, std::size_t disjunct, const Substitution& s) const {
    return join(apply_substitution(kb_.rules[rule].body[disjunct], s));
  }

  // Names the first failing builtin of a near-miss body instance, or a body
  // literal with no matching fact.
  std::string explain_failure(const Chainer& c) const {
    std::string missing;
    for (std::size_t ri = 0; ri < kb_.rules.size(); ++ri) {
      const Rule& r = kb_.rules[ri];
      if (r.disjunctive()) continue;
      for (const Literal& h : r.head) {
        Substitution seed;
        if (h.positive != goal_.positive || !match_atom(h.atom, goal_.atom, seed)) continue;
        for (const Conjunct& body : r.body) {
          Conjunct facts, builtins;
          for (const Literal& l : body) (is_builtin(l.atom.predicate) ? builtins : facts).push_back(l);
          std::string failed;
          match_conjunct(c.facts(), facts, seed, [&](const Substitution& s) {
            for (const Literal& b : builtins) {
              Literal g = apply_substitution(b, s);
              if (g.is_ground() && !eval_builtin(g.atom.predicate, g.atom.args)) {
                failed = join(apply_substitution(facts, s)) + ", " + g.to_string() + " is false";
                return false;
              }
            }
            return true;
          });
          if (!failed.empty()) return failed;
          if (missing.empty())
            for (const Literal& l : facts) {
              Literal g = apply_substitution(l, seed);
              if (match_conjunct(c.facts(), {g}, {}, [](const Substitution&) { return false; })) {
                missing = "no fact matches " + g.to_string();
                break;
              }
            }
        }
      }
    }
    if (!missing.empty()) return missing;
    return "no rule derives " + goal_.to_string();
  }

  const KnowledgeBase& kb_;
  Literal goal_;
  Strategy strategy_;
  PlanOptions opts_;
  QueryEngine engine_;
  std::shared_ptr<const RuleProgram> program_;
  PlanResult result_;
  std::size_t leaves_ = 0;
};

class ProofPlanner {
 public:
  ProofPlanner(const KnowledgeBase& kb, const Literal& goal)
      : kb_(kb), goal_(goal), goal_formula_(Formula::from_literal(goal)),
        program_(RuleProgram::direct(kb.rules, kb.domain())) {}

  Proof run(const CaseTree& tree) {
    Chainer root(program_);
    for (const Literal& f : kb_.facts) root.add_given(f);
    auto t = b_.new_thread({});
    build(tree, root, t);
    return b_.finish(t, goal_formula_);
  }

 private:
  void build(const CaseTree& node, Chainer& c, ProofBuilder::ThreadId t) {
    c.saturate();
    DerivationWriter w{b_, c};
    if (node.kind == CaseTree::Kind::Leaf) {
      if (!c.contains(goal_)) throw std::logic_error("goal missing from a holding branch");
      w.literal(t, goal_);
      return;
    }
    std::vector<Formula> alts;
    for (const Literal& l : node.alternatives) alts.push_back(Formula::from_literal(l));
    const Formula major = Formula::disj_of(alts);
    if (!b_.available(t, major)) {
      bool done = false;
      for (const DisjunctiveFact& d : kb_.disjunctive_facts)
        if (d.alternatives == node.alternatives) {
          b_.add_base(major);
          done = true;
          break;
        }
      for (std::size_t i = 0; !done && i < c.fired().size(); ++i)
        if (c.fired()[i].alternatives == node.alternatives) {
          w.rule(t, c.fired()[i].derivation);
          done = true;
        }
      if (!done) throw std::logic_error("split on an unknown disjunction");
    }
    split(node, 0, major, c, t);
  }

  // Case analysis on alternatives[i..], whose disjunction `major` is available in t.
  void split(const CaseTree& node, std::size_t i, const Formula& major, const Chainer& c,
             ProofBuilder::ThreadId t) {
    std::vector<Formula> base = b_.extras(t).to_vector();
    auto left_extras = base;
    left_extras.push_back(major.left());
    auto left = b_.new_thread(left_extras);
    Chainer lc = c;
    lc.add_given(node.alternatives[i]);
    build(node.children[i], lc, left);

    auto right_extras = base;
    right_extras.push_back(major.right());
    auto right = b_.new_thread(right_extras);
    if (i + 2 == node.alternatives.size()) {
      Chainer rc = c;
      rc.add_given(node.alternatives[i + 1]);
      build(node.children[i + 1], rc, right);
    } else {
      split(node, i + 1, major.right(), c, right);
    }
    b_.or_elim(t, major, left, right, goal_formula_);
  }

  const KnowledgeBase& kb_;
  Literal goal_;
  Formula goal_formula_;
  std::shared_ptr<const RuleProgram> program_;
  ProofBuilder b_;
};

}  // namespace

PlanResult decide_guaranteed(const KnowledgeBase& kb, const Literal& goal, const Strategy& s,
                             PlanOptions opts) {
  if (!goal.is_ground()) throw std::invalid_argument("goal must be ground: " + goal.to_string());
  Planner p(kb, goal, s, opts);
  return p.run();
}

Proof plan_proof(const KnowledgeBase& kb, const Literal& goal, const CaseTree& tree) {
  if (!tree.guaranteed()) throw std::invalid_argument("case tree has a failing or missing branch");
  ProofPlanner p(kb, goal);
  return p.run(tree);
}

}  // namespace ndp
