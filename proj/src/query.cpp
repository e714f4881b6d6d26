#include "ndprover/query.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ndprover/builtins.hpp"
#include "proof_builder.hpp"

namespace ndp {

RuleClass classify_rule(const Rule& r) {
  RuleClass c;
  for (std::size_t d = 0; d < r.body.size(); ++d)
    c.existentials = std::max(c.existentials, r.existentials_in(d).size());
  if (r.disjunctive())
    c.fragment = Fragment::Planning;
  else if (!r.existentials.empty())
    c.fragment = Fragment::Query;
  return c;
}

GroundingLimitError::GroundingLimitError(std::size_t d, std::size_t n, std::size_t b)
    : std::runtime_error("grounding limit: D^N with D=" + std::to_string(d) + ", N=" +
                         std::to_string(n) + " exceeds " + std::to_string(b) + " rules"),
      domain(d), existentials(n), bound(b) {}

namespace {

// Product of the sizes, or nullopt once it passes `ceiling`.
std::optional<std::size_t> bounded_product(const std::vector<std::size_t>& sizes, std::size_t ceiling) {
  std::size_t n = 1;
  for (std::size_t s : sizes) {
    if (s == 0) return 0;
    if (n > ceiling / s) return std::nullopt;
    n *= s;
  }
  if (n > ceiling) return std::nullopt;
  return n;
}

// Calls fn with every assignment of vars[i] to an element of domains[i].
template <typename Fn>
void for_each_assignment(const std::vector<std::string>& vars,
                         const std::vector<const std::set<Term>*>& domains, Fn&& fn) {
  std::vector<std::set<Term>::const_iterator> at;
  for (const auto* d : domains) {
    if (d->empty()) return;
    at.push_back(d->begin());
  }
  while (true) {
    Substitution s;
    for (std::size_t i = 0; i < vars.size(); ++i) s.insert_or_assign(vars[i], *at[i]);
    fn(s);
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++at[i] != domains[i]->end()) break;
      at[i] = domains[i]->begin();
      if (i == 0) return;
    }
    if (vars.empty()) return;
  }
}

bool body_holds(const FactStore& store, const Conjunct& body, const Substitution& s) {
  return !match_conjunct(store, body, s, [](const Substitution&) { return false; });
}

Substitution restrict_to(const Substitution& s, const std::vector<std::string>& vars) {
  Substitution out;
  for (const std::string& v : vars)
    if (auto it = s.find(v); it != s.end()) out.emplace(v, it->second);
  return out;
}

}  // namespace

std::vector<Rule> ground_existentials(const Rule& r, const std::set<Term>& domain, std::size_t ceiling) {
  const std::size_t n = r.existentials.size();
  if (n == 0) return {r};
  if (!bounded_product(std::vector<std::size_t>(n, domain.size()), ceiling))
    throw GroundingLimitError(domain.size(), n, ceiling);
  std::vector<Rule> out;
  std::vector<const std::set<Term>*> doms(n, &domain);
  for_each_assignment(r.existentials, doms, [&](const Substitution& s) {
    DnfBody body;
    for (const Conjunct& c : r.body) body.push_back(apply_substitution(c, s));
    out.push_back(Rule::make(r.head, r.head_kind, std::move(body), r.span));
  });
  return out;
}

GroundedProgram ground_program(const std::vector<Rule>& rules, const KnowledgeBase& kb,
                               std::size_t ceiling) {
  const KnowledgeBase::SortMap sorts = kb.position_sorts();
  const std::set<Term> objects = kb.domain(Sort::Object), integers = kb.domain(Sort::Integer);
  auto domain_of = [&](const Rule& r, const std::string& v) {
    return variable_sort(sorts, r, v) == Sort::Integer ? &integers : &objects;
  };
  GroundedProgram g;
  std::vector<RuleProgram::Entry> entries;
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    const Rule& r = rules[ri];
    std::vector<std::size_t> sizes;
    std::size_t widest = 0;
    for (const std::string& e : r.existentials) {
      sizes.push_back(domain_of(r, e)->size());
      widest = std::max(widest, sizes.back());
    }
    auto count = bounded_product(sizes, ceiling);
    if (!count) throw GroundingLimitError(widest, r.existentials.size(), ceiling);
    g.ground_rules += *count;
    for (std::size_t d = 0; d < r.body.size(); ++d) {
      std::vector<std::string> vars = r.existentials_in(d);
      std::vector<const std::set<Term>*> doms;
      for (const std::string& v : vars) doms.push_back(domain_of(r, v));
      for_each_assignment(vars, doms, [&](const Substitution& s) {
        entries.push_back({ri, d, r.body[d], s, r.head, r.disjunctive(), {}});
      });
    }
  }
  g.program = std::make_shared<const RuleProgram>(rules, std::move(entries));
  return g;
}

std::vector<Substitution> shallow_query(const FactStore& idx, const Conjunct& body,
                                        const Substitution& bound) {
  std::vector<Substitution> out;
  std::set<Substitution> seen;
  match_conjunct(idx, body, bound, [&](const Substitution& s) {
    if (seen.insert(s).second) out.push_back(s);
    return true;
  });
  return out;
}

// ---- ranking ------------------------------------------------------------

RankingModel::RankingModel(const std::vector<Literal>& facts) {
  for (const Literal& l : facts) {
    if (!l.positive) continue;
    for (std::size_t i = 0; i < l.atom.args.size(); ++i) {
      auto [it, fresh] = scores_.try_emplace({l.atom.predicate, i, l.atom.args[i]}, 1.0);
      it->second += 1.0;
    }
  }
}

double RankingModel::score(const std::string& pred, std::size_t pos, const Term& c) const {
  auto it = scores_.find({pred, pos, c});
  return it == scores_.end() ? 1.0 : it->second;
}

void RankingModel::set_score(const std::string& pred, std::size_t pos, const Term& c, double s) {
  scores_[{pred, pos, c}] = s;
}

std::vector<Term> rank_candidates(const RankingModel& m, const std::string& pred, std::size_t pos,
                                  const std::set<Term>& domain) {
  std::vector<std::pair<double, Term>> scored;
  for (const Term& c : domain) scored.emplace_back(m.score(pred, pos, c), c);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.to_string() < b.second.to_string();
  });
  std::vector<Term> out;
  for (auto& [s, c] : scored) out.push_back(c);
  return out;
}

Strategy Strategy::astar(std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("A* budget must be at least 1");
  return {Kind::AStar, budget};
}

std::string Strategy::name() const {
  switch (kind) {
    case Kind::FullGrounding: return "ground";
    case Kind::Shallow: return "shallow";
    case Kind::TopOneRanked: return "top1";
    case Kind::AStar: return "astar";
  }
  return "?";
}

std::string_view status_name(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::Found: return "found";
    case AnswerStatus::NotFound: return "not-found";
    case AnswerStatus::BudgetExhausted: return "budget-exhausted";
    case AnswerStatus::GroundingLimit: return "grounding-limit";
  }
  return "?";
}

// ---- engine -------------------------------------------------------------

QueryEngine::QueryEngine(KnowledgeBase kb, QueryOptions opts)
    : kb_(std::move(kb)), opts_(opts), ranking_(kb_.facts) {
  for (const Literal& f : kb_.facts) stored_.insert(f);
  for (std::size_t r = 0; r < kb_.rules.size(); ++r) {
    if (kb_.rules[r].disjunctive()) continue;
    for (const Literal& h : kb_.rules[r].head) {
      auto& slot = by_head_[{h.positive, h.atom.predicate}];
      if (slot.empty() || slot.back() != r) slot.push_back(r);
    }
  }
  sorts_ = kb_.position_sorts();
  all_constants_ = kb_.domain();
  for (const Term& t : all_constants_) (t.is_integer() ? integers_ : objects_).insert(t);
  direct_ = RuleProgram::direct(kb_.rules, all_constants_);
}

const std::set<Term>& QueryEngine::domain(const Rule& r, const std::string& var) const {
  return variable_sort(sorts_, r, var) == Sort::Integer ? integers_ : objects_;
}

GroundedProgram QueryEngine::grounded_program() const {
  return ground_program(kb_.rules, kb_, opts_.grounding_ceiling);
}

const Chainer& QueryEngine::direct_closure() {
  if (!direct_closure_) {
    Chainer c(direct_);
    for (const Literal& f : kb_.facts) c.add_given(f);
    c.saturate();
    direct_closure_.emplace(std::move(c));
  }
  return *direct_closure_;
}

const Chainer& QueryEngine::grounded_closure() {
  if (!grounded_closure_) {
    if (!grounded_) grounded_ = grounded_program();
    Chainer c(grounded_->program);
    for (const Literal& f : kb_.facts) c.add_given(f);
    c.saturate();
    grounded_closure_.emplace(std::move(c));
  }
  return *grounded_closure_;
}

std::size_t QueryEngine::ground_rule_count() {
  if (!grounded_) grounded_ = grounded_program();
  return grounded_->ground_rules;
}

std::vector<QueryEngine::Target> QueryEngine::targets(const Literal& goal) const {
  std::vector<Target> out;
  auto it = by_head_.find({goal.positive, goal.atom.predicate});
  if (it == by_head_.end()) return out;
  for (std::size_t ri : it->second) {
    const Rule& r = kb_.rules[ri];
    for (const Literal& h : r.head) {
      if (h.positive != goal.positive) continue;
      Substitution s;
      if (!match_atom(h.atom, goal.atom, s)) continue;
      for (std::size_t d = 0; d < r.body.size(); ++d) {
        std::vector<std::string> open = r.existentials_in(d);
        std::vector<std::string> vars;
        for (const Literal& l : r.body[d]) collect_variables(l.atom, vars);
        for (const std::string& v : vars)
          if (!s.count(v) && std::find(open.begin(), open.end(), v) == open.end()) open.push_back(v);
        out.push_back({ri, d, s, std::move(open)});
      }
      break;
    }
  }
  return out;
}

Answer QueryEngine::via_rule(const Target& t, Substitution s, AnswerStatus st) const {
  Answer a;
  a.status = st;
  a.rule = t.rule;
  a.disjunct = t.disjunct;
  a.witness = restrict_to(s, t.open);
  a.bindings = std::move(s);
  return a;
}

std::pair<std::string, std::size_t> QueryEngine::rank_position(const Conjunct& body,
                                                               const std::string& var) const {
  for (int pass = 0; pass < 2; ++pass)
    for (const Literal& l : body) {
      if (is_builtin(l.atom.predicate)) continue;
      if (pass == 0 && !l.positive) continue;
      for (std::size_t i = 0; i < l.atom.args.size(); ++i)
        if (l.atom.args[i].is_variable() && l.atom.args[i].name() == var)
          return {l.atom.predicate, i};
    }
  return {"", 0};
}

Answer QueryEngine::top_one(const Literal& goal, const Chainer& closure) const {
  std::size_t expansions = 0;
  for (const Target& t : targets(goal)) {
    const Rule& r = kb_.rules[t.rule];
    const Conjunct& body = r.body[t.disjunct];
    Substitution s = t.seed;
    bool ok = true;
    for (const std::string& e : t.open) {
      auto [pred, pos] = rank_position(body, e);
      std::vector<Term> ranked = rank_candidates(ranking_, pred, pos, domain(r, e));
      ++expansions;
      if (ranked.empty()) {
        ok = false;
        break;
      }
      s.insert_or_assign(e, ranked.front());
    }
    if (ok && body_holds(closure.facts(), body, s)) {
      Answer a = via_rule(t, std::move(s), AnswerStatus::Found);
      a.stats.expansions = expansions;
      return a;
    }
  }
  Answer a;
  a.stats.expansions = expansions;
  return a;
}

Answer QueryEngine::astar(const Literal& goal, const Chainer& closure, std::size_t budget) const {
  struct Node {
    double cost;
    std::size_t seq;
    std::size_t target;
    std::size_t next;  // index of the next existential to assign
    Substitution s;
  };
  auto worse = [](const Node& a, const Node& b) {
    return a.cost != b.cost ? a.cost > b.cost : a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  const std::vector<Target> ts = targets(goal);
  std::vector<std::vector<std::string>> exs;
  std::size_t seq = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    exs.push_back(ts[i].open);
    open.push({0.0, seq++, i, 0, ts[i].seed});
  }
  auto pruned = [&](const Conjunct& body, const Substitution& s) {
    for (const Literal& l : body) {
      Literal g = apply_substitution(l, s);
      if (!g.is_ground()) continue;
      if (is_builtin(g.atom.predicate)) {
        if (!eval_builtin(g.atom.predicate, g.atom.args)) return true;
      } else if (!closure.contains(g)) {
        return true;
      }
    }
    return false;
  };

  std::size_t expansions = 0;
  while (!open.empty()) {
    if (expansions >= budget) {
      Answer a;
      a.status = AnswerStatus::BudgetExhausted;
      a.stats.expansions = expansions;
      a.detail = "A* budget of " + std::to_string(budget) + " expansions exhausted";
      return a;
    }
    Node n = open.top();
    open.pop();
    ++expansions;
    const Target& t = ts[n.target];
    const Rule& r = kb_.rules[t.rule];
    const Conjunct& body = r.body[t.disjunct];
    const auto& vars = exs[n.target];
    if (n.next == vars.size()) {
      if (body_holds(closure.facts(), body, n.s)) {
        Answer a = via_rule(t, std::move(n.s), AnswerStatus::Found);
        a.stats.expansions = expansions;
        return a;
      }
      continue;
    }
    const std::string& e = vars[n.next];
    auto [pred, pos] = rank_position(body, e);
    const std::set<Term>& dom = domain(r, e);
    double best = 0.0;
    for (const Term& c : dom) best = std::max(best, ranking_.score(pred, pos, c));
    for (const Term& c : rank_candidates(ranking_, pred, pos, dom)) {
      Substitution s = n.s;
      s.insert_or_assign(e, c);
      if (pruned(body, s)) continue;
      double step = best > 0.0 ? -std::log(ranking_.score(pred, pos, c) / best) : 0.0;
      open.push({n.cost + step, seq++, n.target, n.next + 1, std::move(s)});
    }
  }
  Answer a;
  a.stats.expansions = expansions;
  return a;
}

Answer QueryEngine::resolve(const Literal& goal, const Strategy& s, const FactStore& stored,
                            const Chainer* closure) const {
  if (stored.contains(goal)) {
    Answer a;
    a.status = AnswerStatus::Found;
    return a;
  }
  auto need = [&] {
    if (!closure) throw std::invalid_argument(s.name() + " strategy needs a saturated closure");
    return closure;
  };
  switch (s.kind) {
    case Strategy::Kind::FullGrounding: {
      const Chainer* c = need();
      Answer a;
      if (auto d = c->derivation_of(goal)) {
        a.status = AnswerStatus::Found;
        if (d->kind == Derivation::Kind::Rule) {
          Target t{d->rule, d->disjunct, {}, {}};
          for (const Target& c : targets(goal))
            if (c.rule == d->rule && c.disjunct == d->disjunct) t = c;
          a = via_rule(t, d->subst, AnswerStatus::Found);
        }
      }
      return a;
    }
    case Strategy::Kind::Shallow:
      for (const Target& t : targets(goal)) {
        std::vector<Substitution> found =
            shallow_query(stored, kb_.rules[t.rule].body[t.disjunct], t.seed);
        if (!found.empty()) return via_rule(t, std::move(found.front()), AnswerStatus::Found);
      }
      return {};
    case Strategy::Kind::TopOneRanked:
      return top_one(goal, *need());
    case Strategy::Kind::AStar:
      if (s.budget == 0) throw std::invalid_argument("A* budget must be at least 1");
      return astar(goal, *need(), s.budget);
  }
  return {};
}

Answer QueryEngine::answer(const Literal& goal, const Strategy& s, bool want_proof) {
  if (!goal.is_ground()) throw std::invalid_argument("goal must be ground: " + goal.to_string());
  const Chainer* closure = nullptr;
  std::size_t generated = 0;
  if (s.kind == Strategy::Kind::FullGrounding) {
    try {
      closure = &grounded_closure();
      generated = grounded_->ground_rules;
    } catch (const GroundingLimitError& e) {
      Answer a;
      a.status = AnswerStatus::GroundingLimit;
      a.detail = e.what();
      return a;
    }
  } else if (s.kind != Strategy::Kind::Shallow || (want_proof && !stored_.contains(goal))) {
    closure = &direct_closure();
  }

  Answer a = resolve(goal, s, stored_, closure);
  a.stats.rules_generated = generated;
  if (closure) a.stats.facts_derived = closure->facts().size() - closure->given_count();
  if (!a.found() || !want_proof) return a;

  ProofBuilder b;
  auto t = b.new_thread({});
  if (!a.rule) {
    b.add_base(Formula::from_literal(goal));
  } else {
    if (!closure) closure = &direct_closure();
    DerivationWriter w{b, *closure};
    w.derived(t, goal, Derivation{Derivation::Kind::Rule, *a.rule, a.disjunct, a.bindings});
  }
  a.proof = b.finish(t, Formula::from_literal(goal));
  return a;
}

Answer answer(const KnowledgeBase& kb, const Literal& goal, const Strategy& s, bool want_proof) {
  QueryEngine e(kb);
  return e.answer(goal, s, want_proof);
}

}  // namespace ndp
