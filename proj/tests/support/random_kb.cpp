#include "random_kb.hpp"

#include <algorithm>

#include "oracles.hpp"

namespace ndp::testkit {

namespace {

struct Gen {
  std::mt19937_64 rng;
  std::size_t below(std::size_t n) { return n ? std::uniform_int_distribution<std::size_t>(0, n - 1)(rng) : 0; }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng); }
};

const std::vector<std::string> kVars = {"X", "Y", "Z"};
const std::vector<std::string> kExist = {"E", "F"};

}  // namespace

RandomKb random_kb(std::uint64_t seed, const RandomKbOptions& o) {
  Gen g{std::mt19937_64(seed)};
  RandomKb out;
  const std::size_t nconst = 1 + g.below(o.max_constants);
  const std::size_t npred = 1 + g.below(o.max_predicates);
  for (std::size_t i = 0; i < nconst; ++i) out.constants.push_back(Term::constant("c" + std::to_string(i)));
  for (std::size_t i = 0; i < npred; ++i) {
    // Nullary predicates are rare.
    std::size_t arity = g.chance(0.1) ? 0 : 1 + g.below(o.max_arity);
    out.predicates.emplace_back("p" + std::to_string(i), arity);
  }
  auto constant = [&] { return out.constants[g.below(out.constants.size())]; };
  auto literal = [&](std::size_t pred, const std::vector<Term>& pool, bool positive) {
    Atom a{out.predicates[pred].first, {}};
    for (std::size_t i = 0; i < out.predicates[pred].second; ++i)
      a.args.push_back(pool.empty() || g.chance(0.2) ? constant() : pool[g.below(pool.size())]);
    return Literal{positive, a};
  };

  const std::size_t nfacts = g.below(o.max_facts + 1);
  for (std::size_t i = 0; i < nfacts; ++i)
    out.kb.add_fact(literal(g.below(npred), {}, !(o.negation && g.chance(0.15))));

  const std::size_t nrules = g.below(o.max_rules + 1);
  std::set<std::size_t> heads;
  for (std::size_t ri = 0; ri < nrules; ++ri) {
    std::vector<Term> hvars;
    for (std::size_t i = 0, n = g.below(3); i < n; ++i) hvars.push_back(Term::variable(kVars[i]));
    const std::size_t hp = g.below(npred);
    heads.insert(hp);
    std::vector<Literal> head{literal(hp, hvars, !(o.negation && g.chance(0.08)))};
    if (g.chance(0.15)) {
      const std::size_t hp2 = g.below(npred);
      heads.insert(hp2);
      head.push_back(literal(hp2, hvars, true));
      // Safety is per head atom: without existentials both atoms need the same variables.
      std::vector<std::string> v0, v1;
      collect_variables(head[0].atom, v0);
      collect_variables(head[1].atom, v1);
      std::sort(v0.begin(), v0.end());
      std::sort(v1.begin(), v1.end());
      v0.erase(std::unique(v0.begin(), v0.end()), v0.end());
      v1.erase(std::unique(v1.begin(), v1.end()), v1.end());
      if (head[1] == head[0] || (!o.existentials && v0 != v1)) head.pop_back();
    }
    std::vector<std::string> used;
    for (const Literal& h : head) collect_variables(h.atom, used);

    std::vector<Term> pool;
    for (const std::string& v : used) pool.push_back(Term::variable(v));
    std::vector<Term> body_pool = pool;
    if (o.existentials)
      for (std::size_t i = 0, n = g.below(3); i < n; ++i) body_pool.push_back(Term::variable(kExist[i]));

    DnfBody body;
    const std::size_t ndis = o.disjuncts && g.chance(0.25) ? 2 : 1;
    for (std::size_t d = 0; d < ndis; ++d) {
      Conjunct c;
      // Cover every head variable with a positive literal.
      for (const std::string& v : used) {
        std::vector<std::size_t> fit;
        for (std::size_t p = 0; p < npred; ++p)
          if (out.predicates[p].second > 0) fit.push_back(p);
        Literal l = literal(fit[g.below(fit.size())], body_pool, true);
        l.atom.args[g.below(l.atom.args.size())] = Term::variable(v);
        c.push_back(l);
      }
      for (std::size_t i = 0, n = g.below(3); i < n || c.empty(); ++i) {
        const bool positive = !(o.negation && g.chance(0.2));
        c.push_back(literal(g.below(npred), positive ? body_pool : pool, positive));
        if (c.size() > 4) break;
      }
      // A negative literal may only mention variables bound positively.
      std::vector<std::string> bound;
      for (const Literal& l : c)
        if (l.positive) collect_variables(l.atom, bound);
      for (Literal& l : c)
        if (!l.positive)
          for (Term& t : l.atom.args)
            if (t.is_variable() && std::find(bound.begin(), bound.end(), t.name()) == bound.end()) t = constant();
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      body.push_back(std::move(c));
    }
    out.kb.rules.push_back(Rule::make(std::move(head), HeadKind::Conjunctive, std::move(body)));
  }
  out.head_predicates.assign(heads.begin(), heads.end());
  return out;
}

std::vector<Literal> ground_instances(const RandomKb& r, std::size_t pred, bool positive) {
  std::vector<Literal> out;
  const auto& [name, arity] = r.predicates[pred];
  std::vector<std::size_t> idx(arity, 0);
  for (;;) {
    Atom a{name, {}};
    for (std::size_t i : idx) a.args.push_back(r.constants[i]);
    out.push_back(Literal{positive, a});
    std::size_t i = 0;
    while (i < arity && ++idx[i] == r.constants.size()) idx[i++] = 0;
    if (i == arity) return out;
  }
}

RandomPlan random_plan(std::uint64_t seed, std::size_t k) {
  RandomKbOptions o;
  o.negation = false;
  o.existentials = true;
  o.max_rules = 8;
  o.max_facts = 6;
  o.max_predicates = 4;
  o.max_constants = 4;
  RandomKb r = random_kb(seed, o);
  Gen g{std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ULL)};
  auto atom = [&] {
    const std::size_t p = g.below(r.predicates.size());
    Atom a{r.predicates[p].first, {}};
    for (std::size_t i = 0; i < r.predicates[p].second; ++i) a.args.push_back(r.constants[g.below(r.constants.size())]);
    return Literal{true, a};
  };
  std::size_t weather = 0, tries = 0;
  while (r.kb.disjunctive_facts.size() < k) {
    DisjunctiveFact d;
    if (g.chance(0.3)) {
      // w(c) | ~w(c); w feeds rule bodies but never heads.
      Literal w{true, Atom{"w" + std::to_string(weather++), {r.constants[0]}}};
      d.alternatives = {w, w.negated()};
      Rule rule = Rule::make({atom()}, HeadKind::Conjunctive, {{g.chance(0.5) ? w : w.negated()}});
      if (rule.head[0].atom.is_ground()) r.kb.rules.push_back(std::move(rule));
    } else if (++tries < 200) {
      d.alternatives = {atom(), atom()};
      if (d.alternatives[0] == d.alternatives[1]) continue;
      if (std::find(r.kb.disjunctive_facts.begin(), r.kb.disjunctive_facts.end(), d) != r.kb.disjunctive_facts.end())
        continue;
    } else {
      // Small signatures run out of distinct pairs; pad with unrelated atoms.
      const Literal x{true, Atom{"x" + std::to_string(tries), {}}}, y{true, Atom{"y" + std::to_string(tries), {}}};
      d.alternatives = {x, y};
    }
    r.kb.disjunctive_facts.push_back(std::move(d));
  }
  // Aim the goal at something one branch derives, so both verdicts occur.
  KnowledgeBase flat = r.kb;
  for (const DisjunctiveFact& d : r.kb.disjunctive_facts) flat.add_fact(d.alternatives[g.below(2)]);
  flat.disjunctive_facts.clear();
  std::vector<Literal> derived;
  for (const Literal& l : naive_closure(flat).facts)
    if (l.positive && l.atom.predicate[0] == 'p') derived.push_back(l);
  Literal goal = derived.empty() || g.chance(0.1) ? atom() : derived[g.below(derived.size())];
  return {std::move(r.kb), goal};
}

}  // namespace ndp::testkit
