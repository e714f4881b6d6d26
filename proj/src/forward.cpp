#include "ndprover/forward.hpp"

#include <algorithm>
#include <map>

#include "ndprover/builtins.hpp"
#include "proof_builder.hpp"

namespace ndp {

// ---- safety -------------------------------------------------------------

namespace {

std::vector<std::string> literal_vars(const Literal& l) {
  std::vector<std::string> out;
  collect_variables(l.atom, out);
  return out;
}

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

std::set<std::string> SafetyVerdict::variables() const {
  std::set<std::string> out;
  for (const SafetyIssue& i : issues) out.insert(i.variable);
  return out;
}

std::string SafetyVerdict::describe() const {
  if (safe()) return "safe";
  std::string body_only, unbound;
  for (const std::string& v : variables()) {
    bool b = false, h = false;
    for (const SafetyIssue& i : issues) {
      if (i.variable != v) continue;
      (i.side == SafetyIssue::Side::BodyOnly ? b : h) = true;
    }
    if (b) body_only += (body_only.empty() ? "" : ", ") + v;
    if (h) unbound += (unbound.empty() ? "" : ", ") + v;
  }
  std::string out = "unsafe:";
  if (!body_only.empty()) out += " body variables not in the head {" + body_only + "}";
  if (!unbound.empty()) {
    if (!body_only.empty()) out += ";";
    out += " head variables not in a positive body literal {" + unbound + "}";
  }
  return out;
}

SafetyVerdict validate_safety(const Rule& r) {
  SafetyVerdict v;
  const DnfBody body = r.body.empty() ? DnfBody{Conjunct{}} : r.body;
  for (std::size_t d = 0; d < body.size(); ++d) {
    std::vector<std::string> body_vars, positive_vars;
    for (const Literal& l : body[d]) {
      collect_variables(l.atom, body_vars);
      if (l.positive && !is_builtin(l.atom.predicate)) collect_variables(l.atom, positive_vars);
    }
    std::vector<std::string> flagged;
    for (const Literal& h : r.head) {
      std::vector<std::string> head_vars = literal_vars(h);
      for (const std::string& x : body_vars)
        if (!contains(head_vars, x) && !contains(flagged, x)) {
          flagged.push_back(x);
          v.issues.push_back({x, SafetyIssue::Side::BodyOnly, d});
        }
    }
    flagged.clear();
    for (const std::string& x : r.universals)
      if (!contains(positive_vars, x) && !contains(flagged, x)) {
        flagged.push_back(x);
        v.issues.push_back({x, SafetyIssue::Side::HeadUnbound, d});
      }
  }
  return v;
}

bool range_restricted(const Rule& r) {
  const SafetyVerdict v = validate_safety(r);
  return std::none_of(v.issues.begin(), v.issues.end(), [](const SafetyIssue& i) {
    return i.side == SafetyIssue::Side::HeadUnbound;
  });
}

// ---- merging ------------------------------------------------------------

namespace {

struct Canonical {
  std::string key;
  std::vector<std::string> order;  // variables in canonical order
};

Canonical canonicalize(const std::vector<const std::vector<Literal>*>& parts, const char* sep) {
  Canonical c;
  for (const auto* part : parts)
    for (const Literal& l : *part) collect_variables(l.atom, c.order);
  Substitution s;
  for (std::size_t i = 0; i < c.order.size(); ++i)
    s.emplace(c.order[i], Term::variable("V" + std::to_string(i)));
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p) c.key += sep;
    for (const Literal& l : *parts[p]) c.key += apply_substitution(l, s).to_string() + "&";
  }
  return c;
}

Canonical body_key(const Rule& r) {
  std::vector<const std::vector<Literal>*> parts;
  for (const Conjunct& c : r.body) parts.push_back(&c);
  return canonicalize(parts, ";");
}

Canonical head_key(const Rule& r) { return canonicalize({&r.head}, ""); }

// Renames the variables of `r` into the namespace of `target`: the i-th
// canonical variable of `from` becomes the i-th of `to`, others become fresh.
Substitution renaming(const Rule& r, const Canonical& from, const Canonical& to, const Rule& target) {
  std::set<std::string> taken(target.universals.begin(), target.universals.end());
  taken.insert(target.existentials.begin(), target.existentials.end());
  Substitution s;
  for (std::size_t i = 0; i < from.order.size() && i < to.order.size(); ++i)
    s.emplace(from.order[i], Term::variable(to.order[i]));
  std::vector<std::string> all = r.universals;
  all.insert(all.end(), r.existentials.begin(), r.existentials.end());
  std::size_t n = 0;
  for (const std::string& v : all) {
    if (s.count(v)) continue;
    std::string fresh;
    do fresh = v + "_" + std::to_string(n++);
    while (taken.count(fresh));
    taken.insert(fresh);
    s.emplace(v, Term::variable(fresh));
  }
  return s;
}

Rule apply_renaming(const Rule& r, const Substitution& s) {
  std::vector<Literal> head;
  for (const Literal& l : r.head) head.push_back(apply_substitution(l, s));
  DnfBody body;
  for (const Conjunct& c : r.body) body.push_back(apply_substitution(c, s));
  return Rule::make(std::move(head), r.head_kind, std::move(body), r.span);
}

template <typename KeyFn, typename MergeFn>
std::vector<Rule> merge_by(const std::vector<Rule>& rules, KeyFn key, MergeFn merge) {
  std::vector<Rule> out;
  std::vector<Canonical> keys;
  std::map<std::string, std::size_t> slot;
  for (const Rule& r : rules) {
    if (r.disjunctive()) {
      out.push_back(r);
      keys.push_back({});
      continue;
    }
    Canonical k = key(r);
    auto it = slot.find(k.key);
    if (it == slot.end()) {
      slot.emplace(k.key, out.size());
      out.push_back(r);
      keys.push_back(std::move(k));
      continue;
    }
    Rule& into = out[it->second];
    into = merge(into, apply_renaming(r, renaming(r, k, keys[it->second], into)));
  }
  return out;
}

}  // namespace

std::vector<Rule> merge_rules(const std::vector<Rule>& rules) {
  auto disjoin = [](const Rule& a, const Rule& b) {
    DnfBody body = a.body;
    for (const Conjunct& c : b.body)
      if (std::find(body.begin(), body.end(), c) == body.end()) body.push_back(c);
    return Rule::make(a.head, HeadKind::Conjunctive, std::move(body), a.span);
  };
  auto conjoin = [](const Rule& a, const Rule& b) {
    std::vector<Literal> head = a.head;
    for (const Literal& l : b.head)
      if (std::find(head.begin(), head.end(), l) == head.end()) head.push_back(l);
    return Rule::make(std::move(head), HeadKind::Conjunctive, a.body, a.span);
  };
  std::vector<Rule> by_head = merge_by(rules, head_key, disjoin);
  return merge_by(by_head, body_key, conjoin);
}

// ---- compiled program ---------------------------------------------------

RuleProgram::RuleProgram(std::vector<Rule> rules, std::vector<Entry> entries,
                         std::optional<std::set<Term>> existential_domain)
    : rules_(std::move(rules)), entries_(std::move(entries)),
      existential_domain_(std::move(existential_domain)) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> watch;  // (atom, entry)
  ground_needs_.assign(entries_.size(), 0);
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    Entry& entry = entries_[e];
    std::stable_partition(entry.body.begin(), entry.body.end(),
                          [](const Literal& l) { return !is_builtin(l.atom.predicate); });
    Conjunct substituted;
    if (!entry.fixed.empty()) substituted = apply_substitution(entry.body, entry.fixed);
    const Conjunct& bound = entry.fixed.empty() ? entry.body : substituted;
    const bool ground = std::all_of(bound.begin(), bound.end(), [](const Literal& l) { return l.is_ground(); });
    const bool has_fact = std::any_of(bound.begin(), bound.end(),
                                      [](const Literal& l) { return !is_builtin(l.atom.predicate); });
    if (ground && has_fact) {
      bool live = true;
      std::vector<std::uint32_t> atoms;
      for (const Literal& l : bound) {
        if (is_builtin(l.atom.predicate)) {
          live = live && eval_builtin(l.atom.predicate, l.atom.args) == l.positive;
          continue;
        }
        auto id = ground_atoms_.insert(l).first;
        if (std::find(atoms.begin(), atoms.end(), id) == atoms.end()) atoms.push_back(id);
      }
      if (!live) continue;
      for (std::uint32_t a : atoms) watch.emplace_back(a, static_cast<std::uint32_t>(e));
      ground_needs_[e] = static_cast<std::uint32_t>(atoms.size());
      continue;
    }
    bool any = false;
    for (std::size_t i = 0; i < entry.body.size(); ++i) {
      const Literal& l = entry.body[i];
      if (is_builtin(l.atom.predicate)) continue;
      any = true;
      Literal bound = apply_substitution(l, entry.fixed);
      TriggerIndex& idx = (l.positive ? positive_ : negative_)[l.atom.predicate];
      if (!bound.atom.args.empty() && bound.atom.args[0].is_ground())
        idx.by_first[bound.atom.args[0]].push_back({e, i});
      else
        idx.any.push_back({e, i});
    }
    if (!any) unconditional_.push_back(e);
  }
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    if (!ground_needs_[e]) continue;
    Entry& entry = entries_[e];
    for (const Literal& h : entry.head) {
      auto id = h.is_ground() ? ground_atoms_.find(h) : std::nullopt;
      entry.head_atoms.push_back(id ? *id : kNoAtom);
    }
  }
  // Counting sort of the (atom, entry) pairs into per-atom ranges.
  watch_start_.assign(ground_atoms_.size() + 1, 0);
  for (const auto& [a, e] : watch) ++watch_start_[a + 1];
  for (std::size_t a = 0; a < ground_atoms_.size(); ++a) watch_start_[a + 1] += watch_start_[a];
  watch_flat_.resize(watch.size());
  std::vector<std::uint32_t> next(watch_start_.begin(), watch_start_.end() - 1);
  for (const auto& [a, e] : watch) watch_flat_[next[a]++] = e;
}

std::optional<std::uint32_t> RuleProgram::ground_atom(const Literal& fact) const {
  if (ground_atoms_.size() == 0) return std::nullopt;
  return ground_atoms_.find(fact);
}

std::shared_ptr<const RuleProgram> RuleProgram::direct(std::vector<Rule> rules,
                                                       std::optional<std::set<Term>> domain) {
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < rules.size(); ++r)
    for (std::size_t d = 0; d < rules[r].body.size(); ++d)
      entries.push_back({r, d, rules[r].body[d], {}, rules[r].head, rules[r].disjunctive(), {}});
  return std::make_shared<const RuleProgram>(std::move(rules), std::move(entries), std::move(domain));
}

void RuleProgram::triggers_for(const Literal& fact, std::vector<Trigger>& out) const {
  out.clear();
  const auto& table = fact.positive ? positive_ : negative_;
  auto it = table.find(fact.atom.predicate);
  if (it == table.end()) return;
  out.insert(out.end(), it->second.any.begin(), it->second.any.end());
  if (!fact.atom.args.empty()) {
    auto f = it->second.by_first.find(fact.atom.args[0]);
    if (f != it->second.by_first.end()) out.insert(out.end(), f->second.begin(), f->second.end());
  }
}

bool RuleProgram::admits(const Entry& e, const Substitution& s) const {
  if (!existential_domain_) return true;
  for (const std::string& x : rules_[e.source].existentials) {
    auto it = s.find(x);
    if (it != s.end() && !existential_domain_->count(it->second)) return false;
  }
  return true;
}

// ---- chaining -----------------------------------------------------------

std::string Contradiction::describe() const {
  return "contradiction: " + positive.to_string() + " and " + negative.to_string();
}

Chainer::Chainer(std::shared_ptr<const RuleProgram> program)
    : program_(std::move(program)), waiting_(program_->ground_needs()) {}

bool Chainer::insert(Literal fact, Derivation d, std::uint32_t atom) {
  auto [id, fresh] = store_.insert(std::move(fact));
  if (!fresh) return false;
  const Literal& l = store_.at(id);
  provenance_.push_back(std::move(d));
  pending_.push_back(id);
  if (atom == RuleProgram::kNoAtom) {
    if (auto a = program_->ground_atom(l)) atom = *a;
  }
  fact_atom_.push_back(atom);
  if (!contradiction_) {
    if (auto other = store_.find_complement(l)) {
      const bool pos = l.positive;
      contradiction_ = Contradiction{pos ? l : store_.at(*other), pos ? store_.at(*other) : l,
                                     provenance_[pos ? id : *other], provenance_[pos ? *other : id]};
    }
  }
  return true;
}

bool Chainer::add_given(const Literal& fact) {
  if (!insert(fact, Derivation{}, RuleProgram::kNoAtom)) return false;
  ++given_count_;
  return true;
}

std::optional<Derivation> Chainer::derivation_of(const Literal& l) const {
  if (auto id = store_.find(l)) return provenance_[*id];
  return std::nullopt;
}

void Chainer::fire(const RuleProgram::Entry& e, std::size_t, const Substitution& s) {
  if (!program_->admits(e, s)) return;
  Derivation d{Derivation::Kind::Rule, e.source, e.disjunct, s};
  if (e.disjunctive) {
    std::vector<Literal> alts;
    for (const Literal& h : e.head) alts.push_back(apply_substitution(h, s));
    if (fired_seen_.insert(alts).second) fired_.push_back({std::move(alts), std::move(d)});
    return;
  }
  for (std::size_t k = 0; k < e.head.size(); ++k) {
    const Literal& h = e.head[k];
    Literal g = h.is_ground() ? h : apply_substitution(h, s);
    if (!g.is_ground())
      throw UnsafeRuleError("rule derives a non-ground fact " + g.to_string() + ": " +
                            program_->rules()[e.source].to_string());
    insert(std::move(g), d, e.head_atoms.empty() ? RuleProgram::kNoAtom : e.head_atoms[k]);
    if (contradiction_) return;
  }
}

void Chainer::saturate() {
  const RuleProgram& prog = *program_;
  if (!unconditional_done_) {
    unconditional_done_ = true;
    for (std::size_t idx : prog.unconditional()) {
      const auto& e = prog.entries()[idx];
      match_conjunct(store_, e.body, e.fixed, [&](const Substitution& s) {
        fire(e, idx, s);
        return !contradiction_;
      });
    }
  }
  std::vector<RuleProgram::Trigger> triggers;
  while (!pending_.empty() && !contradiction_) {
    ++rounds_;
    std::vector<FactId> delta;
    delta.swap(pending_);
    for (FactId id : delta) {
      if (contradiction_) break;
      if (const std::uint32_t atom = fact_atom_[id]; atom != RuleProgram::kNoAtom) {
        for (std::uint32_t idx : prog.watchers(atom)) {
          if (--waiting_[idx] != 0) continue;
          const auto& e = prog.entries()[idx];
          fire(e, idx, e.fixed);
          if (contradiction_) break;
        }
        if (contradiction_) break;
      }
      if (!prog.has_matched_entries()) continue;
      const Literal fact = store_.at(id);
      prog.triggers_for(fact, triggers);
      for (const auto& [idx, lit] : triggers) {
        const auto& e = prog.entries()[idx];
        Substitution seed = e.fixed;
        if (!match_atom(e.body[lit].atom, fact.atom, seed)) continue;
        match_conjunct(
            store_, e.body, seed,
            [&](const Substitution& s) {
              fire(e, idx, s);
              return !contradiction_;
            },
            lit);
        if (contradiction_) break;
      }
    }
  }
}

// ---- fixpoint -----------------------------------------------------------

void sort_for_dump(std::vector<Literal>& facts) {
  auto key = [](const Literal& l) {
    std::string args;
    for (const Term& t : l.atom.args) args += t.to_string() + ",";
    return std::tuple{l.atom.predicate, std::move(args), !l.positive};
  };
  std::sort(facts.begin(), facts.end(),
            [&](const Literal& a, const Literal& b) { return key(a) < key(b); });
}

std::vector<Literal> FixpointResult::sorted_facts() const {
  std::vector<Literal> out = state.facts().facts();
  sort_for_dump(out);
  return out;
}

FixpointResult fixpoint(const KnowledgeBase& kb) {
  for (const Rule& r : kb.rules) {
    if (r.disjunctive())
      throw UnsafeRuleError("rule has a disjunctive head: " + r.to_string());
    SafetyVerdict v = validate_safety(r);
    if (!v.safe()) throw UnsafeRuleError(v.describe() + ": " + r.to_string());
  }
  Chainer c(RuleProgram::direct(kb.rules));
  for (const Literal& f : kb.facts) c.add_given(f);
  c.saturate();
  return FixpointResult{std::move(c)};
}

std::optional<Proof> entails_with_proof(const KnowledgeBase& kb, const Literal& goal) {
  FixpointResult fp = fixpoint(kb);
  if (!fp.state.contains(goal)) return std::nullopt;
  ProofBuilder b;
  auto t = b.new_thread({});
  DerivationWriter w{b, fp.state};
  w.literal(t, goal);
  return b.finish(t, Formula::from_literal(goal));
}

}  // namespace ndp
