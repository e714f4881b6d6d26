#include "ndprover/unify.hpp"

#include <algorithm>
#include <numeric>

#include "ndprover/builtins.hpp"

namespace ndp {

namespace {

// Triangular bindings during unification; resolved to idempotent form at the end.
Term walk(const Term& t, const Substitution& s) {
  Term cur = t;
  while (cur.is_variable()) {
    auto it = s.find(cur.name());
    if (it == s.end()) break;
    cur = it->second;
  }
  return cur;
}

bool occurs(const std::string& var, const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  if (w.is_variable()) return w.name() == var;
  if (!w.is_function()) return false;
  return std::any_of(w.args().begin(), w.args().end(),
                     [&](const Term& a) { return occurs(var, a, s); });
}

bool unify_terms(const Term& a, const Term& b, Substitution& s) {
  Term x = walk(a, s), y = walk(b, s);
  if (x == y) return true;
  if (x.is_variable()) {
    if (occurs(x.name(), y, s)) return false;
    s.emplace(x.name(), y);
    return true;
  }
  if (y.is_variable()) return unify_terms(y, x, s);
  if (!x.is_function() || !y.is_function()) return false;
  if (x.name() != y.name() || x.args().size() != y.args().size()) return false;
  for (std::size_t i = 0; i < x.args().size(); ++i)
    if (!unify_terms(x.args()[i], y.args()[i], s)) return false;
  return true;
}

Term resolve(const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  if (!w.is_function() || w.is_ground()) return w;
  std::vector<Term> args;
  for (const Term& a : w.args()) args.push_back(resolve(a, s));
  return Term::function(w.name(), std::move(args));
}

}  // namespace

std::optional<Substitution> unify(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
  Substitution s;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_terms(a.args[i], b.args[i], s)) return std::nullopt;
  Substitution out;
  for (const auto& [v, t] : s) out.emplace(v, resolve(t, s));
  return out;
}

bool match_term(const Term& pattern, const Term& ground, Substitution& s) {
  switch (pattern.kind()) {
    case Term::Kind::Variable: {
      auto [it, inserted] = s.emplace(pattern.name(), ground);
      return inserted || it->second == ground;
    }
    case Term::Kind::Constant:
    case Term::Kind::Integer:
      return pattern == ground;
    case Term::Kind::Function:
      if (pattern.is_ground()) return pattern == ground;
      if (!ground.is_function() || ground.name() != pattern.name() ||
          ground.args().size() != pattern.args().size())
        return false;
      for (std::size_t i = 0; i < pattern.args().size(); ++i)
        if (!match_term(pattern.args()[i], ground.args()[i], s)) return false;
      return true;
  }
  return false;
}

bool match_atom(const Atom& pattern, const Atom& ground, Substitution& s) {
  if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size())
    return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!match_term(pattern.args[i], ground.args[i], s)) return false;
  return true;
}

namespace {
std::size_t literal_hash(std::size_t atom_hash, bool positive) { return hash_combine(atom_hash, positive ? 1 : 2); }
}  // namespace

std::optional<FactId> FactStore::probe(std::size_t hash, bool positive, const Atom& a) const {
  if (slots_.empty()) return std::nullopt;
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = literal_hash(hash, positive) & mask;; i = (i + 1) & mask) {
    const FactId id = slots_[i];
    if (id == kEmpty) return std::nullopt;
    if (atom_hashes_[id] == hash && facts_[id].positive == positive && facts_[id].atom == a) return id;
  }
}

void FactStore::grow() {
  std::vector<FactId> slots(std::max<std::size_t>(16, slots_.size() * 2), kEmpty);
  const std::size_t mask = slots.size() - 1;
  for (FactId id = 0; id < facts_.size(); ++id) {
    std::size_t i = literal_hash(atom_hashes_[id], facts_[id].positive) & mask;
    while (slots[i] != kEmpty) i = (i + 1) & mask;
    slots[i] = id;
  }
  slots_.swap(slots);
}

std::pair<FactId, bool> FactStore::insert(const Literal& l) {
  if (auto id = find(l)) return {*id, false};
  return insert(Literal(l));
}

std::pair<FactId, bool> FactStore::insert(Literal&& l) {
  const std::size_t h = l.atom.hash();
  if (auto id = probe(h, l.positive, l.atom)) return {*id, false};
  const FactId id = static_cast<FactId>(facts_.size());
  facts_.push_back(std::move(l));
  atom_hashes_.push_back(h);
  if (2 * facts_.size() > slots_.size()) {
    grow();
  } else {
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = literal_hash(h, facts_.back().positive) & mask;
    while (slots_[i] != kEmpty) i = (i + 1) & mask;
    slots_[i] = id;
  }
  if (indexed_) index(id);
  return {id, true};
}

std::optional<FactId> FactStore::find(const Literal& l) const { return probe(l.atom.hash(), l.positive, l.atom); }

std::optional<FactId> FactStore::find_complement(const Literal& l) const {
  return probe(l.atom.hash(), !l.positive, l.atom);
}

void FactStore::index(FactId id) const {
  const Literal& l = facts_[id];
  PredIndex& idx = (l.positive ? positive_ : negative_)[l.atom.predicate];
  idx.all.push_back(id);
  if (idx.by_position.size() < l.atom.args.size()) idx.by_position.resize(l.atom.args.size());
  for (std::size_t i = 0; i < l.atom.args.size(); ++i) idx.by_position[i][l.atom.args[i]].push_back(id);
}

const FactStore::PredIndex* FactStore::index_for(const Literal& l) const {
  if (!indexed_) {
    indexed_ = true;
    for (FactId id = 0; id < facts_.size(); ++id) index(id);
  }
  const auto& table = l.positive ? positive_ : negative_;
  auto it = table.find(l.atom.predicate);
  return it == table.end() ? nullptr : &it->second;
}

std::span<const FactId> FactStore::candidates(const Literal& pattern, const Substitution& s) const {
  const PredIndex* idx = index_for(pattern);
  if (!idx) return {};
  std::span<const FactId> best = idx->all;
  for (std::size_t i = 0; i < pattern.atom.args.size() && i < idx->by_position.size(); ++i) {
    const Term& arg = pattern.atom.args[i];
    Term bound = arg.is_ground() ? arg : apply_substitution(arg, s);
    if (!bound.is_ground()) continue;
    auto it = idx->by_position[i].find(bound);
    if (it == idx->by_position[i].end()) return {};
    if (it->second.size() < best.size()) best = it->second;
  }
  return best;
}

namespace {

struct ConjunctMatcher {
  const FactStore& store;
  const Conjunct& conjunct;
  const MatchVisitor& visit;
  std::vector<bool> done;

  bool run(Substitution& s, std::size_t remaining) {
    if (remaining == 0) return visit(s);
    // Pick the most constrained fact literal; builtins only once ground.
    std::optional<std::size_t> pick;
    std::size_t best = 0;
    for (std::size_t i = 0; i < conjunct.size(); ++i) {
      if (done[i]) continue;
      const Literal& l = conjunct[i];
      if (is_builtin(l.atom.predicate)) {
        Atom a = apply_substitution(l.atom, s);
        if (!a.is_ground()) continue;
        if (eval_builtin(a.predicate, a.args) != l.positive) return true;
        done[i] = true;
        bool keep_going = run(s, remaining - 1);
        done[i] = false;
        return keep_going;
      }
      if (l.is_ground()) {
        if (!store.contains(l)) return true;
        done[i] = true;
        bool keep_going = run(s, remaining - 1);
        done[i] = false;
        return keep_going;
      }
      std::size_t n = store.candidates(l, s).size();
      if (!pick || n < best) {
        pick = i;
        best = n;
      }
    }
    if (!pick) {
      // Only non-ground builtins remain.
      for (std::size_t i = 0; i < conjunct.size(); ++i)
        if (!done[i]) {
          Atom a = apply_substitution(conjunct[i].atom, s);
          eval_builtin(a.predicate, a.args);  // throws: unbound builtin argument
        }
      return true;
    }
    const Literal& l = conjunct[*pick];
    done[*pick] = true;
    auto cands = store.candidates(l, s);
    // Copy: the span may be invalidated if the visitor inserts facts.
    std::vector<FactId> ids(cands.begin(), cands.end());
    for (FactId id : ids) {
      Substitution ext = s;
      if (!match_atom(l.atom, store.at(id).atom, ext)) continue;
      if (!run(ext, remaining - 1)) {
        done[*pick] = false;
        return false;
      }
    }
    done[*pick] = false;
    return true;
  }
};

}  // namespace

bool match_conjunct(const FactStore& store, const Conjunct& conjunct, const Substitution& seed,
                    const MatchVisitor& visit, std::optional<std::size_t> skip) {
  ConjunctMatcher m{store, conjunct, visit, std::vector<bool>(conjunct.size(), false)};
  std::size_t remaining = conjunct.size();
  if (skip) {
    m.done[*skip] = true;
    --remaining;
  }
  Substitution s = seed;
  return m.run(s, remaining);
}

std::vector<Substitution> match_premise(const Conjunct& conjunct, std::span<const Literal> facts) {
  FactStore store;
  for (const Literal& f : facts) store.insert(f);
  std::vector<Substitution> out;
  match_conjunct(store, conjunct, {}, [&](const Substitution& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace ndp
