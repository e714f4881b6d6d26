#include "proof_builder.hpp"

#include <stdexcept>

#include "ndprover/builtins.hpp"

namespace ndp {

ProofBuilder::ThreadId ProofBuilder::new_thread(const std::vector<Formula>& extras) {
  Thread th;
  for (const Formula& f : extras) th.extras.insert(f);
  th.last = steps_.size();
  steps_.push_back({RuleTag::Axiom, {}, th.extras, th.extras, {}});
  threads_.push_back(std::move(th));
  return threads_.size() - 1;
}

bool ProofBuilder::available(ThreadId t, const Formula& f) const {
  const Thread& th = threads_[t];
  return base_.contains(f) || th.extras.contains(f) || th.derived.contains(f);
}

void ProofBuilder::require(ThreadId t, const Formula& f, const char* what) const {
  if (!available(t, f))
    throw std::logic_error(std::string(what) + ": premise not available: " + f.to_string());
}

void ProofBuilder::emit(ThreadId t, RuleTag rule, std::vector<std::size_t> more_inputs,
                        std::initializer_list<Formula> added, Witness w) {
  Thread& th = threads_[t];
  for (const Formula& f : added) th.derived.insert(f);
  Raw r{rule, {th.last}, th.extras, th.extras, std::move(w)};
  r.inputs.insert(r.inputs.end(), more_inputs.begin(), more_inputs.end());
  for (const auto& [k, f] : th.derived) r.conclusions.insert(f);
  th.last = steps_.size();
  steps_.push_back(std::move(r));
}

void ProofBuilder::and_intro(ThreadId t, const Formula& conj) {
  if (available(t, conj)) return;
  require(t, conj.left(), "and_intro");
  require(t, conj.right(), "and_intro");
  emit(t, RuleTag::AndIntro, {}, {conj});
}

void ProofBuilder::and_elim(ThreadId t, const Formula& conj) {
  if (available(t, conj.left()) && available(t, conj.right())) return;
  require(t, conj, "and_elim");
  emit(t, RuleTag::AndElim, {}, {conj.left(), conj.right()});
}

void ProofBuilder::or_intro(ThreadId t, const Formula& disj) {
  if (available(t, disj)) return;
  if (!available(t, disj.left())) require(t, disj.right(), "or_intro");
  emit(t, RuleTag::OrIntro, {}, {disj});
}

void ProofBuilder::imp_elim(ThreadId t, const Formula& imp) {
  if (available(t, imp.right())) return;
  require(t, imp, "imp_elim");
  require(t, imp.left(), "imp_elim");
  emit(t, RuleTag::ImpElim, {}, {imp.right()});
}

Formula ProofBuilder::forall_elim(ThreadId t, const Formula& forall, const Term& term) {
  Formula inst = instantiate(forall.body(), forall.var(), term);
  if (available(t, inst)) return inst;
  require(t, forall, "forall_elim");
  emit(t, RuleTag::ForAllElim, {}, {inst}, Witness{term, std::nullopt, std::nullopt});
  return inst;
}

void ProofBuilder::exists_intro(ThreadId t, const Formula& exists, const Term& term) {
  if (available(t, exists)) return;
  require(t, instantiate(exists.body(), exists.var(), term), "exists_intro");
  emit(t, RuleTag::ExistsIntro, {}, {exists}, Witness{term, std::nullopt, std::nullopt});
}

void ProofBuilder::or_elim(ThreadId main, const Formula& disj, ThreadId left, ThreadId right,
                           const Formula& goal) {
  require(main, disj, "or_elim");
  require(left, goal, "or_elim");
  require(right, goal, "or_elim");
  emit(main, RuleTag::OrElim, {threads_[left].last, threads_[right].last}, {goal},
       Witness{std::nullopt, disj, goal});
}

Proof ProofBuilder::finish(ThreadId t, const Formula& goal) const {
  require(t, goal, "finish");
  Proof p;
  std::vector<std::size_t> remap(steps_.size(), 0);
  // Only steps the final one depends on are kept.
  std::vector<bool> keep(steps_.size(), false);
  keep[threads_[t].last] = true;
  for (std::size_t i = steps_.size(); i-- > 0;)
    if (keep[i])
      for (std::size_t in : steps_[i].inputs) keep[in] = true;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!keep[i]) continue;
    const Raw& r = steps_[i];
    ProofStep s;
    s.rule = r.rule;
    for (std::size_t in : r.inputs) s.inputs.push_back(remap[in]);
    s.output.assumptions = r.extras;
    s.output.conclusions = r.conclusions;
    for (const auto& [k, f] : base_) {
      s.output.assumptions.insert(f);
      s.output.conclusions.insert(f);
    }
    s.witness = r.witness;
    remap[i] = p.steps.size();
    p.steps.push_back(std::move(s));
  }
  p.goal.assumptions = p.steps.back().output.assumptions;
  p.goal.conclusions.insert(goal);
  return p;
}

// ---- provenance replay --------------------------------------------------

void DerivationWriter::literal(ProofBuilder::ThreadId t, const Literal& l) {
  const Formula f = Formula::from_literal(l);
  if (builder.available(t, f)) return;
  if (is_builtin(l.atom.predicate)) {
    if (!eval_builtin(l.atom.predicate, l.atom.args))
      throw std::logic_error("false builtin in a derivation: " + l.to_string());
    builder.add_base(f);
    return;
  }
  auto d = chainer.derivation_of(l);
  if (!d) throw std::logic_error("no derivation for " + l.to_string());
  if (d->kind != Derivation::Kind::Rule) {
    builder.add_base(f);
    return;
  }
  derived(t, l, *d);
}

void DerivationWriter::derived(ProofBuilder::ThreadId t, const Literal& l, const Derivation& d) {
  const Formula f = Formula::from_literal(l);
  if (builder.available(t, f)) return;
  Formula head = rule(t, d);
  // Decompose a conjoined head down to the wanted literal.
  while (!builder.available(t, f) && head.is(Formula::Kind::And)) {
    builder.and_elim(t, head);
    head = head.right();
  }
  if (!builder.available(t, f)) throw std::logic_error("rule head does not yield " + l.to_string());
}

Formula DerivationWriter::rule(ProofBuilder::ThreadId t, const Derivation& d) {
  const Rule& r = chainer.program().rules()[d.rule];
  for (const Literal& l : r.body[d.disjunct]) literal(t, apply_substitution(l, d.subst));

  Formula current = r.to_formula();
  builder.add_base(current);
  for (std::size_t i = 0; i < r.universals.size(); ++i) {
    auto it = d.subst.find(r.universals[i]);
    if (it == d.subst.end()) throw std::logic_error("unbound universal " + r.universals[i]);
    current = builder.forall_elim(t, current, it->second);
  }

  // Peel the existential prefix, choosing a witness for each layer.
  std::vector<Formula> layers;
  std::vector<Term> witnesses;
  Formula inner = current.left();
  for (std::size_t i = 0; i < r.existentials.size(); ++i) {
    auto it = d.subst.find(r.existentials[i]);
    Term w = it != d.subst.end() ? it->second : Term::variable(inner.var());
    layers.push_back(inner);
    witnesses.push_back(w);
    inner = instantiate(inner.body(), inner.var(), w);
  }

  // inner is D1 | (D2 | ... ) with the chosen disjunct fully instantiated.
  const std::size_t m = r.body.size();
  std::vector<Formula> suffix{inner};
  for (std::size_t j = 0; j + 1 < m; ++j) suffix.push_back(suffix.back().right());
  const Formula chosen = d.disjunct + 1 < m ? suffix[d.disjunct].left() : suffix[d.disjunct];

  std::vector<Formula> conj{chosen};
  for (std::size_t k = 0; k + 1 < r.body[d.disjunct].size(); ++k) conj.push_back(conj.back().right());
  for (std::size_t k = conj.size() - 1; k-- > 0;) builder.and_intro(t, conj[k]);

  if (d.disjunct + 1 < m) builder.or_intro(t, suffix[d.disjunct]);
  for (std::size_t j = d.disjunct; j-- > 0;) builder.or_intro(t, suffix[j]);

  for (std::size_t i = layers.size(); i-- > 0;) builder.exists_intro(t, layers[i], witnesses[i]);

  builder.imp_elim(t, current);
  return current.right();
}

}  // namespace ndp
