#pragma once

#include <vector>

#include "ndprover/forward.hpp"
#include "ndprover/proof.hpp"

namespace ndp {

// Emits proof steps into parallel threads of reasoning. Every thread starts
// from an axiom over the shared base plus its own case assumptions; steps only
// add conclusions. Formulas put into the base (given facts, rule formulas,
// builtin truths) are added to every sequent when the proof is finished.
class ProofBuilder {
 public:
  using ThreadId = std::size_t;

  ThreadId new_thread(const std::vector<Formula>& extras);
  const FormulaSet& extras(ThreadId t) const { return threads_[t].extras; }

  void add_base(const Formula& f) { base_.insert(f); }
  bool available(ThreadId t, const Formula& f) const;

  void and_intro(ThreadId t, const Formula& conj);
  void and_elim(ThreadId t, const Formula& conj);
  void or_intro(ThreadId t, const Formula& disj);
  void imp_elim(ThreadId t, const Formula& imp);
  Formula forall_elim(ThreadId t, const Formula& forall, const Term& term);
  void exists_intro(ThreadId t, const Formula& exists, const Term& term);
  // Closes `left` and `right`, which assume the two sides of `disj` on top of
  // the assumptions of `main` and both prove `goal`.
  void or_elim(ThreadId main, const Formula& disj, ThreadId left, ThreadId right,
               const Formula& goal);

  Proof finish(ThreadId t, const Formula& goal) const;

 private:
  struct Thread {
    FormulaSet extras;
    FormulaSet derived;
    std::size_t last = 0;
  };
  struct Raw {
    RuleTag rule;
    std::vector<std::size_t> inputs;
    FormulaSet extras;
    FormulaSet conclusions;  // without the base
    Witness witness;
  };
  void require(ThreadId t, const Formula& f, const char* what) const;
  void emit(ThreadId t, RuleTag rule, std::vector<std::size_t> more_inputs,
            std::initializer_list<Formula> added, Witness w = {});

  FormulaSet base_;
  std::vector<Thread> threads_;
  std::vector<Raw> steps_;
};

// Replays chainer provenance as natural deduction steps.
struct DerivationWriter {
  ProofBuilder& builder;
  const Chainer& chainer;

  // Makes `l` available in thread `t`. Given facts that are not case
  // assumptions of the thread go into the base.
  void literal(ProofBuilder::ThreadId t, const Literal& l);
  // Makes `l` available by applying the rule instance `d`, whose head contains it.
  void derived(ProofBuilder::ThreadId t, const Literal& l, const Derivation& d);
  // Applies a rule instance and returns its (instantiated) head formula.
  Formula rule(ProofBuilder::ThreadId t, const Derivation& d);
};

}  // namespace ndp
