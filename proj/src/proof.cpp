#include "ndprover/proof.hpp"

#include <algorithm>
#include <functional>

namespace ndp {

FormulaSet::FormulaSet(std::initializer_list<Formula> fs) {
  for (const Formula& f : fs) insert(f);
}

bool FormulaSet::insert(const Formula& f) { return items_.emplace(f.alpha_key(), f).second; }

bool FormulaSet::erase(const Formula& f) { return items_.erase(f.alpha_key()) > 0; }

bool FormulaSet::subset_of(const FormulaSet& other) const {
  if (size() > other.size()) return false;
  return std::all_of(items_.begin(), items_.end(),
                     [&](const auto& kv) { return other.items_.count(kv.first) > 0; });
}

std::vector<Formula> FormulaSet::minus(const FormulaSet& other) const {
  std::vector<Formula> out;
  for (const auto& [k, f] : items_)
    if (!other.items_.count(k)) out.push_back(f);
  return out;
}

std::vector<Formula> FormulaSet::to_vector() const {
  std::vector<Formula> out;
  out.reserve(items_.size());
  for (const auto& [k, f] : items_) out.push_back(f);
  return out;
}

std::size_t FormulaSet::total_size() const {
  std::size_t n = 0;
  for (const auto& [k, f] : items_) n += f.size();
  return n;
}

bool operator==(const FormulaSet& a, const FormulaSet& b) {
  if (a.items_.size() != b.items_.size()) return false;
  return std::equal(a.items_.begin(), a.items_.end(), b.items_.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; });
}

std::size_t Proof::total_size() const {
  std::size_t n = goal.assumptions.total_size() + goal.conclusions.total_size();
  for (const ProofStep& s : steps)
    n += s.output.assumptions.total_size() + s.output.conclusions.total_size();
  return n;
}

std::string_view tag_name(RuleTag r) {
  switch (r) {
    case RuleTag::Axiom: return "Axiom";
    case RuleTag::AndIntro: return "AndIntro";
    case RuleTag::AndElim: return "AndElim";
    case RuleTag::OrIntro: return "OrIntro";
    case RuleTag::OrElim: return "OrElim";
    case RuleTag::ImpIntro: return "ImpIntro";
    case RuleTag::ImpElim: return "ImpElim";
    case RuleTag::ForAllIntro: return "ForAllIntro";
    case RuleTag::ForAllElim: return "ForAllElim";
    case RuleTag::ExistsIntro: return "ExistsIntro";
    case RuleTag::ExistsElim: return "ExistsElim";
    case RuleTag::BottomIntro: return "BottomIntro";
    case RuleTag::BottomElim: return "BottomElim";
  }
  return "?";
}

std::string_view display_name(RuleTag r) {
  switch (r) {
    case RuleTag::Axiom: return "Axiom";
    case RuleTag::AndIntro: return "∧-Intro";
    case RuleTag::AndElim: return "∧-Elim";
    case RuleTag::OrIntro: return "∨-Intro";
    case RuleTag::OrElim: return "∨-Elim";
    case RuleTag::ImpIntro: return "→-Intro";
    case RuleTag::ImpElim: return "→-Elim";
    case RuleTag::ForAllIntro: return "∀-Intro";
    case RuleTag::ForAllElim: return "∀-Elim";
    case RuleTag::ExistsIntro: return "∃-Intro";
    case RuleTag::ExistsElim: return "∃-Elim";
    case RuleTag::BottomIntro: return "⊥-Intro";
    case RuleTag::BottomElim: return "⊥-Elim";
  }
  return "?";
}

std::optional<RuleTag> parse_tag(std::string_view s) {
  for (RuleTag r : kAllRules)
    if (tag_name(r) == s) return r;
  if (s == "Axiom") return RuleTag::Axiom;
  return std::nullopt;
}

std::string_view fragment_name(Fragment f) {
  switch (f) {
    case Fragment::Forward: return "forward";
    case Fragment::Query: return "query";
    case Fragment::Planning: return "planning";
    case Fragment::Full: return "full";
  }
  return "?";
}

std::string Violation::message() const {
  std::string out = "step " + std::to_string(step + 1) + ": ";
  if (rule) {
    out += display_name(*rule);
    out += ' ';
  }
  return out + condition;
}

namespace {

using SequentRef = std::function<const Sequent&(std::size_t)>;

// Conclusion-set bookkeeping shared by the rules that act on one sequent:
// there is a C0 with C0 ∪ consumed = in and C0 ∪ produced = out.
bool thread_ok(const FormulaSet& in, const FormulaSet& out, std::initializer_list<Formula> consumed,
               std::initializer_list<Formula> produced) {
  auto in_list = [](const Formula& f, std::initializer_list<Formula> xs) {
    return std::any_of(xs.begin(), xs.end(), [&](const Formula& x) { return alpha_equal(x, f); });
  };
  for (const Formula& f : consumed)
    if (!in.contains(f)) return false;
  for (const Formula& f : produced)
    if (!out.contains(f)) return false;
  for (const auto& [k, f] : in)
    if (!out.contains(f) && !in_list(f, consumed)) return false;
  for (const auto& [k, f] : out)
    if (!in.contains(f) && !in_list(f, produced)) return false;
  return true;
}

FormulaSet with(const FormulaSet& s, const Formula& extra) {
  FormulaSet out = s;
  out.insert(extra);
  return out;
}

// Formulas of kind `k` to try as the principal formula: the single changed
// formula if the step changed one, otherwise every candidate in `pool`.
std::vector<Formula> candidates(const std::vector<Formula>& changed, const FormulaSet& pool,
                                Formula::Kind k) {
  std::vector<Formula> out;
  if (!changed.empty()) {
    for (const Formula& f : changed)
      if (f.is(k)) out.push_back(f);
    return out;
  }
  for (const auto& [key, f] : pool)
    if (f.is(k)) out.push_back(f);
  return out;
}

struct StepChecker {
  const ProofStep& step;
  const SequentRef& get;
  std::size_t index;
  // Principal formula matched by ForAllElim, recorded for fragment classification.
  std::optional<Formula>* principal_out = nullptr;

  Violation fail(std::string cond) const { return Violation{index, step.rule, std::move(cond)}; }

  Verdict run() const {
    const std::size_t want = arity(step.rule);
    if (step.inputs.size() != want) {
      if (step.rule == RuleTag::OrElim) return fail("requires three premise sequents");
      if (step.rule == RuleTag::ExistsElim) return fail("requires two premise sequents");
      if (want == 0) return fail("takes no premise sequents");
      return fail("requires exactly one premise sequent");
    }
    for (std::size_t in : step.inputs)
      if (in >= index) return fail("references step " + std::to_string(in + 1) + ", which is not earlier");
    switch (step.rule) {
      case RuleTag::Axiom: return axiom();
      case RuleTag::AndIntro: return and_intro();
      case RuleTag::AndElim: return and_elim();
      case RuleTag::OrIntro: return or_intro();
      case RuleTag::OrElim: return or_elim();
      case RuleTag::ImpIntro: return imp_intro();
      case RuleTag::ImpElim: return imp_elim();
      case RuleTag::ForAllIntro: return forall_intro();
      case RuleTag::ForAllElim: return forall_elim();
      case RuleTag::ExistsIntro: return exists_intro();
      case RuleTag::ExistsElim: return exists_elim();
      case RuleTag::BottomIntro: return bottom_intro();
      case RuleTag::BottomElim: return bottom_elim();
    }
    return fail("unknown rule");
  }

  static std::size_t arity(RuleTag r) {
    switch (r) {
      case RuleTag::Axiom: return 0;
      case RuleTag::OrElim: return 3;
      case RuleTag::ExistsElim: return 2;
      default: return 1;
    }
  }

  const Sequent& in(std::size_t i = 0) const { return get(step.inputs[i]); }
  const Sequent& out() const { return step.output; }

  std::optional<Violation> same_assumptions() const {
    if (!(in().assumptions == out().assumptions))
      return fail("must not change the assumption set");
    return std::nullopt;
  }

  Verdict axiom() const {
    if (!out().conclusions.subset_of(out().assumptions))
      return fail("conclusions must be a subset of the assumptions");
    return {};
  }

  Verdict and_intro() const {
    if (auto v = same_assumptions()) return *v;
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    for (const Formula& f : candidates(added, out().conclusions, Formula::Kind::And))
      if (thread_ok(in().conclusions, out().conclusions, {f.left(), f.right()}, {f})) return {};
    return fail("no conjunction A∧B in the output with both A and B proved in the premise");
  }

  Verdict and_elim() const {
    if (auto v = same_assumptions()) return *v;
    auto removed = in().conclusions.minus(out().conclusions);
    if (removed.size() > 1) return fail("drops more than one conclusion");
    for (const Formula& f : candidates(removed, in().conclusions, Formula::Kind::And))
      if (thread_ok(in().conclusions, out().conclusions, {f}, {f.left(), f.right()})) return {};
    return fail("no proved conjunction A∧B whose conjuncts are the new conclusions");
  }

  Verdict or_intro() const {
    if (auto v = same_assumptions()) return *v;
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    for (const Formula& f : candidates(added, out().conclusions, Formula::Kind::Or)) {
      for (const Formula& side : {f.left(), f.right()})
        if (thread_ok(in().conclusions, out().conclusions, {side}, {side, f})) return {};
    }
    return fail("no disjunction A∨B in the output with A or B proved in the premise");
  }

  Verdict or_elim() const {
    const Sequent& major = in(0);
    const Sequent& left_case = in(1);
    const Sequent& right_case = in(2);
    if (!(major.assumptions == out().assumptions))
      return fail("first premise must share the conclusion's assumptions A₀");
    std::vector<Formula> disjunctions;
    if (step.witness.principal) {
      if (!step.witness.principal->is(Formula::Kind::Or)) return fail("witness is not a disjunction");
      disjunctions.push_back(*step.witness.principal);
    } else {
      for (const auto& [k, f] : major.conclusions)
        if (f.is(Formula::Kind::Or)) disjunctions.push_back(f);
    }
    std::vector<Formula> goals;
    if (step.witness.conclusion) {
      goals.push_back(*step.witness.conclusion);
    } else {
      auto added = out().conclusions.minus(major.conclusions);
      goals = added.empty() ? out().conclusions.to_vector() : added;
    }
    std::string why = "no disjunction A∨B proved in the first premise";
    for (const Formula& d : disjunctions) {
      if (!major.conclusions.contains(d)) continue;
      if (!(left_case.assumptions == with(out().assumptions, d.left()))) {
        why = "second premise assumptions must be A₀ ∪ {" + d.left().to_string() + "}";
        continue;
      }
      if (!(right_case.assumptions == with(out().assumptions, d.right()))) {
        why = "third premise assumptions must be A₀ ∪ {" + d.right().to_string() + "}";
        continue;
      }
      for (const Formula& c : goals) {
        if (!left_case.conclusions.contains(c) || !right_case.conclusions.contains(c)) {
          why = "case premises do not both prove " + c.to_string();
          continue;
        }
        if (thread_ok(major.conclusions, out().conclusions, {d}, {c})) return {};
        why = "conclusion set is not C₀ ∪ {" + c.to_string() + "}";
      }
    }
    return fail(why);
  }

  Verdict imp_intro() const {
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    for (const Formula& f : candidates(added, out().conclusions, Formula::Kind::Implies)) {
      if (!(in().assumptions == with(out().assumptions, f.left()))) continue;
      if (!in().conclusions.contains(f.right())) continue;
      // Only conclusions that are themselves undischarged assumptions survive.
      bool carried_ok = true;
      for (const auto& [k, g] : out().conclusions) {
        if (alpha_equal(g, f)) continue;
        if (!in().conclusions.contains(g) || !out().assumptions.contains(g)) carried_ok = false;
      }
      if (carried_ok) return {};
      return fail("carries a conclusion that may depend on the discharged assumption");
    }
    return fail("no implication A→B with premise assumptions A₀ ∪ {A} proving B");
  }

  Verdict imp_elim() const {
    if (auto v = same_assumptions()) return *v;
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    for (const auto& [k, f] : in().conclusions) {
      if (!f.is(Formula::Kind::Implies)) continue;
      if (!added.empty() && !alpha_equal(f.right(), added[0])) continue;
      if (thread_ok(in().conclusions, out().conclusions, {f.left(), f}, {f.left(), f, f.right()}))
        return {};
    }
    return fail("no proved implication A→B with A proved");
  }

  Verdict forall_intro() const {
    if (auto v = same_assumptions()) return *v;
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    std::string why = "no generalization ∀x.A of a proved A in the output";
    for (const Formula& f : candidates(added, out().conclusions, Formula::Kind::ForAll)) {
      if (!thread_ok(in().conclusions, out().conclusions, {f.body()}, {f})) continue;
      bool free_in_assumptions = std::any_of(
          out().assumptions.begin(), out().assumptions.end(),
          [&](const auto& kv) { return occurs_free(kv.second, f.var()); });
      if (!free_in_assumptions) return {};
      why = "eigenvariable " + f.var() + " occurs free in an assumption";
    }
    return fail(why);
  }

  Verdict forall_elim() const {
    if (auto v = same_assumptions()) return *v;
    if (!step.witness.term) return fail("requires the instantiating term as witness");
    const Term& t = *step.witness.term;
    auto removed = in().conclusions.minus(out().conclusions);
    auto added = out().conclusions.minus(in().conclusions);
    if (removed.size() > 1 || added.size() > 1) return fail("changes more than one conclusion");
    for (const Formula& f : candidates(removed, in().conclusions, Formula::Kind::ForAll)) {
      Formula inst = instantiate(f.body(), f.var(), t);
      if (!added.empty() && !alpha_equal(inst, added[0])) continue;
      if (thread_ok(in().conclusions, out().conclusions, {f}, {inst})) {
        if (principal_out) *principal_out = f;
        return {};
      }
    }
    return fail("no proved ∀x.A whose instance A[" + t.to_string() + "/x] is the new conclusion");
  }

  Verdict exists_intro() const {
    if (auto v = same_assumptions()) return *v;
    if (!step.witness.term) return fail("requires the witnessing term as witness");
    const Term& t = *step.witness.term;
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    for (const Formula& f : candidates(added, out().conclusions, Formula::Kind::Exists)) {
      Formula inst = instantiate(f.body(), f.var(), t);
      if (thread_ok(in().conclusions, out().conclusions, {inst}, {f})) return {};
    }
    return fail("no ∃x.A in the output with A[" + t.to_string() + "/x] proved");
  }

  Verdict exists_elim() const {
    const Sequent& major = in(0);
    const Sequent& minor = in(1);
    if (!step.witness.term || !step.witness.term->is_constant())
      return fail("requires the fresh constant as witness");
    const Term& c = *step.witness.term;
    if (!(major.assumptions == out().assumptions))
      return fail("first premise must share the conclusion's assumptions A₀");
    for (const auto& [k, f] : out().assumptions)
      if (mentions_symbol(f, c.name())) return fail("constant " + c.name() + " is not fresh: occurs in A₀");
    for (const auto& [k, f] : out().conclusions)
      if (mentions_symbol(f, c.name()))
        return fail("constant " + c.name() + " is not fresh: occurs in the conclusion");
    std::vector<Formula> existentials;
    if (step.witness.principal) {
      existentials.push_back(*step.witness.principal);
    } else {
      for (const auto& [k, f] : major.conclusions)
        if (f.is(Formula::Kind::Exists)) existentials.push_back(f);
    }
    std::vector<Formula> goals;
    if (step.witness.conclusion) {
      goals.push_back(*step.witness.conclusion);
    } else {
      auto added = out().conclusions.minus(major.conclusions);
      goals = added.empty() ? out().conclusions.to_vector() : added;
    }
    std::string why = "no proved ∃x.A in the first premise";
    for (const Formula& e : existentials) {
      if (!e.is(Formula::Kind::Exists) || !major.conclusions.contains(e)) continue;
      if (mentions_symbol(e, c.name())) {
        why = "constant " + c.name() + " is not fresh: occurs in " + e.to_string();
        continue;
      }
      Formula inst = instantiate(e.body(), e.var(), Term::constant(c.name()));
      if (!(minor.assumptions == with(out().assumptions, inst))) {
        why = "second premise assumptions must be A₀ ∪ {" + inst.to_string() + "}";
        continue;
      }
      for (const Formula& b : goals) {
        if (!minor.conclusions.contains(b)) {
          why = "second premise does not prove " + b.to_string();
          continue;
        }
        if (thread_ok(major.conclusions, out().conclusions, {e}, {b})) return {};
        why = "conclusion set is not C₀ ∪ {" + b.to_string() + "}";
      }
    }
    return fail(why);
  }

  Verdict bottom_intro() const {
    if (auto v = same_assumptions()) return *v;
    const Formula bot = Formula::bottom();
    for (const auto& [k, f] : in().conclusions) {
      if (!f.is_negation()) continue;
      if (thread_ok(in().conclusions, out().conclusions, {f.left(), f}, {bot})) return {};
    }
    return fail("no proved pair A and A→⊥ with ⊥ concluded");
  }

  Verdict bottom_elim() const {
    if (auto v = same_assumptions()) return *v;
    const Formula bot = Formula::bottom();
    auto added = out().conclusions.minus(in().conclusions);
    if (added.size() > 1) return fail("adds more than one conclusion");
    if (added.empty()) {
      auto removed = in().conclusions.minus(out().conclusions);
      bool ok = in().conclusions.contains(bot) &&
                std::all_of(removed.begin(), removed.end(), [&](const Formula& f) { return alpha_equal(f, bot); });
      return ok ? Verdict{} : fail("⊥ is not proved in the premise");
    }
    if (thread_ok(in().conclusions, out().conclusions, {bot}, {added[0]})) return {};
    return fail("⊥ is not proved in the premise");
  }
};

Verdict check_with(const ProofStep& step, const SequentRef& get, std::size_t index,
                   std::optional<Formula>* principal = nullptr) {
  StepChecker c{step, get, index, principal};
  return c.run();
}

bool subsumes(const Sequent& final_seq, const Sequent& goal) {
  return final_seq.assumptions.subset_of(goal.assumptions) &&
         goal.conclusions.subset_of(final_seq.conclusions);
}

}  // namespace

Verdict check_step(const ProofStep& step, std::span<const Sequent> earlier, std::size_t index) {
  for (std::size_t in : step.inputs)
    if (in >= earlier.size() && in < index)
      return Violation{index, step.rule, "unresolved reference to step " + std::to_string(in + 1)};
  SequentRef get = [&](std::size_t i) -> const Sequent& { return earlier[i]; };
  return check_with(step, get, index);
}

Verdict verify_proof(const Proof& p) {
  if (p.steps.empty()) return Violation{0, std::nullopt, "proof has no steps"};
  SequentRef get = [&](std::size_t i) -> const Sequent& { return p.steps[i].output; };
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    Verdict v = check_with(p.steps[i], get, i);
    if (!v) return v;
  }
  if (!subsumes(p.steps.back().output, p.goal))
    return Violation{p.steps.size() - 1, std::nullopt, "goal not subsumed by the final sequent"};
  return {};
}

namespace {

bool safe_instantiation(const Formula& forall) {
  const std::string& x = forall.var();
  const Formula* body = &forall.body();
  while (body->is(Formula::Kind::ForAll)) {
    if (body->var() == x) return true;  // shadowed: vacuous instantiation
    body = &body->body();
  }
  if (!occurs_free(*body, x)) return true;
  if (body->is(Formula::Kind::Implies)) return occurs_free(body->right(), x);
  return true;
}

}  // namespace

Fragment rules_used(const Proof& p) {
  Fragment level = Fragment::Forward;
  auto raise = [&](Fragment f) { level = std::max(level, f); };
  SequentRef get = [&](std::size_t i) -> const Sequent& { return p.steps[i].output; };
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const ProofStep& s = p.steps[i];
    switch (s.rule) {
      case RuleTag::Axiom:
      case RuleTag::AndIntro:
      case RuleTag::AndElim:
      case RuleTag::OrIntro:
      case RuleTag::ImpElim:
        break;
      case RuleTag::ForAllElim: {
        std::optional<Formula> principal;
        if (!check_with(s, get, i, &principal) || !principal || !safe_instantiation(*principal))
          raise(Fragment::Query);
        break;
      }
      case RuleTag::ExistsIntro:
        raise(Fragment::Query);
        break;
      case RuleTag::OrElim:
        raise(Fragment::Planning);
        break;
      default:
        raise(Fragment::Full);
    }
  }
  return level;
}

}  // namespace ndp
