#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ndprover/forward.hpp"
#include "ndprover/frontend.hpp"
#include "oracles.hpp"
#include "random_kb.hpp"
#include "util.hpp"

using namespace ndp;
using namespace ndp::testkit;

namespace {

std::set<Literal> derived_set(const Chainer& c) {
  const auto& fs = c.facts().facts();
  return {fs.begin(), fs.end()};
}

const char* kFriends = "like(a,b). like(b,a). friends(X,Y) <- like(X,Y) & like(Y,X).";

}  // namespace

TEST(Fixpoint, Friends) {
  FixpointResult r = fixpoint(kb_of(kFriends));
  EXPECT_TRUE(r.state.contains(lit("friends(a,b)")));
  EXPECT_TRUE(r.state.contains(lit("friends(b,a)")));
  EXPECT_FALSE(r.state.contains(lit("friends(a,a)")));
  EXPECT_EQ(r.state.facts().size(), 4u);
  EXPECT_EQ(r.state.given_count(), 2u);
  auto d = r.state.derivation_of(lit("friends(a,b)"));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->kind, Derivation::Kind::Rule);
  EXPECT_EQ(d->subst.at("X"), Term::constant("a"));
}

TEST(Fixpoint, EmptyFactsDeriveNothing) {
  FixpointResult r = fixpoint(kb_of("friends(X,Y) <- like(X,Y) & like(Y,X). p(X) <- friends(X,X)."));
  EXPECT_EQ(r.state.facts().size(), 0u);
}

TEST(Fixpoint, GroundRulesAndChains) {
  FixpointResult r = fixpoint(kb_of("a. b <- a. c <- a & b. d <- c ; e. f <- e."));
  for (const char* x : {"a", "b", "c", "d"}) EXPECT_TRUE(r.state.contains(lit(x))) << x;
  EXPECT_FALSE(r.state.contains(lit("f")));
}

TEST(Fixpoint, ConjoinedHeads) {
  FixpointResult r = fixpoint(kb_of("visit(p,e,t). go(P,E,beach(T)) & go(P,E,bar(T)) <- visit(P,E,T)."));
  EXPECT_TRUE(r.state.contains(lit("go(p,e,beach(t))")));
  EXPECT_TRUE(r.state.contains(lit("go(p,e,bar(t))")));
}

TEST(Fixpoint, BuiltinsEvaluatedNotMatched) {
  FixpointResult r = fixpoint(kb_of("level(a,3). level(b,9). high(X,L) <- level(X,L) & geq(L,7)."));
  EXPECT_TRUE(r.state.contains(lit("high(b,9)")));
  EXPECT_FALSE(r.state.contains(lit("high(a,3)")));
  EXPECT_THROW(fixpoint(kb_of("level(a,3). high(X) <- level(X,L) & geq(L,7).")), UnsafeRuleError);
}

TEST(Fixpoint, NegativeBodyLiteralsMatchStoredNegations) {
  FixpointResult r = fixpoint(kb_of("~sunny(e). day(e). day(f). wet(D) <- day(D) & ~sunny(D)."));
  EXPECT_TRUE(r.state.contains(lit("wet(e)")));
  EXPECT_FALSE(r.state.contains(lit("wet(f)")));
}

TEST(Fixpoint, ContradictionHaltsWithBothProvenances) {
  FixpointResult r = fixpoint(kb_of("p(a). q(a). ~r(X) <- p(X). r(X) <- q(X)."));
  ASSERT_TRUE(r.state.contradiction());
  const Contradiction& c = *r.state.contradiction();
  EXPECT_EQ(c.positive, lit("r(a)"));
  EXPECT_EQ(c.negative, lit("~r(a)"));
  EXPECT_EQ(c.positive_derivation.kind, Derivation::Kind::Rule);
  EXPECT_EQ(c.negative_derivation.kind, Derivation::Kind::Rule);
  EXPECT_EQ(c.describe(), "contradiction: r(a) and ~r(a)");
}

TEST(Fixpoint, RejectsUnsafeAndDisjunctiveRules) {
  EXPECT_THROW(fixpoint(kb_of("want(a,c). compete(X,Y) <- want(X,Z) & want(Y,Z).")), UnsafeRuleError);
  EXPECT_THROW(fixpoint(kb_of("day(d). rain(D) | sun(D) <- day(D).")), UnsafeRuleError);
}

TEST(Fixpoint, SemiNaiveRoundsFollowChainLength) {
  std::string text = "n0.";
  for (int i = 1; i <= 20; ++i) text += " n" + std::to_string(i) + " <- n" + std::to_string(i - 1) + ".";
  FixpointResult r = fixpoint(kb_of(text));
  EXPECT_EQ(r.state.facts().size(), 21u);
  EXPECT_GE(r.state.rounds(), 20u);
}

TEST(Fixpoint, DumpOrder) {
  FixpointResult r = fixpoint(kb_of("b(z). a(y). a(x). b(Y) <- a(Y)."));
  std::vector<std::string> got;
  for (const Literal& l : r.sorted_facts()) got.push_back(l.to_string());
  EXPECT_EQ(got, (std::vector<std::string>{"a(x)", "a(y)", "b(x)", "b(y)", "b(z)"}));
}

TEST(Oracle, SemiNaiveEqualsNaiveOnRandomKbs) {
  int contradictions = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    KnowledgeBase kb = random_kb(seed).kb;
    FixpointResult r = fixpoint(kb);
    NaiveClosure n = naive_closure(kb);
    if (n.contradiction) {
      ++contradictions;
      EXPECT_TRUE(r.state.contradiction()) << serialize(kb);
      for (const Literal& l : r.state.facts().facts()) EXPECT_TRUE(n.facts.count(l)) << l.to_string();
    } else {
      EXPECT_FALSE(r.state.contradiction());
      EXPECT_EQ(derived_set(r.state), n.facts) << serialize(kb);
    }
  }
  EXPECT_LT(contradictions, 25);
}

TEST(Oracle, MonotoneUnderAddedFacts) {
  RandomKbOptions o;
  o.negation = false;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    RandomKb r = random_kb(seed, o);
    std::set<Literal> before = derived_set(fixpoint(r.kb).state);
    std::mt19937_64 rng(seed);
    auto inst = ground_instances(r, rng() % r.predicates.size());
    KnowledgeBase more = r.kb;
    more.add_fact(inst[rng() % inst.size()]);
    std::set<Literal> after = derived_set(fixpoint(more).state);
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}

TEST(Oracle, RuleOrderIndependent) {
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    KnowledgeBase kb = random_kb(seed).kb;
    KnowledgeBase shuffled = kb;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);
    std::shuffle(shuffled.facts.begin(), shuffled.facts.end(), rng);
    FixpointResult a = fixpoint(kb), b = fixpoint(shuffled);
    if (a.state.contradiction() || b.state.contradiction()) {
      EXPECT_EQ(bool(a.state.contradiction()), bool(b.state.contradiction()));
      continue;
    }
    EXPECT_EQ(derived_set(a.state), derived_set(b.state));
  }
}

TEST(Counted, GroundProgramsMatchOracle) {
  // Ground rules go through the counting path; mixing in a rule with
  // variables keeps the matching path busy at the same time.
  std::mt19937_64 rng(9);
  for (int round = 0; round < 30; ++round) {
    std::string text = "x0. x1.";
    for (int i = 0; i < 40; ++i) {
      int h = 2 + rng() % 30, a = rng() % h, b = rng() % h;
      text += " x" + std::to_string(h) + " <- x" + std::to_string(a) + " & x" + std::to_string(b);
      if (rng() % 4 == 0) text += " ; x" + std::to_string(rng() % h);
      text += ".";
    }
    text += " seen(N) <- tag(N). tag(k).";
    KnowledgeBase kb = kb_of(text);
    EXPECT_EQ(derived_set(fixpoint(kb).state), naive_closure(kb).facts) << text;
  }
}

TEST(Proofs, FriendsProofShape) {
  KnowledgeBase kb = kb_of(kFriends);
  auto p = entails_with_proof(kb, lit("friends(a,b)"));
  ASSERT_TRUE(p);
  Verdict v = verify_proof(*p);
  ASSERT_TRUE(v.ok()) << v.violation().message();
  EXPECT_EQ(rules_used(*p), Fragment::Forward);
  std::vector<RuleTag> tags;
  for (const ProofStep& s : p->steps)
    if (tags.empty() || tags.back() != s.rule) tags.push_back(s.rule);
  EXPECT_EQ(tags, (std::vector<RuleTag>{RuleTag::Axiom, RuleTag::ForAllElim, RuleTag::AndIntro, RuleTag::ImpElim}));
}

TEST(Proofs, StoredGoalIsOneAxiom) {
  auto p = entails_with_proof(kb_of(kFriends), lit("like(a,b)"));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->steps.size(), 1u);
  EXPECT_TRUE(verify_proof(*p).ok());
}

TEST(Proofs, UnknownGoalIsAbsent) {
  EXPECT_FALSE(entails_with_proof(kb_of(kFriends), lit("enemies(a,b)")));
}

TEST(Proofs, DisjunctiveBodiesUseOrIntro) {
  KnowledgeBase kb = kb_of("b(k). h(X) <- a(X) ; b(X).");
  auto p = entails_with_proof(kb, lit("h(k)"));
  ASSERT_TRUE(p);
  ASSERT_TRUE(verify_proof(*p).ok());
  EXPECT_TRUE(std::any_of(p->steps.begin(), p->steps.end(), [](const ProofStep& s) { return s.rule == RuleTag::OrIntro; }));
  EXPECT_EQ(rules_used(*p), Fragment::Forward);
}

TEST(Proofs, EveryDerivedFactOfRandomKbsHasAForwardProof) {
  RandomKbOptions o;
  o.negation = false;
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    KnowledgeBase kb = random_kb(seed, o).kb;
    FixpointResult r = fixpoint(kb);
    for (const Literal& l : r.state.facts().facts()) {
      auto p = entails_with_proof(kb, l);
      ASSERT_TRUE(p) << l.to_string();
      Verdict v = verify_proof(*p);
      ASSERT_TRUE(v.ok()) << serialize(kb) << l.to_string() << "\n" << v.violation().message();
      EXPECT_EQ(rules_used(*p), Fragment::Forward);
    }
  }
}
