#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ndprover/frontend.hpp"
#include "ndprover/query.hpp"
#include "oracles.hpp"
#include "random_kb.hpp"
#include "util.hpp"

using namespace ndp;
using namespace ndp::testkit;

namespace {

const char* kCompete = "want(a,c). want(b,c). compete(X,Y) <- want(X,Z) & want(Y,Z).";

const Strategy kAll[] = {Strategy::full_grounding(), Strategy::shallow(), Strategy::top_one(), Strategy::astar()};

std::set<Term> constants(std::size_t d) {
  std::set<Term> out;
  for (std::size_t i = 0; i < d; ++i) out.insert(Term::constant("k" + std::to_string(i)));
  return out;
}

Rule rule_with_existentials(std::size_t n) {
  std::string text = "h(X) <- ";
  for (std::size_t i = 0; i < n; ++i) text += (i ? " & " : "") + std::string("b(X,E") + std::to_string(i) + ")";
  return kb_of(text + ".").rules.at(0);
}

}  // namespace

TEST(Grounding, ExactlyDToTheN) {
  for (std::size_t n = 1; n <= 4; ++n) {
    Rule r = rule_with_existentials(n);
    for (std::size_t d = 1; std::pow(double(d), double(n)) <= 1e4; ++d) {
      auto rules = ground_existentials(r, constants(d));
      ASSERT_EQ(rules.size(), static_cast<std::size_t>(std::llround(std::pow(double(d), double(n)))))
          << "D=" << d << " N=" << n;
      for (const Rule& g : rules) EXPECT_TRUE(validate_safety(g).safe());
    }
  }
  EXPECT_EQ(ground_existentials(rule_with_existentials(2), constants(10)).size(), 100u);
}

TEST(Grounding, GroundRulesAreDistinct) {
  auto rules = ground_existentials(rule_with_existentials(2), constants(5));
  std::set<std::string> seen;
  for (const Rule& r : rules) seen.insert(r.to_string());
  EXPECT_EQ(seen.size(), 25u);
}

TEST(Grounding, SafeRuleIsReturnedAsIs) {
  Rule r = kb_of("f(X,Y) <- l(X,Y) & l(Y,X).").rules[0];
  auto out = ground_existentials(r, constants(4));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], r);
}

TEST(Grounding, CeilingRaises) {
  EXPECT_THROW(ground_existentials(rule_with_existentials(3), constants(10), 999), GroundingLimitError);
  EXPECT_NO_THROW(ground_existentials(rule_with_existentials(3), constants(10), 1000));
}

TEST(Grounding, ProgramCountsRespectSorts) {
  KnowledgeBase kb = kb_of("lvl(a,1). lvl(b,2). lvl(c,3). ok(X) <- lvl(X,L) & geq(L,2).");
  GroundedProgram g = ground_program(kb.rules, kb);
  EXPECT_EQ(g.ground_rules, 3u);  // L ranges over the three integers, not the objects
}

TEST(Compete, AllStrategiesFindWitness) {
  KnowledgeBase kb = kb_of(kCompete);
  for (const Strategy& s : kAll) {
    Answer a = answer(kb, lit("compete(a,b)"), s, true);
    ASSERT_TRUE(a.found()) << s.name();
    EXPECT_EQ(a.witness.at("Z"), Term::constant("c")) << s.name();
    ASSERT_TRUE(a.proof) << s.name();
    Verdict v = verify_proof(*a.proof);
    EXPECT_TRUE(v.ok()) << s.name() << ": " << (v.ok() ? "" : v.violation().message());
    EXPECT_EQ(rules_used(*a.proof), Fragment::Query) << s.name();
  }
}

TEST(Compete, TopOneExpandsOnce) {
  Answer a = answer(kb_of(kCompete), lit("compete(a,b)"), Strategy::top_one());
  EXPECT_EQ(a.stats.expansions, 1u);
}

TEST(Compete, FullGroundingGeneratesOneRulePerConstant) {
  Answer a = answer(kb_of(kCompete), lit("compete(a,b)"), Strategy::full_grounding());
  EXPECT_EQ(a.stats.rules_generated, 3u);
}

TEST(Compete, ShallowNeedsNoGrounding) {
  Answer a = answer(kb_of(kCompete), lit("compete(a,b)"), Strategy::shallow());
  EXPECT_EQ(a.stats.rules_generated, 0u);
}

TEST(Compete, NoSharedWantIsNotFound) {
  KnowledgeBase kb = kb_of("want(a,c). want(b,d). compete(X,Y) <- want(X,Z) & want(Y,Z).");
  for (const Strategy& s : kAll) EXPECT_EQ(answer(kb, lit("compete(a,b)"), s).status, AnswerStatus::NotFound) << s.name();
}

TEST(Shallow, QueriesStoredFactsOnly) {
  KnowledgeBase kb = kb_of("e(a,b). e(b,c). p(X,Y) <- e(X,Y). two(X) <- p(X,M) & p(M,Z).");
  // p is derived, never stored: Shallow cannot see it; grounding can.
  EXPECT_FALSE(answer(kb, lit("two(a)"), Strategy::shallow()).found());
  EXPECT_TRUE(answer(kb, lit("two(a)"), Strategy::full_grounding()).found());
  QueryEngine e(kb);
  auto subs = shallow_query(e.index(), kb_of("q(X) <- e(X,Y).").rules[0].body[0], {{"X", Term::constant("a")}});
  ASSERT_EQ(subs.size(), 1u);
  EXPECT_EQ(subs[0].at("Y"), Term::constant("b"));
}

TEST(Ranking, FrequencyWithAddOneSmoothing) {
  KnowledgeBase kb = kb_of("w(a,d). w(x,d). w(y,d). w(b,c). w(a,c).");
  RankingModel m(kb.facts);
  EXPECT_DOUBLE_EQ(m.score("w", 1, Term::constant("d")), 4.0);
  EXPECT_DOUBLE_EQ(m.score("w", 1, Term::constant("c")), 3.0);
  EXPECT_DOUBLE_EQ(m.score("w", 1, Term::constant("zz")), 1.0);
  auto order = rank_candidates(m, "w", 1, {Term::constant("c"), Term::constant("d"), Term::constant("e"), Term::constant("b")});
  EXPECT_EQ(order, (std::vector<Term>{Term::constant("d"), Term::constant("c"), Term::constant("b"), Term::constant("e")}));
}

TEST(Ranking, TopOneTriesOnlyTheBestCandidate) {
  // d is the most frequent object but does not connect a and b.
  KnowledgeBase kb = kb_of("want(a,d). want(x,d). want(y,d). want(b,c). want(a,c). "
                           "compete(X,Y) <- want(X,Z) & want(Y,Z).");
  EXPECT_FALSE(answer(kb, lit("compete(a,b)"), Strategy::top_one()).found());
  EXPECT_TRUE(answer(kb, lit("compete(a,b)"), Strategy::astar()).found());
  QueryEngine e(kb);
  e.ranking().set_score("want", 1, Term::constant("c"), 100);
  EXPECT_TRUE(e.answer(lit("compete(a,b)"), Strategy::top_one()).found());
}

TEST(AStar, BudgetIsEnforced) {
  KnowledgeBase kb = kb_of("want(a,d). want(x,d). want(y,d). want(b,c). want(a,c). "
                           "compete(X,Y) <- want(X,Z) & want(Y,Z).");
  Answer a = answer(kb, lit("compete(a,b)"), Strategy::astar(1));
  EXPECT_EQ(a.status, AnswerStatus::BudgetExhausted);
  EXPECT_LE(a.stats.expansions, 1u);
  EXPECT_TRUE(answer(kb, lit("compete(a,b)"), Strategy::astar(10)).found());
}

TEST(Query, StoredGoalNeedsNoRule) {
  Answer a = answer(kb_of(kCompete), lit("want(a,c)"), Strategy::shallow(), true);
  ASSERT_TRUE(a.found());
  EXPECT_FALSE(a.rule);
  ASSERT_TRUE(a.proof);
  EXPECT_TRUE(verify_proof(*a.proof).ok());
}

TEST(Query, GroundingLimitReported) {
  std::string text;
  for (int i = 0; i < 30; ++i) text += "b(k" + std::to_string(i) + ",k0). ";
  text += "h(X) <- b(X,E1) & b(E1,E2) & b(E2,E3) & b(E3,E4) & b(E4,E5).";
  QueryEngine e(kb_of(text), QueryOptions{1000});
  EXPECT_EQ(e.answer(lit("h(k1)"), Strategy::full_grounding()).status, AnswerStatus::GroundingLimit);
  EXPECT_TRUE(e.answer(lit("h(k1)"), Strategy::astar()).found());
}

TEST(Query, ForwardRulesChainIntoExistentialBodies) {
  KnowledgeBase kb = kb_of("e(a,b). e(b,c). p(X,Y) <- e(X,Y). two(X) <- p(X,M) & p(M,Z).");
  for (const Strategy& s : {Strategy::full_grounding(), Strategy::astar()}) {
    Answer a = answer(kb, lit("two(a)"), s, true);
    ASSERT_TRUE(a.found()) << s.name();
    ASSERT_TRUE(a.proof);
    Verdict v = verify_proof(*a.proof);
    EXPECT_TRUE(v.ok()) << s.name() << ": " << (v.ok() ? "" : v.violation().message());
  }
  // Every candidate for M scores 1 here, so TopOne's single guess may miss.
  Answer t = answer(kb, lit("two(a)"), Strategy::top_one(), true);
  if (t.found()) EXPECT_TRUE(verify_proof(*t.proof).ok());
}

TEST(Oracle, WitnessesSatisfyBodiesOnRandomKbs) {
  RandomKbOptions o;
  o.existentials = true;
  o.negation = false;
  int found = 0;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    RandomKb r = random_kb(seed, o);
    NaiveClosure n = naive_closure(r.kb);
    QueryEngine e(r.kb);
    for (std::size_t hp : r.head_predicates) {
      for (const Literal& goal : ground_instances(r, hp)) {
        const bool truth = n.facts.count(goal) > 0;
        for (const Strategy& s : kAll) {
          Answer a = e.answer(goal, s);
          if (s.kind == Strategy::Kind::FullGrounding) EXPECT_EQ(a.found(), truth) << serialize(r.kb) << goal.to_string();
          if (!a.found()) continue;
          ++found;
          ASSERT_TRUE(truth) << s.name() << " " << goal.to_string() << "\n" << serialize(r.kb);
          if (!a.rule) {
            EXPECT_NE(std::find(r.kb.facts.begin(), r.kb.facts.end(), goal), r.kb.facts.end());
            continue;
          }
          const Rule& rule = r.kb.rules[*a.rule];
          EXPECT_TRUE(holds_in(apply_substitution(rule.body[a.disjunct], a.bindings), n.facts))
              << s.name() << " " << rule.to_string() << " goal " << goal.to_string() << " disjunct " << a.disjunct
              << " body " << [&] {
                   std::string b;
                   for (const Literal& l : apply_substitution(rule.body[a.disjunct], a.bindings)) b += l.to_string() + " ";
                   return b;
                 }();
          bool heads = false;
          for (const Literal& h : rule.head) heads |= apply_substitution(h, a.bindings) == goal;
          EXPECT_TRUE(heads) << s.name();
        }
      }
    }
  }
  EXPECT_GT(found, 50);
}
