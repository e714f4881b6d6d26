#include <gtest/gtest.h>

#include "golden.hpp"
#include "ndprover/forward.hpp"
#include "ndprover/frontend.hpp"
#include "ndprover/planning.hpp"
#include "random_kb.hpp"
#include "util.hpp"

using namespace ndp;
using namespace ndp::testkit;

namespace {

std::vector<ParseDiagnostic> errors_of(const std::string& text) {
  std::vector<ParseDiagnostic> out;
  for (const auto& d : parse_kb(text, "t.ndkb").diagnostics)
    if (d.is_error()) out.push_back(d);
  return out;
}

std::vector<ParseDiagnostic> proof_errors(const std::string& text) {
  std::vector<ParseDiagnostic> out;
  for (const auto& d : parse_proof(text, "t.ndp").diagnostics)
    if (d.is_error()) out.push_back(d);
  return out;
}

bool mentions(const std::vector<ParseDiagnostic>& ds, const std::string& s) {
  for (const auto& d : ds)
    if (d.message.find(s) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(KbParser, FactsRulesAndComments) {
  KbParse p = parse_kb("# people\nlike(a,b).\nlike(b,a). # mutual\nfriends(X,Y) <- like(X,Y) & like(Y,X).\n");
  ASSERT_TRUE(p.ok()) << diagnostics_text(p.diagnostics);
  EXPECT_EQ(p.kb.facts.size(), 2u);
  EXPECT_EQ(p.kb.rules.size(), 1u);
  EXPECT_EQ(p.kb.rules[0].span.line, 4u);
}

TEST(KbParser, DisjunctiveFactsAndIntegers) {
  KbParse p = parse_kb("sunny(e) | ~sunny(e). level(a,-3). level(b,12).");
  ASSERT_TRUE(p.ok());
  ASSERT_EQ(p.kb.disjunctive_facts.size(), 1u);
  EXPECT_EQ(p.kb.disjunctive_facts[0].alternatives.size(), 2u);
  EXPECT_EQ(p.kb.facts[0].atom.args[1], Term::integer(-3));
}

TEST(KbParser, ErrorCarriesLineAndColumn) {
  auto ds = errors_of("p(a).\nq(b) <- .\n");
  ASSERT_FALSE(ds.empty());
  EXPECT_EQ(ds[0].span.line, 2u);
  EXPECT_EQ(ds[0].span.column, 9u);
  EXPECT_EQ(ds[0].to_string().rfind("t.ndkb:2:9: error: ", 0), 0u) << ds[0].to_string();
}

TEST(KbParser, RecoversAtTheNextStatement) {
  KbParse p = parse_kb("p(a. q(b). r(c) <- . s(d).", "t.ndkb");
  EXPECT_FALSE(p.ok());
  std::size_t errors = 0;
  for (const auto& d : p.diagnostics) errors += d.is_error();
  EXPECT_EQ(errors, 2u) << diagnostics_text(p.diagnostics);
  EXPECT_NE(std::find(p.kb.facts.begin(), p.kb.facts.end(), lit("s(d)")), p.kb.facts.end());
}

TEST(KbParser, ArityMismatch) {
  EXPECT_TRUE(mentions(errors_of("p(a). p(a,b)."), "predicate p used with 2"));
  EXPECT_TRUE(mentions(errors_of("p(f(a)). p(f(a,b))."), "function f"));
}

TEST(KbParser, NonGroundFactAndMixedSeparators) {
  EXPECT_TRUE(mentions(errors_of("p(X)."), "not ground"));
  EXPECT_TRUE(mentions(errors_of("p(a) & q(a)."), "conjunction"));
  EXPECT_TRUE(mentions(errors_of("p(X) & q(X) | r(X) <- s(X)."), "mixes"));
}

TEST(KbParser, BuiltinMisuse) {
  EXPECT_TRUE(mentions(errors_of("geq(3,1)."), "cannot be asserted"));
  EXPECT_TRUE(mentions(errors_of("h(X) <- p(X) & ~geq(X,1)."), "cannot be negated"));
  EXPECT_TRUE(mentions(errors_of("h(X) <- p(X) & geq(L,1)."), "builtin variable L"));
  EXPECT_TRUE(mentions(errors_of("h(X) <- p(X) & geq(a,1)."), "ill-formed builtin"));
}

TEST(KbParser, HeadVariableMustBeBound) {
  EXPECT_TRUE(mentions(errors_of("h(X,Y) <- p(X)."), "head variable Y"));
  EXPECT_TRUE(mentions(errors_of("h(X) <- p(X) ; q(a)."), "every disjunct"));
}

TEST(KbParser, UnsafeRuleIsOnlyAWarning) {
  KbParse p = parse_kb("compete(X,Y) <- want(X,Z) & want(Y,Z).");
  EXPECT_TRUE(p.ok());
  ASSERT_EQ(p.diagnostics.size(), 1u);
  EXPECT_FALSE(p.diagnostics[0].is_error());
  EXPECT_NE(p.diagnostics[0].message.find("{Z}"), std::string::npos);
}

TEST(KbParser, RoundTrip) {
  for (const char* name : {"friends", "compete", "beach", "beach_no_restaurant"}) {
    KnowledgeBase kb = kb_of(read_text(std::string(NDP_TEST_DIR) + "/data/" + name + ".ndkb"));
    EXPECT_EQ(kb_of(serialize(kb)), kb) << name;
    EXPECT_EQ(serialize(kb_of(serialize(kb))), serialize(kb)) << name;
  }
}

TEST(KbParser, RandomRoundTrip) {
  RandomKbOptions o;
  o.existentials = true;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    KnowledgeBase kb = random_kb(seed, o).kb;
    EXPECT_EQ(kb_of(serialize(kb)), kb) << serialize(kb);
  }
}

TEST(LiteralParser, AcceptsTrailingDot) {
  EXPECT_EQ(lit("p(a)."), lit("p(a)"));
  EXPECT_FALSE(lit("~p(a)").positive);
  std::vector<ParseDiagnostic> ds;
  EXPECT_FALSE(parse_literal("p(a) q", &ds));
  EXPECT_FALSE(ds.empty());
}

TEST(ProofParser, Golden) {
  for (const GoldenProof& g : golden_proofs()) {
    ProofParse p = parse_proof(read_text(golden_path(g)), g.file);
    EXPECT_TRUE(p.ok()) << g.file << "\n" << diagnostics_text(p.diagnostics);
  }
}

TEST(ProofParser, MissingGoalLine) {
  auto ds = proof_errors("step 1: Axiom from [] gives (p ; p)\n");
  EXPECT_TRUE(mentions(ds, "missing goal line"));
}

TEST(ProofParser, UnresolvedReference) {
  auto ds = proof_errors("goal: (p ; p)\nstep 1: Axiom from [] gives (p ; p)\nstep 2: AndIntro from [1, 7] gives (p ; p)\n");
  ASSERT_TRUE(mentions(ds, "unresolved reference to step 7 (the proof has 2 steps)")) << diagnostics_text(ds);
  EXPECT_EQ(ds[0].span.line, 3u);
}

TEST(ProofParser, StepNumbering) {
  EXPECT_TRUE(mentions(proof_errors("goal: (p ; p)\nstep 2: Axiom from [] gives (p ; p)\n"), "step numbers must run"));
}

TEST(ProofParser, UnknownTagAndWitness) {
  EXPECT_TRUE(mentions(proof_errors("goal: (p ; p)\nstep 1: Magic from [] gives (p ; p)\n"), "unknown rule tag"));
  EXPECT_TRUE(mentions(proof_errors("goal: (p ; p)\nstep 1: Axiom from [] gives (p ; p) [witness: color=a]\n"),
                       "unknown witness key"));
}

TEST(ProofParser, BadFormula) {
  EXPECT_TRUE(mentions(proof_errors("goal: ((nand p q) ; p)\nstep 1: Axiom from [] gives (p ; p)\n"),
                       "expected and, or, imp, forall or exists"));
}

TEST(ProofParser, EngineProofsRoundTrip) {
  KnowledgeBase kb = kb_of(read_text(std::string(NDP_TEST_DIR) + "/data/beach.ndkb"));
  PlanResult r = decide_guaranteed(kb, lit("satisfied(p,e)"));
  Proof p = plan_proof(kb, lit("satisfied(p,e)"), r.tree);
  EXPECT_EQ(proof_of(serialize(p)), p);
  auto f = entails_with_proof(kb_of("like(a,b). like(b,a). friends(X,Y) <- like(X,Y) & like(Y,X)."),
                              lit("friends(a,b)"));
  ASSERT_TRUE(f);
  EXPECT_EQ(proof_of(serialize(*f)), *f);
}

TEST(CaseTreeText, ShowsBranches) {
  KnowledgeBase kb = kb_of(read_text(std::string(NDP_TEST_DIR) + "/data/beach.ndkb"));
  std::string text = serialize(decide_guaranteed(kb, lit("satisfied(p,e)")).tree);
  EXPECT_NE(text.find("sunny(e)"), std::string::npos) << text;
  EXPECT_NE(text.find("~sunny(e)"), std::string::npos) << text;
}
