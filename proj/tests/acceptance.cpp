// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "golden.hpp"
#include "ndprover/bench.hpp"
#include "ndprover/forward.hpp"
#include "ndprover/frontend.hpp"
#include "ndprover/planning.hpp"
#include "ndprover/query.hpp"
#include "oracles.hpp"
#include "random_kb.hpp"
#include "util.hpp"

using namespace ndp;
using namespace ndp::testkit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok && pass) detail << "FAILED: " << why << "; ";
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
}

std::string data(const char* name) { return read_text(std::string(NDP_TEST_DIR) + "/data/" + name); }

// Every KB and proof produced along the way, for the round-trip criterion.
std::vector<KnowledgeBase> seen_kbs;
std::vector<Proof> seen_proofs;

void golden_suite(Outcome& o) {
  const auto t0 = Clock::now();
  int verified = 0, rejected = 0;
  for (const GoldenProof& g : golden_proofs()) {
    Proof p = proof_of(read_text(golden_path(g)));
    const bool ok = verify_proof(p).ok();
    o.require(ok, g.file + " does not verify");
    verified += ok;
    seen_proofs.push_back(p);
  }
  const auto catalog = mutation_catalog();
  for (const Mutation& m : catalog) {
    Verdict v = verify_proof(proof_of(apply_mutation(m)));
    const bool ok = !v.ok() && v.violation().step + 1 == m.step;
    o.require(ok, "mutation " + m.name + " not rejected at its step");
    rejected += ok;
  }
  for (RuleTag r : kAllRules) {
    int n = 0;
    for (const Mutation& m : catalog) n += m.rule == r;
    o.require(n >= 3, std::string("fewer than 3 mutations for ") + std::string(tag_name(r)));
  }
  const double secs = seconds_since(t0);
  o.require(golden_proofs().size() == 12, "expected 12 golden proofs");
  o.require(catalog.size() >= 36, "catalog smaller than 36");
  o.require(secs < 1.0, "runtime not below 1 s");
  o.detail << verified << "/12 verify, " << rejected << "/" << catalog.size() << " mutations rejected, " << secs << " s";
}

void friends(Outcome& o) {
  KnowledgeBase kb = kb_of(data("friends.ndkb"));
  seen_kbs.push_back(kb);
  FixpointResult r = fixpoint(kb);
  o.require(r.state.contains(lit("friends(a,b)")) && r.state.contains(lit("friends(b,a)")), "friends facts missing");
  for (const char* g : {"friends(a,b)", "friends(b,a)"}) {
    auto p = entails_with_proof(kb, lit(g));
    o.require(bool(p), std::string("no proof for ") + g);
    if (!p) continue;
    seen_proofs.push_back(*p);
    o.require(verify_proof(*p).ok(), std::string("proof of ") + g + " rejected");
    o.require(rules_used(*p) == Fragment::Forward, "proof not classified forward");
  }
  o.detail << "derived friends(a,b), friends(b,a); proofs verify as forward";
}

void forward_oracle(Outcome& o) {
  // 200 exact comparisons. KBs whose closure is contradictory stop early, so
  // those are checked for detection and for deriving only oracle facts.
  const auto t0 = Clock::now();
  int compared = 0, contradictions = 0;
  for (std::uint64_t seed = 1; compared < 200; ++seed) {
    KnowledgeBase kb = random_kb(seed).kb;
    seen_kbs.push_back(kb);
    FixpointResult r = fixpoint(kb);
    NaiveClosure n = naive_closure(kb);
    const auto& fs = r.state.facts().facts();
    if (n.contradiction) {
      ++contradictions;
      o.require(bool(r.state.contradiction()), "contradiction missed, seed " + std::to_string(seed));
      for (const Literal& l : fs) o.require(n.facts.count(l) > 0, "spurious fact, seed " + std::to_string(seed));
      continue;
    }
    ++compared;
    o.require(!r.state.contradiction(), "spurious contradiction, seed " + std::to_string(seed));
    o.require(std::set<Literal>(fs.begin(), fs.end()) == n.facts, "fixpoint differs, seed " + std::to_string(seed));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30, "runtime not below 30 s");
  o.detail << compared << " KBs equal the oracle exactly (" << contradictions << " contradictory KBs also checked), "
           << secs << " s";
}

void forward_linearity(Outcome& o) {
  std::vector<TheorySpec> specs;
  for (std::size_t n : {1000u, 10000u, 100000u}) specs.push_back(bench_spec(BenchFragment::Forward, n));
  ScalingReport r = measure_scaling(specs, 5);
  for (std::size_t i = 0; i < r.rows.size(); ++i) o.detail << (i ? ", " : "") << r.rows[i].millis << " ms";
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double ratio = r.rows[i].millis / std::max(r.rows[i - 1].millis, 1e-6);
    o.detail << " x" << ratio;
    o.require(ratio <= 15, "growth above 15x per decade");
  }
}

void grounding_count(Outcome& o) {
  int checked = 0;
  for (std::size_t n = 1; n <= 13; ++n) {
    std::string text = "h(X) <- ";
    for (std::size_t i = 0; i < n; ++i) text += (i ? " & " : "") + std::string("b(X,E") + std::to_string(i) + ")";
    Rule r = kb_of(text + ".").rules.at(0);
    for (std::size_t d = 1;; ++d) {
      const double expect = std::pow(double(d), double(n));
      if (expect > 1e4) break;
      std::set<Term> dom;
      for (std::size_t i = 0; i < d; ++i) dom.insert(Term::constant("k" + std::to_string(i)));
      const std::size_t got = ground_existentials(r, dom).size();
      o.require(got == static_cast<std::size_t>(std::llround(expect)),
                "D=" + std::to_string(d) + " N=" + std::to_string(n) + " gave " + std::to_string(got));
      ++checked;
      if (d == 10 && n == 2) o.require(got == 100, "D=10 N=2 not 100");
    }
  }
  o.detail << checked << " (D,N) pairs exact, D=10 N=2 gives 100";
}

void compete(Outcome& o) {
  const std::string base = "want(a,c). want(b,c). compete(X,Y) <- want(X,Z) & want(Y,Z).";
  KnowledgeBase kb = kb_of(base);
  seen_kbs.push_back(kb);
  for (const Strategy& s : {Strategy::full_grounding(), Strategy::shallow(), Strategy::top_one(), Strategy::astar()}) {
    Answer a = answer(kb, lit("compete(a,b)"), s, true);
    o.require(a.found(), s.name() + " did not find compete(a,b)");
    if (a.proof) {
      seen_proofs.push_back(*a.proof);
      o.require(verify_proof(*a.proof).ok(), s.name() + " proof rejected");
    }
    if (s.kind == Strategy::Kind::TopOneRanked) {
      o.require(a.stats.expansions == 1, "TopOne expansions " + std::to_string(a.stats.expansions));
    }
  }
  // Shallow timing with 10x more unrelated rules.
  auto with_rules = [&](std::size_t n) {
    std::string text = base;
    for (std::size_t i = 0; i < n; ++i)
      text += " r" + std::to_string(i) + "(X,Y) <- want(X,Z) & s" + std::to_string(i) + "(Y,Z).";
    return kb_of(text);
  };
  auto time_shallow = [&](const KnowledgeBase& k) {
    QueryEngine e(k);
    std::vector<double> runs;
    for (int rep = 0; rep < 9; ++rep) {
      const auto t0 = Clock::now();
      for (int i = 0; i < 2000; ++i)
        if (!e.answer(lit("compete(a,b)"), Strategy::shallow()).found()) return -1.0;
      runs.push_back(seconds_since(t0));
    }
    return median(runs);
  };
  const double small = time_shallow(with_rules(50)), large = time_shallow(with_rules(500));
  o.require(small > 0 && large > 0, "shallow failed with extra rules");
  const double ratio = large / small;
  o.require(ratio < 2.0, "shallow time varied by x" + std::to_string(ratio));
  o.detail << "4 strategies found; TopOne 1 expansion; shallow 50->500 rules x" << ratio;
}

void query_soundness(Outcome& o) {
  RandomKbOptions opt;
  opt.existentials = true;
  opt.negation = false;
  std::size_t goals = 0, witnesses = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    RandomKb r = random_kb(seed, opt);
    seen_kbs.push_back(r.kb);
    NaiveClosure n = naive_closure(r.kb);
    QueryEngine e(r.kb);
    for (std::size_t hp : r.head_predicates)
      for (const Literal& goal : ground_instances(r, hp)) {
        ++goals;
        const bool truth = n.facts.count(goal) > 0;
        for (const Strategy& s : {Strategy::full_grounding(), Strategy::shallow(), Strategy::top_one(), Strategy::astar()}) {
          Answer a = e.answer(goal, s);
          if (s.kind == Strategy::Kind::FullGrounding)
            o.require(a.found() == truth, "FullGrounding disagrees on " + goal.to_string() + ", seed " + std::to_string(seed));
          if (!a.found()) continue;
          ++witnesses;
          o.require(truth, s.name() + " found an underivable " + goal.to_string());
          if (!a.rule) continue;
          const Rule& rule = r.kb.rules[*a.rule];
          o.require(holds_in(apply_substitution(rule.body[a.disjunct], a.bindings), n.facts),
                    s.name() + " witness fails the body, seed " + std::to_string(seed));
        }
      }
  }
  o.detail << "500 KBs, " << goals << " goals, " << witnesses << " answers checked";
}

void beach(Outcome& o) {
  KnowledgeBase kb = kb_of(data("beach.ndkb"));
  seen_kbs.push_back(kb);
  const Literal goal = lit("satisfied(p,e)");
  PlanResult r = decide_guaranteed(kb, goal);
  o.require(r.guaranteed, "not GUARANTEED");
  o.require(r.stats.leaves == 2, "leaves " + std::to_string(r.stats.leaves));
  std::vector<const CaseTree*> leaves;
  std::function<void(const CaseTree&)> walk = [&](const CaseTree& t) {
    if (t.kind == CaseTree::Kind::Leaf) leaves.push_back(&t);
    for (const CaseTree& c : t.children) walk(c);
  };
  walk(r.tree);
  if (leaves.size() == 2) {
    o.require(leaves[0]->detail.find("excited(p,e,10)") != std::string::npos, "sunny leaf not level 10");
    o.require(leaves[1]->detail.find("excited(p,e,7)") != std::string::npos, "rainy leaf not level 7");
  }
  if (r.guaranteed) {
    Proof p = plan_proof(kb, goal, r.tree);
    seen_proofs.push_back(p);
    const auto ors = std::count_if(p.steps.begin(), p.steps.end(), [](const ProofStep& s) { return s.rule == RuleTag::OrElim; });
    o.require(ors == 1, "OrElim steps " + std::to_string(ors));
    o.require(verify_proof(p).ok(), "plan proof rejected");
    o.require(rules_used(p) == Fragment::Planning, "plan proof not classified planning");
  }
  KnowledgeBase without = kb_of(data("beach_no_restaurant.ndkb"));
  seen_kbs.push_back(without);
  PlanResult n = decide_guaranteed(without, goal);
  o.require(!n.guaranteed, "still GUARANTEED without restaurants");
  leaves.clear();
  walk(n.tree);
  o.require(leaves.size() == 2 && leaves[0]->holds && !leaves[1]->holds &&
                leaves[1]->detail.find("geq(1,7)") != std::string::npos,
            "rainy leaf does not fail at geq(1,7)");
  o.detail << "GUARANTEED with 2 leaves and one OrElim; NOT-GUARANTEED without restaurants";
}

void planning_oracle(Outcome& o) {
  int yes = 0, no = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const std::size_t k = 1 + seed % 10;
    RandomPlan rp = random_plan(seed, k);
    seen_kbs.push_back(rp.kb);
    PlanResult r = decide_guaranteed(rp.kb, rp.goal);
    const bool truth = exhaustive_guaranteed(rp.kb, rp.goal);
    o.require(r.guaranteed == truth, "verdict differs, seed " + std::to_string(seed));
    (truth ? yes : no)++;
    if (r.guaranteed) {
      Proof p = plan_proof(rp.kb, rp.goal, r.tree);
      seen_proofs.push_back(p);
      o.require(verify_proof(p).ok(), "plan proof rejected, seed " + std::to_string(seed));
    }
  }
  o.detail << "300 KBs with k<=10: " << yes << " guaranteed, " << no << " not, all match";
}

void planning_scaling(Outcome& o) {
  std::vector<TheorySpec> specs;
  for (std::size_t k = 8; k <= 14; ++k) specs.push_back(bench_spec(BenchFragment::Planning, k));
  ScalingReport r = measure_scaling(specs, 5);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    seen_kbs.push_back(generate_theory(r.rows[i].spec));
    o.require(r.rows[i].leaves == (std::size_t{1} << r.rows[i].spec.disjunctions), "leaf count not 2^k");
    if (i == 0) continue;
    const double ratio = r.rows[i].millis / std::max(r.rows[i - 1].millis, 1e-6);
    o.detail << (i > 1 ? " " : "ratios") << " x" << ratio;
    o.require(ratio >= 1.5, "ratio below 1.5 at k=" + std::to_string(r.rows[i].spec.disjunctions));
  }
}

void round_trip(Outcome& o) {
  for (BenchFragment f : {BenchFragment::Forward, BenchFragment::Query})
    for (std::size_t n : {10u, 100u}) seen_kbs.push_back(generate_theory(bench_spec(f, n)));
  for (std::uint64_t seed = 400; seed < 430; ++seed) {
    RandomKbOptions opt;
    opt.negation = false;
    KnowledgeBase kb = random_kb(seed, opt).kb;
    FixpointResult r = fixpoint(kb);
    for (const Literal& l : r.state.facts().facts())
      if (auto p = entails_with_proof(kb, l)) seen_proofs.push_back(*p);
  }
  std::size_t bad_kbs = 0, bad_proofs = 0;
  for (const KnowledgeBase& kb : seen_kbs) {
    KbParse p = parse_kb(serialize(kb));
    bad_kbs += !(p.ok() && p.kb == kb);
  }
  for (const Proof& pr : seen_proofs) {
    ProofParse p = parse_proof(serialize(pr));
    bad_proofs += !(p.ok() && p.proof == pr);
  }
  o.require(bad_kbs == 0, std::to_string(bad_kbs) + " KBs changed");
  o.require(bad_proofs == 0, std::to_string(bad_proofs) + " proofs changed");
  o.detail << seen_kbs.size() << " KBs and " << seen_proofs.size() << " proofs round-trip";
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)(Outcome&)> criteria[] = {
      {"golden proofs and mutation catalog", golden_suite},
      {"friends example", friends},
      {"forward fixpoint vs naive oracle", forward_oracle},
      {"forward time linear in body literals", forward_linearity},
      {"existential grounding emits D^N rules", grounding_count},
      {"compete example and shallow/top-1 costs", compete},
      {"strategy soundness on random query KBs", query_soundness},
      {"beach-town planning example", beach},
      {"planning vs exhaustive enumeration", planning_oracle},
      {"planning time exponential in splits", planning_scaling},
      {"parse/serialize round-trip", round_trip},
  };
  int failures = 0, i = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", ++i, name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", i - failures, i);
  return failures ? 1 : 0;
}
