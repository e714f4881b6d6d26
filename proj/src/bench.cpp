#include "ndprover/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>

#include "ndprover/forward.hpp"
#include "ndprover/planning.hpp"
#include "ndprover/query.hpp"

namespace ndp {

std::string_view bench_fragment_name(BenchFragment f) {
  switch (f) {
    case BenchFragment::Forward: return "forward";
    case BenchFragment::Query: return "query";
    case BenchFragment::Planning: return "planning";
  }
  return "?";
}

std::optional<BenchFragment> parse_bench_fragment(std::string_view s) {
  for (BenchFragment f : {BenchFragment::Forward, BenchFragment::Query, BenchFragment::Planning})
    if (bench_fragment_name(f) == s) return f;
  return std::nullopt;
}

namespace {

// rng() % n rather than std::uniform_int_distribution, whose output differs
// between standard libraries.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(gen() % n); }
};

Term constant(std::size_t i) { return Term::constant("c" + std::to_string(i)); }

Literal lit(const std::string& pred, std::vector<Term> args) { return Literal{true, Atom{pred, std::move(args)}}; }

void require(bool ok, const std::string& why) {
  if (!ok) throw InfeasibleSpecError(why);
}

constexpr std::size_t kForwardWindow = 64;

KnowledgeBase forward_ground(const TheorySpec& spec, Rng& rng) {
  const std::size_t universe = spec.predicates * spec.constants;
  require(universe >= 2, "ground forward theories need at least two atoms");
  require(spec.body_width < universe, "body width must be below predicates x constants");
  // Shared terms keep the fact store compact.
  std::vector<Term> consts;
  for (std::size_t i = 0; i < spec.constants; ++i) consts.push_back(constant(i));
  auto atom = [&](std::size_t i) {
    return lit("p" + std::to_string(i / spec.constants), {consts[i % spec.constants]});
  };
  KnowledgeBase kb;
  // Atoms are layered by index; bodies only use lower atoms, so most rules fire.
  const std::size_t seeds = std::max(spec.body_width, universe / 20);
  for (std::size_t i = 0; i < seeds; ++i) kb.add_fact(atom(i));
  for (std::size_t r = 0; r < spec.rules; ++r) {
    // Every non-seed atom heads some rule once rules >= universe - seeds.
    std::size_t h = seeds + r % (universe - seeds);
    Conjunct body;
    // Bodies draw from a window of atoms just below the head.
    const std::size_t window = std::min(h, kForwardWindow);
    for (std::size_t w = 0; w < spec.body_width; ++w) body.push_back(atom(h - 1 - rng.below(window)));
    kb.rules.push_back(Rule::make({atom(h)}, HeadKind::Conjunctive, {body}));
  }
  return kb;
}

KnowledgeBase forward_open(const TheorySpec& spec, Rng& rng) {
  require(spec.max_arity >= 1 && spec.max_arity <= 2, "forward theories use arity 1 or 2");
  std::vector<std::size_t> arity(spec.predicates);
  for (auto& a : arity) a = 1 + rng.below(spec.max_arity);
  auto pred = [](std::size_t i) { return "p" + std::to_string(i); };
  KnowledgeBase kb;
  const std::size_t nfacts = std::max<std::size_t>(1, spec.predicates * spec.constants / 2);
  for (std::size_t f = 0; f < nfacts; ++f) {
    std::size_t p = rng.below(spec.predicates);
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity[p]; ++i) args.push_back(constant(rng.below(spec.constants)));
    kb.add_fact(lit(pred(p), args));
  }
  const Term vars[] = {Term::variable("X"), Term::variable("Y")};
  for (std::size_t r = 0; r < spec.rules; ++r) {
    std::size_t h = rng.below(spec.predicates);
    std::vector<Term> head_args;
    std::vector<Term> used;
    for (std::size_t i = 0; i < arity[h]; ++i) {
      head_args.push_back(vars[rng.below(2)]);
      if (std::find(used.begin(), used.end(), head_args.back()) == used.end()) used.push_back(head_args.back());
    }
    Conjunct body;
    for (std::size_t w = 0; w < spec.body_width; ++w) {
      std::size_t p = rng.below(spec.predicates);
      std::vector<Term> args;
      for (std::size_t i = 0; i < arity[p]; ++i)
        args.push_back(rng.below(4) < 3 ? used[rng.below(used.size())] : constant(rng.below(spec.constants)));
      body.push_back(lit(pred(p), args));
    }
    // Every head variable needs a body occurrence; patch in a literal for each missing one.
    for (const Term& v : used) {
      bool seen = std::any_of(body.begin(), body.end(), [&](const Literal& l) {
        return std::find(l.atom.args.begin(), l.atom.args.end(), v) != l.atom.args.end();
      });
      if (!seen) {
        std::size_t p = rng.below(spec.predicates);
        body.push_back(lit(pred(p), std::vector<Term>(arity[p], v)));
      }
    }
    kb.rules.push_back(Rule::make({lit(pred(h), head_args)}, HeadKind::Conjunctive, {body}));
  }
  return kb;
}

KnowledgeBase query_theory(const TheorySpec& spec, Rng& rng) {
  require(spec.existentials >= 1, "query theories need at least one existential");
  require(spec.constants >= 1 && spec.predicates >= 1, "query theories need constants and predicates");
  auto base = [](std::size_t i) { return "b" + std::to_string(i); };
  KnowledgeBase kb;
  // A ring keeps every constant in the domain.
  for (std::size_t i = 0; i < spec.constants; ++i)
    kb.add_fact(lit(base(0), {constant(i), constant((i + 1) % spec.constants)}));
  for (std::size_t f = 0; f < spec.predicates * spec.constants; ++f)
    kb.add_fact(lit(base(rng.below(spec.predicates)),
                    {constant(rng.below(spec.constants)), constant(rng.below(spec.constants))}));
  for (std::size_t r = 0; r < spec.rules; ++r) {
    Conjunct body;
    Term prev = Term::variable("X");
    for (std::size_t e = 1; e <= spec.existentials; ++e) {
      Term next = Term::variable("E" + std::to_string(e));
      body.push_back(lit(base(rng.below(spec.predicates)), {prev, next}));
      prev = next;
    }
    kb.rules.push_back(
        Rule::make({lit("h" + std::to_string(r), {Term::variable("X")})}, HeadKind::Conjunctive, {body}));
  }
  return kb;
}

KnowledgeBase planning_theory(const TheorySpec& spec, Rng& rng) {
  require(spec.disjunctions >= 1, "planning theories need at least one disjunctive fact");
  const std::size_t k = spec.disjunctions;
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng.gen);
  KnowledgeBase kb;
  const Term c = Term::constant("c");
  const Term x = Term::variable("X");
  for (std::size_t i : order) {
    const std::string n = std::to_string(i);
    DisjunctiveFact d;
    d.alternatives = {lit("p" + n, {c}), lit("q" + n, {c})};
    kb.disjunctive_facts.push_back(d);
    kb.rules.push_back(
        Rule::make({lit("ok" + n, {x})}, HeadKind::Conjunctive, {{lit("p" + n, {x})}, {lit("q" + n, {x})}}));
  }
  Conjunct all;
  for (std::size_t i = 0; i < k; ++i) all.push_back(lit("ok" + std::to_string(i), {x}));
  kb.rules.push_back(Rule::make({lit("all_ok", {x})}, HeadKind::Conjunctive, {all}));
  return kb;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

KnowledgeBase generate_theory(const TheorySpec& spec) {
  require(spec.predicates > 0 && spec.constants > 0 && spec.rules > 0 && spec.body_width > 0,
          "size parameters must be positive");
  Rng rng(spec.seed);
  switch (spec.fragment) {
    case BenchFragment::Forward: return spec.ground ? forward_ground(spec, rng) : forward_open(spec, rng);
    case BenchFragment::Query: return query_theory(spec, rng);
    case BenchFragment::Planning: return planning_theory(spec, rng);
  }
  return {};
}

Literal designated_goal(const TheorySpec& spec) {
  switch (spec.fragment) {
    case BenchFragment::Forward:
      return lit("p0", std::vector<Term>(spec.ground ? 1 : 0, constant(0)));
    case BenchFragment::Query: return lit("h0", {constant(0)});
    case BenchFragment::Planning: return lit("all_ok", {Term::constant("c")});
  }
  return {};
}

TheorySpec bench_spec(BenchFragment f, std::size_t n, std::uint64_t seed, std::size_t existentials) {
  TheorySpec s;
  s.fragment = f;
  s.seed = seed;
  switch (f) {
    case BenchFragment::Forward:
      s.ground = true;
      s.body_width = 4;
      s.rules = std::max<std::size_t>(1, n / s.body_width);
      s.constants = 10;
      s.predicates = std::max<std::size_t>(1, s.rules / s.constants);
      break;
    case BenchFragment::Query:
      s.constants = n;
      s.existentials = existentials;
      s.rules = 1;
      break;
    case BenchFragment::Planning:
      s.disjunctions = n;
      break;
  }
  return s;
}

ScalingReport measure_scaling(const std::vector<TheorySpec>& specs, std::size_t repetitions) {
  if (repetitions < 3) throw std::invalid_argument("measure_scaling needs at least 3 repetitions");
  using Clock = std::chrono::steady_clock;
  ScalingReport report;
  report.environment = "threads=1 repetitions=" + std::to_string(repetitions);
  for (const TheorySpec& spec : specs) {
    const KnowledgeBase kb = generate_theory(spec);
    const Literal goal = designated_goal(spec);
    ScalingRow row;
    row.spec = spec;
    row.rules = kb.rules.size();
    std::vector<double> times;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const auto start = Clock::now();
      switch (spec.fragment) {
        case BenchFragment::Forward: {
          FixpointResult r = fixpoint(kb);
          row.ground_rules = kb.rules.size();
          row.facts_derived = r.state.facts().size() - r.state.given_count();
          break;
        }
        case BenchFragment::Query: {
          QueryEngine e(kb);
          Answer a = e.answer(goal, Strategy::full_grounding());
          if (a.status == AnswerStatus::GroundingLimit) row.note = "grounding-limit";
          row.ground_rules = a.stats.rules_generated;
          row.facts_derived = a.stats.facts_derived;
          break;
        }
        case BenchFragment::Planning: {
          try {
            PlanResult r = decide_guaranteed(kb, goal);
            row.leaves = r.stats.leaves;
            row.ground_rules = r.stats.ground_rules;
            if (r.truncated) row.note = "leaf-limit";
          } catch (const GroundingLimitError&) {
            row.note = "grounding-limit";
          }
          break;
        }
      }
      times.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
      if (!row.note.empty()) break;
    }
    row.millis = median(times);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_csv(const ScalingReport& report) {
  std::string out = "fragment,seed,param_D,param_N,param_k,rules,ground_rules,leaves,facts_derived,millis\n";
  for (const ScalingRow& r : report.rows) {
    const bool query = r.spec.fragment == BenchFragment::Query;
    const bool planning = r.spec.fragment == BenchFragment::Planning;
    char millis[32];
    std::snprintf(millis, sizeof millis, "%.3f", r.millis);
    out += std::string(bench_fragment_name(r.spec.fragment)) + "," + std::to_string(r.spec.seed) + "," +
           std::to_string(planning ? 1 : r.spec.constants) + "," + std::to_string(query ? r.spec.existentials : 0) + "," +
           std::to_string(planning ? r.spec.disjunctions : 0) + "," + std::to_string(r.rules) + "," +
           std::to_string(r.ground_rules) + "," + std::to_string(r.leaves) + "," +
           std::to_string(r.facts_derived) + "," + (r.note.empty() ? std::string(millis) : r.note) + "\n";
  }
  return out;
}

void emit_csv(const ScalingReport& report, const std::string& path) {
  if (report.rows.empty()) throw std::invalid_argument("empty scaling report");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << to_csv(report);
  if (!f.flush()) throw std::runtime_error("cannot write " + path);
}

}  // namespace ndp
