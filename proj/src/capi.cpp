#include "ndprover/ndprover.h"

#include <new>
#include <string>
#include <utility>
#include <vector>

#include "ndprover/bench.hpp"
#include "ndprover/forward.hpp"
#include "ndprover/frontend.hpp"
#include "ndprover/planning.hpp"
#include "ndprover/proof.hpp"
#include "ndprover/query.hpp"

struct ndp_kb {
  ndp::KnowledgeBase kb;
  std::string diagnostics;
};

struct ndp_result {
  std::string verdict;
  std::string text;
  std::vector<std::pair<std::string, std::string>> stats;
  std::optional<std::string> proof, trace;

  void line(const std::string& s) { text += s + "\n"; }
  void stat(const std::string& k, std::size_t v) { stats.emplace_back(k, std::to_string(v)); }
  void stat(const std::string& k, std::string v) { stats.emplace_back(k, std::move(v)); }
};

namespace {

thread_local std::string last_error;

ndp_status fail(ndp_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

std::string join_diagnostics(const std::vector<ndp::ParseDiagnostic>& ds, bool errors) {
  std::string out;
  for (const auto& d : ds)
    if (d.is_error() == errors) out += d.to_string() + "\n";
  return out;
}

// Parses a goal literal, which must be ground.
std::optional<ndp::Literal> goal_literal(const char* text) {
  if (!text) {
    last_error = "missing goal";
    return std::nullopt;
  }
  std::vector<ndp::ParseDiagnostic> ds;
  auto l = ndp::parse_literal(text, &ds);
  if (!l) {
    last_error = join_diagnostics(ds, true);
    return std::nullopt;
  }
  if (!l->is_ground()) {
    last_error = "goal must be ground: " + l->to_string();
    return std::nullopt;
  }
  return l;
}

ndp::Strategy strategy(ndp_strategy s, uint64_t budget) {
  switch (s) {
    case NDP_STRATEGY_SHALLOW: return ndp::Strategy::shallow();
    case NDP_STRATEGY_TOP1: return ndp::Strategy::top_one();
    case NDP_STRATEGY_ASTAR:
      return budget ? ndp::Strategy::astar(budget) : ndp::Strategy::astar();
    case NDP_STRATEGY_GROUND: break;
  }
  return ndp::Strategy::full_grounding();
}

std::string bindings(const ndp::Substitution& s) {
  std::string out;
  for (const auto& [v, t] : s) out += (out.empty() ? "" : ", ") + v + "=" + t.to_string();
  return out;
}

template <typename F>
ndp_status guarded(ndp_result** out, F&& body) {
  if (!out) return fail(NDP_PARSE_ERROR, "null result pointer");
  *out = nullptr;
  auto r = std::make_unique<ndp_result>();
  ndp_status s;
  try {
    s = body(*r);
  } catch (const ndp::GroundingLimitError& e) {
    r->line(std::string("resource limit: grounding-ceiling: ") + e.what());
    s = fail(NDP_RESOURCE_LIMIT, e.what());
  } catch (const ndp::UnsafeRuleError& e) {
    return fail(NDP_PARSE_ERROR, e.what());
  } catch (const ndp::InfeasibleSpecError& e) {
    return fail(NDP_PARSE_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NDP_PARSE_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NDP_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(NDP_INTERNAL_ERROR, e.what());
  }
  if (s == NDP_OK || s == NDP_NEGATIVE || s == NDP_RESOURCE_LIMIT) *out = r.release();
  return s;
}

}  // namespace

extern "C" {

const char* ndp_version(void) { return "1.0.0"; }

const char* ndp_last_error(void) { return last_error.c_str(); }

void ndp_query_options_init(ndp_query_options* o) {
  if (o) *o = ndp_query_options{NDP_STRATEGY_GROUND, 0, 0, 0, 1};
}

void ndp_plan_options_init(ndp_plan_options* o) {
  if (o) *o = ndp_plan_options{NDP_STRATEGY_GROUND, 0, 0, 0, 0, 1};
}

void ndp_bench_options_init(ndp_bench_options* o) {
  if (o) *o = ndp_bench_options{NDP_FRAGMENT_FORWARD, nullptr, 0, 1, 5, 2};
}

ndp_status ndp_kb_parse(const char* text, const char* filename, ndp_kb** out) {
  if (!out || !text) return fail(NDP_PARSE_ERROR, "null argument");
  *out = nullptr;
  try {
    ndp::KbParse p = ndp::parse_kb(text, filename ? filename : "<input>");
    if (!p.ok()) return fail(NDP_PARSE_ERROR, join_diagnostics(p.diagnostics, true));
    *out = new ndp_kb{std::move(p.kb), join_diagnostics(p.diagnostics, false)};
    return NDP_OK;
  } catch (const std::exception& e) {
    return fail(NDP_INTERNAL_ERROR, e.what());
  }
}

void ndp_kb_free(ndp_kb* kb) { delete kb; }

const char* ndp_kb_diagnostics(const ndp_kb* kb) { return kb ? kb->diagnostics.c_str() : ""; }
size_t ndp_kb_fact_count(const ndp_kb* kb) { return kb ? kb->kb.facts.size() : 0; }
size_t ndp_kb_rule_count(const ndp_kb* kb) { return kb ? kb->kb.rules.size() : 0; }

ndp_status ndp_check(const char* proof_text, const char* filename, ndp_result** out) {
  if (!proof_text) return fail(NDP_PARSE_ERROR, "null proof text");
  return guarded(out, [&](ndp_result& r) {
    ndp::ProofParse p = ndp::parse_proof(proof_text, filename ? filename : "<input>");
    if (!p.ok()) return fail(NDP_PARSE_ERROR, join_diagnostics(p.diagnostics, true));
    r.stat("steps", p.proof.steps.size());
    ndp::Verdict v = ndp::verify_proof(p.proof);
    if (!v) {
      r.verdict = "INVALID";
      r.line(v.violation().message());
      last_error = v.violation().message();
      return NDP_NEGATIVE;
    }
    r.verdict = "VALID";
    r.line("fragment: " + std::string(ndp::fragment_name(ndp::rules_used(p.proof))));
    return NDP_OK;
  });
}

ndp_status ndp_run(const ndp_kb* kb, const char* goal, int dump, int want_proof, ndp_result** out) {
  if (!kb) return fail(NDP_PARSE_ERROR, "null knowledge base");
  return guarded(out, [&](ndp_result& r) {
    std::optional<ndp::Literal> g;
    if (goal && !(g = goal_literal(goal))) return NDP_PARSE_ERROR;
    ndp::FixpointResult fp = ndp::fixpoint(kb->kb);
    const ndp::Chainer& c = fp.state;
    for (const ndp::Literal& l : fp.sorted_facts()) {
      auto d = c.derivation_of(l);
      if (dump || (d && d->kind == ndp::Derivation::Kind::Rule)) r.line(l.to_string() + ".");
    }
    r.stat("facts", c.facts().size());
    r.stat("derived", c.facts().size() - c.given_count());
    r.stat("rounds", c.rounds());
    if (c.contradiction()) {
      r.line(c.contradiction()->describe());
      last_error = "contradiction";
      return NDP_NEGATIVE;
    }
    if (!g) return NDP_OK;
    if (!c.contains(*g)) {
      r.verdict = "NOT-FOUND";
      return NDP_NEGATIVE;
    }
    r.verdict = "FOUND";
    if (want_proof) r.proof = ndp::serialize(*ndp::entails_with_proof(kb->kb, *g));
    return NDP_OK;
  });
}

ndp_status ndp_query(const ndp_kb* kb, const char* goal, const ndp_query_options* o, ndp_result** out) {
  if (!kb) return fail(NDP_PARSE_ERROR, "null knowledge base");
  ndp_query_options opts;
  ndp_query_options_init(&opts);
  if (o) opts = *o;
  return guarded(out, [&](ndp_result& r) {
    auto g = goal_literal(goal);
    if (!g) return NDP_PARSE_ERROR;
    ndp::QueryOptions qo;
    if (opts.grounding_ceiling) qo.grounding_ceiling = opts.grounding_ceiling;
    ndp::QueryEngine engine(kb->kb, qo);
    const ndp::Strategy s = strategy(opts.strategy, opts.budget);
    ndp::Answer a = engine.answer(*g, s, opts.want_proof != 0);
    r.stat("strategy", s.name());
    r.stat("expansions", a.stats.expansions);
    r.stat("rules_generated", a.stats.rules_generated);
    r.stat("facts_derived", a.stats.facts_derived);
    r.verdict = a.found() ? "FOUND" : "NOT-FOUND";
    switch (a.status) {
      case ndp::AnswerStatus::Found:
        if (a.rule) {
          r.line("rule: " + engine.kb().rules[*a.rule].to_string());
          if (!a.witness.empty()) r.line("witness: " + bindings(a.witness));
        } else {
          r.line("stored fact");
        }
        if (a.proof) r.proof = ndp::serialize(*a.proof);
        return NDP_OK;
      case ndp::AnswerStatus::NotFound:
        if (!a.detail.empty()) r.line(a.detail);
        return NDP_NEGATIVE;
      case ndp::AnswerStatus::BudgetExhausted:
        r.line("resource limit: astar-budget" + (a.detail.empty() ? "" : ": " + a.detail));
        return fail(NDP_RESOURCE_LIMIT, "astar-budget");
      case ndp::AnswerStatus::GroundingLimit:
        r.line("resource limit: grounding-ceiling: " + a.detail);
        return fail(NDP_RESOURCE_LIMIT, a.detail);
    }
    return NDP_INTERNAL_ERROR;
  });
}

ndp_status ndp_plan(const ndp_kb* kb, const char* goal, const ndp_plan_options* o, ndp_result** out) {
  if (!kb) return fail(NDP_PARSE_ERROR, "null knowledge base");
  ndp_plan_options opts;
  ndp_plan_options_init(&opts);
  if (o) opts = *o;
  return guarded(out, [&](ndp_result& r) {
    auto g = goal_literal(goal);
    if (!g) return NDP_PARSE_ERROR;
    ndp::PlanOptions po;
    if (opts.max_leaves) po.max_leaves = opts.max_leaves;
    if (opts.grounding_ceiling) po.grounding_ceiling = opts.grounding_ceiling;
    ndp::PlanResult p = ndp::decide_guaranteed(kb->kb, *g, strategy(opts.strategy, 0), po);
    r.stat("leaves", p.stats.leaves);
    r.stat("splits", p.stats.splits);
    r.stat("depth", p.stats.depth);
    r.stat("ground_rules", p.stats.ground_rules);
    if (opts.want_trace) r.trace = ndp::serialize(p.tree);
    r.verdict = p.guaranteed ? "GUARANTEED" : "NOT-GUARANTEED";
    if (p.truncated) {
      r.line("resource limit: leaf-ceiling after " + std::to_string(p.stats.leaves) + " leaves");
      return fail(NDP_RESOURCE_LIMIT, "leaf-ceiling");
    }
    if (!p.guaranteed) return NDP_NEGATIVE;
    if (opts.want_proof) r.proof = ndp::serialize(ndp::plan_proof(kb->kb, *g, p.tree));
    return NDP_OK;
  });
}

ndp_status ndp_bench(const ndp_bench_options* o, const char* csv_path, ndp_result** out) {
  if (!o || !csv_path) return fail(NDP_PARSE_ERROR, "null argument");
  if (!o->sizes || o->size_count == 0) return fail(NDP_PARSE_ERROR, "no sizes given");
  return guarded(out, [&](ndp_result& r) {
    std::vector<ndp::TheorySpec> specs;
    const ndp::BenchFragment f = o->fragment == NDP_FRAGMENT_QUERY      ? ndp::BenchFragment::Query
                                 : o->fragment == NDP_FRAGMENT_PLANNING ? ndp::BenchFragment::Planning
                                                                        : ndp::BenchFragment::Forward;
    for (size_t i = 0; i < o->size_count; ++i)
      specs.push_back(ndp::bench_spec(f, o->sizes[i], o->seed, o->existentials ? o->existentials : 2));
    ndp::ScalingReport rep = ndp::measure_scaling(specs, o->repetitions ? o->repetitions : 5);
    ndp::emit_csv(rep, csv_path);
    r.line("wrote " + std::string(csv_path));
    r.stat("rows", rep.rows.size());
    return NDP_OK;
  });
}

void ndp_result_free(ndp_result* r) { delete r; }
const char* ndp_result_verdict(const ndp_result* r) { return r ? r->verdict.c_str() : ""; }
const char* ndp_result_text(const ndp_result* r) { return r ? r->text.c_str() : ""; }
size_t ndp_result_stat_count(const ndp_result* r) { return r ? r->stats.size() : 0; }
const char* ndp_result_stat_key(const ndp_result* r, size_t i) {
  return r && i < r->stats.size() ? r->stats[i].first.c_str() : nullptr;
}
const char* ndp_result_stat_value(const ndp_result* r, size_t i) {
  return r && i < r->stats.size() ? r->stats[i].second.c_str() : nullptr;
}
const char* ndp_result_proof(const ndp_result* r) { return r && r->proof ? r->proof->c_str() : nullptr; }
const char* ndp_result_trace(const ndp_result* r) { return r && r->trace ? r->trace->c_str() : nullptr; }

}  // extern "C"
