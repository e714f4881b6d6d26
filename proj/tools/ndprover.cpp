#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ndprover/ndprover.h"

namespace {

struct ResultDeleter {
  void operator()(ndp_result* r) const { ndp_result_free(r); }
};
struct KbDeleter {
  void operator()(ndp_kb* k) const { ndp_kb_free(k); }
};
using ResultPtr = std::unique_ptr<ndp_result, ResultDeleter>;
using KbPtr = std::unique_ptr<ndp_kb, KbDeleter>;

struct Globals {
  bool quiet = false;
  unsigned threads = 1;
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

int error(const std::string& msg) {
  std::cerr << "error: " << msg;
  if (msg.empty() || msg.back() != '\n') std::cerr << "\n";
  return 2;
}

KbPtr load_kb(const std::string& path, const Globals& g, int& code) {
  std::string text;
  if (!read_file(path, text)) {
    code = error("cannot read " + path);
    return nullptr;
  }
  ndp_kb* kb = nullptr;
  if (ndp_kb_parse(text.c_str(), path.c_str(), &kb) != NDP_OK) {
    std::cerr << ndp_last_error();
    code = 2;
    return nullptr;
  }
  if (!g.quiet) std::cerr << ndp_kb_diagnostics(kb);
  return KbPtr(kb);
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream f(path, std::ios::binary);
  return f && (f << text) && f.flush();
}

// Prints the report and maps the status to the exit code.
int report(ndp_status s, ndp_result* raw, const Globals& g, bool trace = false,
           const std::string& proof_path = "") {
  ResultPtr r(raw);
  if (!r) return error(ndp_last_error());
  const std::string verdict = ndp_result_verdict(r.get());
  if (g.quiet) {
    if (!verdict.empty()) std::cout << verdict << "\n";
  } else {
    if (!verdict.empty()) std::cout << verdict << "\n";
    std::cout << ndp_result_text(r.get());
    if (trace && ndp_result_trace(r.get())) std::cout << ndp_result_trace(r.get());
    for (size_t i = 0; i < ndp_result_stat_count(r.get()); ++i)
      std::cout << "stat: " << ndp_result_stat_key(r.get(), i) << "=" << ndp_result_stat_value(r.get(), i)
                << "\n";
  }
  if (!proof_path.empty() && ndp_result_proof(r.get())) {
    if (!write_file(proof_path, ndp_result_proof(r.get()))) return error("cannot write " + proof_path);
    if (!g.quiet) std::cout << "proof: " << proof_path << "\n";
  }
  return static_cast<int>(s);
}

std::vector<uint64_t> parse_sizes(const std::string& s) {
  std::vector<uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = std::stoull(item, &used);
    if (used != item.size() || v == 0) throw std::invalid_argument(item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-deduction prover: proof checking, forward inference, queries and planning"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("-q,--quiet", g.quiet, "Print only the verdict word");
  app.add_option("--threads", g.threads, "Cap on engine threads")
      ->envname("NDPROVER_THREADS")
      ->check(CLI::Range(1u, 1024u));

  std::string file, goal, proof_out, strategy = "ground", fragment, sizes, csv;
  bool dump = false, trace = false;
  uint64_t budget = 0, seed = 1, ceiling = 0, max_leaves = 0;
  unsigned repetitions = 5;

  auto* check = app.add_subcommand("check", "Verify a proof document");
  check->add_option("proof", file, "Proof file (.ndp)")->required();

  auto* run = app.add_subcommand("run", "Forward fixpoint of a knowledge base");
  run->add_option("kb", file, "Knowledge base (.ndkb)")->required();
  run->add_option("goal", goal, "Ground literal to look up");
  run->add_flag("--dump", dump, "Print every fact, not just derived ones");
  run->add_option("--emit-proof", proof_out, "Write a proof of the goal")->needs(run->get_option("goal"));

  const std::map<std::string, ndp_strategy> strategies{{"ground", NDP_STRATEGY_GROUND},
                                                       {"shallow", NDP_STRATEGY_SHALLOW},
                                                       {"top1", NDP_STRATEGY_TOP1},
                                                       {"astar", NDP_STRATEGY_ASTAR}};
  auto* query = app.add_subcommand("query", "Answer an existential query");
  query->add_option("kb", file, "Knowledge base (.ndkb)")->required();
  query->add_option("goal", goal, "Ground literal")->required();
  query->add_option("--strategy", strategy, "ground, shallow, top1 or astar")
      ->check(CLI::IsMember({"ground", "shallow", "top1", "astar"}));
  query->add_option("--budget", budget, "A* expansion budget")->check(CLI::PositiveNumber);
  query->add_option("--grounding-ceiling", ceiling, "Maximum ground rules per rule");
  query->add_option("--emit-proof", proof_out, "Write a proof of the goal");

  auto* plan = app.add_subcommand("plan", "Decide whether a goal holds in every case");
  plan->add_option("kb", file, "Knowledge base (.ndkb)")->required();
  plan->add_option("goal", goal, "Ground literal")->required();
  plan->add_option("--strategy", strategy, "Query strategy used at the leaves")
      ->check(CLI::IsMember({"ground", "shallow", "top1", "astar"}));
  plan->add_option("--max-leaves", max_leaves, "Leaf ceiling")->check(CLI::PositiveNumber);
  plan->add_option("--grounding-ceiling", ceiling, "Maximum ground rules per rule");
  plan->add_flag("--trace", trace, "Print the case tree");
  plan->add_option("--emit-proof", proof_out, "Write a proof of the goal");

  auto* bench = app.add_subcommand("bench", "Measure scaling on generated theories");
  bench->add_option("--fragment", fragment, "forward, query or planning")
      ->required()
      ->check(CLI::IsMember({"forward", "query", "planning"}));
  bench->add_option("--sizes", sizes, "Comma list: body literals, D, or k")->required();
  bench->add_option("--out", csv, "CSV report path")->required();
  bench->add_option("--seed", seed, "Generator seed");
  bench->add_option("--repetitions", repetitions, "Runs per size; the median is reported")
      ->check(CLI::Range(3u, 1000u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  int code = 0;
  if (*check) {
    std::string text;
    if (!read_file(file, text)) return error("cannot read " + file);
    ndp_result* r = nullptr;
    ndp_status s = ndp_check(text.c_str(), file.c_str(), &r);
    if (s == NDP_PARSE_ERROR) {
      std::cerr << ndp_last_error();
      return 2;
    }
    return report(s, r, g);
  }
  if (*run) {
    KbPtr kb = load_kb(file, g, code);
    if (!kb) return code;
    ndp_result* r = nullptr;
    ndp_status s = ndp_run(kb.get(), goal.empty() ? nullptr : goal.c_str(), dump, !proof_out.empty(), &r);
    return report(s, r, g, false, proof_out);
  }
  if (*query) {
    KbPtr kb = load_kb(file, g, code);
    if (!kb) return code;
    ndp_query_options o;
    ndp_query_options_init(&o);
    o.strategy = strategies.at(strategy);
    o.budget = budget;
    o.grounding_ceiling = ceiling;
    o.want_proof = !proof_out.empty();
    o.threads = g.threads;
    ndp_result* r = nullptr;
    ndp_status s = ndp_query(kb.get(), goal.c_str(), &o, &r);
    return report(s, r, g, false, proof_out);
  }
  if (*plan) {
    KbPtr kb = load_kb(file, g, code);
    if (!kb) return code;
    ndp_plan_options o;
    ndp_plan_options_init(&o);
    o.strategy = strategies.at(strategy);
    o.max_leaves = max_leaves;
    o.grounding_ceiling = ceiling;
    o.want_proof = !proof_out.empty();
    o.want_trace = trace;
    o.threads = g.threads;
    ndp_result* r = nullptr;
    ndp_status s = ndp_plan(kb.get(), goal.c_str(), &o, &r);
    return report(s, r, g, trace, proof_out);
  }
  if (*bench) {
    std::vector<uint64_t> sz;
    try {
      sz = parse_sizes(sizes);
    } catch (const std::exception&) {
      return error("--sizes expects a comma list of positive integers, got '" + sizes + "'");
    }
    ndp_bench_options o;
    ndp_bench_options_init(&o);
    o.fragment = fragment == "forward" ? NDP_FRAGMENT_FORWARD
                 : fragment == "query" ? NDP_FRAGMENT_QUERY
                                       : NDP_FRAGMENT_PLANNING;
    o.sizes = sz.data();
    o.size_count = sz.size();
    o.seed = seed;
    o.repetitions = repetitions;
    ndp_result* r = nullptr;
    ndp_status s = ndp_bench(&o, csv.c_str(), &r);
    return report(s, r, g);
  }
  return 2;
}
