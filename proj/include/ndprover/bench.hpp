#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndprover/kb.hpp"

namespace ndp {

enum class BenchFragment { Forward, Query, Planning };
std::string_view bench_fragment_name(BenchFragment f);
std::optional<BenchFragment> parse_bench_fragment(std::string_view s);

struct TheorySpec {
  BenchFragment fragment = BenchFragment::Forward;
  std::size_t predicates = 4;
  std::size_t constants = 4;    // D
  std::size_t rules = 8;
  std::size_t body_width = 2;
  std::size_t existentials = 2;  // N, query theories
  std::size_t disjunctions = 3;  // k, planning theories
  std::size_t max_arity = 2;     // forward theories with variables
  bool ground = false;           // forward: propositional rules over p_i(c_j) atoms
  std::uint64_t seed = 1;
};

struct InfeasibleSpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Deterministic in the spec. Forward theories are safe with no body-only
// variables; query rules have exactly N existentials over D constants;
// planning theories have k binary disjunctive facts and a goal that needs
// every one of them split.
KnowledgeBase generate_theory(const TheorySpec& spec);

// The spec measured for one size: body literals of a ground forward theory
// (rules of width 4), D for query theories, k for planning theories.
TheorySpec bench_spec(BenchFragment f, std::size_t size, std::uint64_t seed = 1,
                      std::size_t existentials = 2);

// The literal the measurements ask about.
Literal designated_goal(const TheorySpec& spec);

struct ScalingRow {
  TheorySpec spec;
  std::size_t rules = 0;
  std::size_t ground_rules = 0;
  std::size_t leaves = 0;
  std::size_t facts_derived = 0;
  double millis = 0;  // median over repetitions
  std::string note;   // resource guard that tripped, if any
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::string environment;
};

// Throws std::invalid_argument if repetitions < 3.
ScalingReport measure_scaling(const std::vector<TheorySpec>& specs, std::size_t repetitions = 5);

std::string to_csv(const ScalingReport& report);
// Throws std::invalid_argument on an empty report, std::runtime_error if the
// file cannot be written.
void emit_csv(const ScalingReport& report, const std::string& path);

}  // namespace ndp
