#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ndprover/kb.hpp"
#include "ndprover/planning.hpp"
#include "ndprover/proof.hpp"

namespace ndp {

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  bool is_error() const { return severity == Severity::Error; }
  std::string to_string() const;  // "file:line:col: error: message"
};

bool has_errors(const std::vector<ParseDiagnostic>& ds);

struct KbParse {
  KnowledgeBase kb;  // statements that parsed cleanly; unusable if ok() is false
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

struct ProofParse {
  Proof proof;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

// Knowledge-base syntax: facts "p(a)." and "p(a) | ~q(b).", rules
// "h(X) <- b1(X) & b2(X) ; b3(X).", heads joined by & or by |, "#" comments.
KbParse parse_kb(std::string_view text, const std::string& file = "<input>");

// Proof documents:
//   goal: (A1, A2 ; C1)
//   step 1: Axiom from [] gives (A1 ; A1)
//   step 2: ForAllElim from [1] gives (A1 ; A1, B) [witness: term=a]
// Formulas use prefix notation: (and F G), (or F G), (imp F G), (forall X F),
// (exists X F), bot, and atoms.
ProofParse parse_proof(std::string_view text, const std::string& file = "<input>");

// A single literal in knowledge-base syntax, with an optional trailing '.'.
std::optional<Literal> parse_literal(std::string_view text,
                                     std::vector<ParseDiagnostic>* diagnostics = nullptr);
std::optional<Formula> parse_formula(std::string_view text,
                                     std::vector<ParseDiagnostic>* diagnostics = nullptr);

// Canonical forms, one statement per line; parsing the output gives back an equal value.
std::string serialize(const KnowledgeBase& kb);
std::string serialize(const Proof& p);
std::string serialize(const CaseTree& t);
std::string serialize(const Sequent& s);

}  // namespace ndp
