#pragma once

#include <stdexcept>
#include <string>

#include "ndprover/frontend.hpp"

namespace ndp::testkit {

inline std::string diagnostics_text(const std::vector<ParseDiagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) out += d.to_string() + "\n";
  return out;
}

inline KnowledgeBase kb_of(const std::string& text) {
  KbParse p = parse_kb(text, "<test>");
  if (!p.ok()) throw std::runtime_error(diagnostics_text(p.diagnostics));
  return p.kb;
}

inline Literal lit(const std::string& text) {
  std::vector<ParseDiagnostic> ds;
  auto l = parse_literal(text, &ds);
  if (!l) throw std::runtime_error(diagnostics_text(ds));
  return *l;
}

inline Formula formula(const std::string& text) {
  std::vector<ParseDiagnostic> ds;
  auto f = parse_formula(text, &ds);
  if (!f) throw std::runtime_error(diagnostics_text(ds));
  return *f;
}

inline Proof proof_of(const std::string& text) {
  ProofParse p = parse_proof(text, "<test>");
  if (!p.ok()) throw std::runtime_error(diagnostics_text(p.diagnostics));
  return p.proof;
}

}  // namespace ndp::testkit
