#include "ndprover/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "ndprover/builtins.hpp"

namespace ndp {

std::string ParseDiagnostic::to_string() const {
  return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
         (is_error() ? "error: " : "warning: ") + message;
}

bool has_errors(const std::vector<ParseDiagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const ParseDiagnostic& d) { return d.is_error(); });
}

namespace {

// ---- lexer --------------------------------------------------------------

enum class Tok {
  Ident, Var, Int, LParen, RParen, LBracket, RBracket, Comma, Dot, Amp, Bar, Semi, Tilde,
  Arrow, Colon, Equals, End, Bad
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, column, offset;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Bad, "", line, col, i};
    std::size_t n = 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i + n < src.size() && ident_char(src[i + n])) ++n;
      t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
      t.kind = Tok::Int;
    } else if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
      n = 2;
      t.kind = Tok::Arrow;
    } else {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case ',': t.kind = Tok::Comma; break;
        case '.': t.kind = Tok::Dot; break;
        case '&': t.kind = Tok::Amp; break;
        case '|': t.kind = Tok::Bar; break;
        case ';': t.kind = Tok::Semi; break;
        case '~': t.kind = Tok::Tilde; break;
        case ':': t.kind = Tok::Colon; break;
        case '=': t.kind = Tok::Equals; break;
        default:
          // Take a whole UTF-8 sequence so the message shows the character.
          while (i + n < src.size() && (static_cast<unsigned char>(src[i + n]) & 0xC0) == 0x80) ++n;
          t.kind = Tok::Bad;
      }
    }
    t.text = std::string(src.substr(i, n));
    advance(n);
    out.push_back(std::move(t));
  }
  out.push_back({Tok::End, "", line, col, src.size()});
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Bad: return "unexpected character '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

struct SyntaxError {
  std::string message;
  SourceSpan span;
};

// ---- shared parser machinery --------------------------------------------

class ParserBase {
 public:
  ParserBase(std::string_view text, std::string file) : toks_(lex(text)), file_(std::move(file)) {}

 protected:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& take() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  SourceSpan span_of(const Token& t) const {
    return {file_, t.line, t.column, std::max<std::size_t>(t.text.size(), 1)};
  }
  SourceSpan span_from(const Token& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    std::size_t end = last.offset + last.text.size();
    return {file_, start.line, start.column, end > start.offset ? end - start.offset : 1};
  }
  [[noreturn]] void fail(const Token& t, std::string msg) const { throw SyntaxError{std::move(msg), span_of(t)}; }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return take();
  }

  void error(SourceSpan s, std::string msg) {
    diags_.push_back({ParseDiagnostic::Severity::Error, std::move(msg), std::move(s)});
  }
  void warning(SourceSpan s, std::string msg) {
    diags_.push_back({ParseDiagnostic::Severity::Warning, std::move(msg), std::move(s)});
  }

  std::int64_t integer(const Token& t) const {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t, "integer out of range: " + t.text);
    return v;
  }

  // Arity of each predicate and function symbol is fixed by its first use.
  void check_arity(std::map<std::string, std::size_t>& table, const char* kind, const Token& name,
                   std::size_t arity) {
    auto [it, fresh] = table.try_emplace(name.text, arity);
    if (!fresh && it->second != arity)
      fail(name, std::string(kind) + " " + name.text + " used with " + std::to_string(arity) +
                     " arguments, but earlier with " + std::to_string(it->second));
  }

  // Variables are uppercase-initial or bound by an enclosing quantifier.
  Term term(const std::set<std::string>* bound = nullptr) {
    const Token& t = peek();
    if (at(Tok::Var)) return Term::variable(take().text);
    if (at(Tok::Int)) return Term::integer(integer(take()));
    if (!at(Tok::Ident)) fail(t, "expected a term, found " + describe(t));
    const Token& name = take();
    if (!opens_arguments(name)) {
      if (bound && bound->count(name.text)) return Term::variable(name.text);
      return Term::constant(name.text);
    }
    std::vector<Term> args = arguments(bound);
    check_arity(functions_, "function", name, args.size());
    return Term::function(name.text, std::move(args));
  }

  // "p(a)" applies p; "p (a)" is p followed by a parenthesised formula.
  bool opens_arguments(const Token& name) const {
    return at(Tok::LParen) && peek().offset == name.offset + name.text.size();
  }

  std::vector<Term> arguments(const std::set<std::string>* bound = nullptr) {
    expect(Tok::LParen, "'('");
    std::vector<Term> args;
    do args.push_back(term(bound));
    while (accept(Tok::Comma));
    expect(Tok::RParen, "')' or ','");
    return args;
  }

  Atom atom(const Token& name, const std::set<std::string>* bound = nullptr) {
    Atom a{name.text, {}};
    if (opens_arguments(name)) a.args = arguments(bound);
    check_arity(predicates_, "predicate", name, a.args.size());
    return a;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string file_;
  std::vector<ParseDiagnostic> diags_;
  std::map<std::string, std::size_t> predicates_{{"geq", kBuiltinArity}, {"leq", kBuiltinArity},
                                                 {"eq", kBuiltinArity}};
  std::map<std::string, std::size_t> functions_;
};

// ---- knowledge bases ----------------------------------------------------

struct Spanned {
  Literal literal;
  SourceSpan span;
};

class KbParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  KbParse run() {
    KbParse out;
    while (!at(Tok::End)) {
      const std::size_t before = diags_.size();
      try {
        statement(out.kb);
      } catch (const SyntaxError& e) {
        error(e.span, e.message);
        recover();
      }
      (void)before;
    }
    out.diagnostics = std::move(diags_);
    return out;
  }

  std::optional<Literal> single() {
    try {
      Spanned l = literal();
      accept(Tok::Dot);
      if (!at(Tok::End)) fail(peek(), "unexpected " + describe(peek()) + " after the literal");
      return l.literal;
    } catch (const SyntaxError& e) {
      error(e.span, e.message);
      return std::nullopt;
    }
  }

  std::vector<ParseDiagnostic>& diagnostics() { return diags_; }

 private:
  void recover() {
    while (!at(Tok::End) && !at(Tok::Dot)) take();
    accept(Tok::Dot);
  }

  Spanned literal() {
    const Token& start = peek();
    bool positive = !accept(Tok::Tilde);
    if (at(Tok::Var)) fail(peek(), "predicate names start with a lowercase letter: " + peek().text);
    if (!at(Tok::Ident)) fail(peek(), "expected a literal, found " + describe(peek()));
    const Token& name = take();
    Atom a = atom(name);
    return {Literal{positive, std::move(a)}, span_from(start)};
  }

  std::vector<Spanned> literal_list(Tok sep) {
    std::vector<Spanned> out{literal()};
    while (accept(sep)) out.push_back(literal());
    return out;
  }

  void statement(KnowledgeBase& kb) {
    const Token& start = peek();
    std::vector<Spanned> head{literal()};
    std::optional<Tok> sep;
    while (at(Tok::Amp) || at(Tok::Bar)) {
      const Token& s = take();
      if (sep && *sep != s.kind) fail(s, "a head or fact mixes '&' and '|'");
      sep = s.kind;
      head.push_back(literal());
    }
    if (accept(Tok::Arrow)) {
      DnfBody body;
      std::vector<std::vector<Spanned>> spans;
      do {
        spans.push_back(literal_list(Tok::Amp));
        Conjunct c;
        for (const Spanned& s : spans.back()) c.push_back(s.literal);
        body.push_back(std::move(c));
      } while (accept(Tok::Semi));
      expect(Tok::Dot, "'.' at the end of the rule");
      add_rule(kb, head, sep == Tok::Bar ? HeadKind::Disjunctive : HeadKind::Conjunctive, body, spans,
               span_from(start));
      return;
    }
    if (sep == Tok::Amp) fail(start, "a fact cannot be a conjunction; state each literal separately");
    expect(Tok::Dot, "'.', '<-', '&' or '|'");
    add_fact(kb, head, span_from(start));
  }

  bool builtin_ok(const Spanned& s, bool in_head) {
    const Literal& l = s.literal;
    if (!is_builtin(l.atom.predicate)) return true;
    if (in_head) {
      error(s.span, "builtin " + l.atom.predicate + " cannot be asserted");
      return false;
    }
    if (!l.positive) {
      error(s.span, "builtin " + l.atom.predicate + " cannot be negated");
      return false;
    }
    for (const Term& t : l.atom.args)
      if (!t.is_integer() && !t.is_variable()) {
        error(s.span, "ill-formed builtin " + l.to_string() + ": " + t.to_string() +
                          " is not an integer or variable");
        return false;
      }
    return true;
  }

  void add_fact(KnowledgeBase& kb, const std::vector<Spanned>& lits, const SourceSpan& span) {
    bool ok = true;
    for (const Spanned& s : lits) {
      ok = builtin_ok(s, true) && ok;
      if (!s.literal.is_ground()) {
        std::vector<std::string> vars;
        collect_variables(s.literal.atom, vars);
        error(s.span, "fact is not ground: variable " + vars.front());
        ok = false;
      }
    }
    if (!ok) return;
    if (lits.size() == 1) {
      kb.add_fact(lits[0].literal);
      return;
    }
    DisjunctiveFact d;
    for (const Spanned& s : lits) {
      if (std::find(d.alternatives.begin(), d.alternatives.end(), s.literal) != d.alternatives.end()) {
        error(s.span, "repeated alternative " + s.literal.to_string());
        return;
      }
      d.alternatives.push_back(s.literal);
    }
    d.span = span;
    if (std::find(kb.disjunctive_facts.begin(), kb.disjunctive_facts.end(), d) == kb.disjunctive_facts.end())
      kb.disjunctive_facts.push_back(std::move(d));
  }

  void add_rule(KnowledgeBase& kb, const std::vector<Spanned>& head, HeadKind kind, DnfBody body,
                const std::vector<std::vector<Spanned>>& spans, const SourceSpan& span) {
    bool ok = true;
    std::vector<Literal> h;
    for (const Spanned& s : head) {
      ok = builtin_ok(s, true) && ok;
      h.push_back(s.literal);
    }
    for (const auto& conj : spans) {
      std::set<std::string> positive;
      for (const Spanned& s : conj) {
        ok = builtin_ok(s, false) && ok;
        if (s.literal.positive && !is_builtin(s.literal.atom.predicate)) {
          std::vector<std::string> vs;
          collect_variables(s.literal.atom, vs);
          positive.insert(vs.begin(), vs.end());
        }
      }
      std::set<std::string> nonbuiltin = positive;
      for (const Spanned& s : conj)
        if (!is_builtin(s.literal.atom.predicate)) {
          std::vector<std::string> vs;
          collect_variables(s.literal.atom, vs);
          nonbuiltin.insert(vs.begin(), vs.end());
        }
      for (const Spanned& s : conj) {
        if (!is_builtin(s.literal.atom.predicate)) continue;
        for (const Term& t : s.literal.atom.args)
          if (t.is_variable() && !nonbuiltin.count(t.name())) {
            error(s.span, "builtin variable " + t.name() + " is not bound by a body literal");
            ok = false;
          }
      }
      for (const Spanned& s : head) {
        std::vector<std::string> vs;
        collect_variables(s.literal.atom, vs);
        for (const std::string& v : vs)
          if (!positive.count(v)) {
            error(s.span, "head variable " + v + " does not occur in a positive body literal of every disjunct");
            ok = false;
            break;
          }
      }
    }
    if (!ok) return;
    Rule r = Rule::make(std::move(h), kind, std::move(body), span);
    if (!r.existentials.empty()) {
      std::string vars;
      for (const std::string& e : r.existentials) vars += (vars.empty() ? "" : ", ") + e;
      warning(span, "unsafe: query fragment, body-only variables {" + vars + "}");
    }
    kb.rules.push_back(std::move(r));
  }
};

// ---- proofs -------------------------------------------------------------

class ProofParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  ProofParse run() {
    ProofParse out;
    bool have_goal = false;
    std::vector<std::vector<std::pair<std::size_t, Token>>> refs;
    while (!at(Tok::End)) {
      try {
        const Token& kw = peek();
        if (kw.kind == Tok::Ident && kw.text == "goal") {
          take();
          expect(Tok::Colon, "':' after 'goal'");
          if (have_goal) fail(kw, "second goal line");
          out.proof.goal = sequent();
          have_goal = true;
        } else if (kw.kind == Tok::Ident && kw.text == "step") {
          take();
          const Token& num = expect(Tok::Int, "a step number");
          if (integer(num) != static_cast<std::int64_t>(out.proof.steps.size() + 1))
            fail(num, "step numbers must run 1, 2, 3, ...; expected " +
                          std::to_string(out.proof.steps.size() + 1));
          expect(Tok::Colon, "':' after the step number");
          ProofStep step;
          const Token& tag = take();
          auto rule = parse_tag(tag.text);
          if (!rule || (tag.kind != Tok::Var && tag.kind != Tok::Ident))
            fail(tag, "unknown rule tag " + describe(tag));
          step.rule = *rule;
          keyword("from");
          expect(Tok::LBracket, "'['");
          std::vector<std::pair<std::size_t, Token>> ids;
          if (!at(Tok::RBracket)) {
            do {
              const Token& id = expect(Tok::Int, "a step reference");
              ids.emplace_back(static_cast<std::size_t>(std::max<std::int64_t>(integer(id), 0)), id);
            } while (accept(Tok::Comma));
          }
          expect(Tok::RBracket, "']'");
          keyword("gives");
          step.output = sequent();
          if (accept(Tok::LBracket)) {
            keyword("witness");
            expect(Tok::Colon, "':' after 'witness'");
            do witness_item(step.witness);
            while (accept(Tok::Semi));
            expect(Tok::RBracket, "']' closing the witness");
          }
          out.proof.steps.push_back(std::move(step));
          refs.push_back(std::move(ids));
        } else {
          fail(kw, "expected 'goal' or 'step', found " + describe(kw));
        }
      } catch (const SyntaxError& e) {
        error(e.span, e.message);
        recover();
      }
    }
    if (!have_goal) error({file_, 1, 1, 1}, "missing goal line");
    const std::size_t n = out.proof.steps.size();
    for (std::size_t i = 0; i < refs.size() && i < n; ++i)
      for (const auto& [id, tok] : refs[i]) {
        if (id == 0 || id > n)
          error(span_of(tok), "unresolved reference to step " + tok.text + " (the proof has " +
                                  std::to_string(n) + " steps)");
        else
          out.proof.steps[i].inputs.push_back(id - 1);
      }
    out.diagnostics = std::move(diags_);
    return out;
  }

  std::optional<Formula> single() {
    try {
      Formula f = formula({});
      if (!at(Tok::End)) fail(peek(), "unexpected " + describe(peek()) + " after the formula");
      return f;
    } catch (const SyntaxError& e) {
      error(e.span, e.message);
      return std::nullopt;
    }
  }

  std::vector<ParseDiagnostic>& diagnostics() { return diags_; }

 private:
  // Skips to the next line that starts with 'step' or 'goal'.
  void recover() {
    const std::size_t line = peek().line;
    take();
    while (!at(Tok::End)) {
      const Token& t = peek();
      if (t.line != line && t.kind == Tok::Ident && (t.text == "step" || t.text == "goal")) return;
      take();
    }
  }

  void keyword(const char* word) {
    if (!(at(Tok::Ident) && peek().text == word))
      fail(peek(), std::string("expected '") + word + "', found " + describe(peek()));
    take();
  }

  Formula formula(const std::set<std::string>& bound) {
    if (accept(Tok::LParen)) {
      const Token& op = take();
      Formula f = Formula::bottom();
      if (op.text == "and" || op.text == "or" || op.text == "imp") {
        Formula l = formula(bound);
        Formula r = formula(bound);
        f = op.text == "and" ? Formula::conj(l, r) : op.text == "or" ? Formula::disj(l, r)
                                                                      : Formula::implies(l, r);
      } else if (op.text == "forall" || op.text == "exists") {
        if (!at(Tok::Var) && !at(Tok::Ident)) fail(peek(), "expected a variable after " + op.text);
        std::string var = take().text;
        std::set<std::string> inner = bound;
        inner.insert(var);
        Formula body = formula(inner);
        f = op.text == "forall" ? Formula::forall(var, body) : Formula::exists(var, body);
      } else {
        fail(op, "expected and, or, imp, forall or exists, found " + describe(op));
      }
      expect(Tok::RParen, "')' closing the formula");
      return f;
    }
    if (!at(Tok::Ident)) fail(peek(), "expected a formula, found " + describe(peek()));
    const Token& name = take();
    if (name.text == "bot" && !at(Tok::LParen)) return Formula::bottom();
    return Formula::atomic(atom(name, &bound));
  }

  FormulaSet formula_list(std::initializer_list<Tok> stop) {
    FormulaSet out;
    auto stopped = [&] { return std::any_of(stop.begin(), stop.end(), [&](Tok k) { return at(k); }); };
    if (stopped()) return out;
    do out.insert(formula({}));
    while (accept(Tok::Comma));
    return out;
  }

  Sequent sequent() {
    expect(Tok::LParen, "'(' opening a sequent");
    Sequent s;
    s.assumptions = formula_list({Tok::Semi});
    expect(Tok::Semi, "';' between assumptions and conclusions");
    s.conclusions = formula_list({Tok::RParen});
    expect(Tok::RParen, "')' closing the sequent");
    return s;
  }

  void witness_item(Witness& w) {
    const Token& key = take();
    expect(Tok::Equals, "'=' in the witness");
    if (key.text == "term" || key.text == "fresh") {
      w.term = term();
    } else if (key.text == "principal") {
      w.principal = formula({});
    } else if (key.text == "conclusion") {
      w.conclusion = formula({});
    } else {
      fail(key, "unknown witness key " + describe(key));
    }
  }
};

std::string join_formulas(const FormulaSet& s) {
  std::string out;
  for (const auto& [k, f] : s) {
    if (!out.empty()) out += ", ";
    out += f.to_string();
  }
  return out;
}

void trace(const CaseTree& t, const std::string& indent, std::string& out) {
  if (t.kind == CaseTree::Kind::Leaf) {
    out += indent + (t.holds ? "holds: " : t.contradiction ? "contradiction: " : "fails: ") + t.detail + "\n";
    return;
  }
  std::string alts;
  for (const Literal& l : t.alternatives) alts += (alts.empty() ? "" : " | ") + l.to_string();
  out += indent + "split " + alts + " [" + t.origin + "]\n";
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    out += indent + "  case " + t.alternatives[i].to_string() + ":\n";
    trace(t.children[i], indent + "    ", out);
  }
  if (t.children.size() < t.alternatives.size()) out += indent + "  ... truncated\n";
}

}  // namespace

KbParse parse_kb(std::string_view text, const std::string& file) { return KbParser(text, file).run(); }

ProofParse parse_proof(std::string_view text, const std::string& file) {
  return ProofParser(text, file).run();
}

std::optional<Literal> parse_literal(std::string_view text, std::vector<ParseDiagnostic>* diagnostics) {
  KbParser p(text, "<goal>");
  auto l = p.single();
  if (diagnostics) *diagnostics = p.diagnostics();
  return l;
}

std::optional<Formula> parse_formula(std::string_view text, std::vector<ParseDiagnostic>* diagnostics) {
  ProofParser p(text, "<formula>");
  auto f = p.single();
  if (diagnostics) *diagnostics = p.diagnostics();
  return f;
}

std::string serialize(const KnowledgeBase& kb) {
  std::vector<std::string> facts, rules;
  for (const Literal& l : kb.facts) facts.push_back(l.to_string() + ".");
  for (const DisjunctiveFact& d : kb.disjunctive_facts) facts.push_back(d.to_string() + ".");
  for (const Rule& r : kb.rules) rules.push_back(r.to_string() + ".");
  std::sort(facts.begin(), facts.end());
  std::sort(rules.begin(), rules.end());
  std::string out;
  for (const std::string& s : facts) out += s + "\n";
  for (const std::string& s : rules) out += s + "\n";
  return out;
}

std::string serialize(const Sequent& s) {
  return "(" + join_formulas(s.assumptions) + " ; " + join_formulas(s.conclusions) + ")";
}

std::string serialize(const Proof& p) {
  std::string out = "goal: " + serialize(p.goal) + "\n";
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const ProofStep& s = p.steps[i];
    out += "step " + std::to_string(i + 1) + ": " + std::string(tag_name(s.rule)) + " from [";
    for (std::size_t k = 0; k < s.inputs.size(); ++k)
      out += (k ? ", " : "") + std::to_string(s.inputs[k] + 1);
    out += "] gives " + serialize(s.output);
    if (!s.witness.empty()) {
      std::vector<std::string> items;
      if (s.witness.term) items.push_back("term=" + s.witness.term->to_string());
      if (s.witness.principal) items.push_back("principal=" + s.witness.principal->to_string());
      if (s.witness.conclusion) items.push_back("conclusion=" + s.witness.conclusion->to_string());
      out += " [witness: ";
      for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "; " : "") + items[k];
      out += "]";
    }
    out += "\n";
  }
  return out;
}

std::string serialize(const CaseTree& t) {
  std::string out;
  trace(t, "", out);
  return out;
}

}  // namespace ndp
