#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ndp {

// Immutable first-order term. Copies share the underlying node.
class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Constant, Integer, Function };

  static Term variable(std::string name);
  static Term constant(std::string name);
  static Term integer(std::int64_t value);
  static Term function(std::string symbol, std::vector<Term> args);

  Kind kind() const { return node_->kind; }
  bool is_variable() const { return kind() == Kind::Variable; }
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_integer() const { return kind() == Kind::Integer; }
  bool is_function() const { return kind() == Kind::Function; }

  // Symbol name for variables, constants and functions; decimal text for integers.
  const std::string& name() const { return node_->name; }
  std::int64_t value() const { return node_->value; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t hash() const { return node_->hash; }

  bool is_ground() const { return node_->ground; }
  bool contains_variable(std::string_view var) const;
  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator<(const Term& a, const Term& b);  // structural total order

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::int64_t value = 0;
    std::vector<Term> args;
    std::size_t hash = 0;
    bool ground = true;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const Atom& a, const Atom& b) = default;
  friend bool operator<(const Atom& a, const Atom& b);
};

// A possibly negated atom. Negative literals only appear in fragment rules and facts.
struct Literal {
  bool positive = true;
  Atom atom;

  Literal negated() const { return {!positive, atom}; }
  bool is_ground() const { return atom.is_ground(); }
  std::size_t hash() const;
  std::string to_string() const;  // "~p(a)" for negatives

  friend bool operator==(const Literal& a, const Literal& b) = default;
  friend bool operator<(const Literal& a, const Literal& b);
};

// Collects variable names in first-occurrence order, without duplicates.
void collect_variables(const Term& t, std::vector<std::string>& out);
void collect_variables(const Atom& a, std::vector<std::string>& out);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};
struct AtomHash {
  std::size_t operator()(const Atom& a) const { return a.hash(); }
};
struct LiteralHash {
  std::size_t operator()(const Literal& l) const { return l.hash(); }
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace ndp
