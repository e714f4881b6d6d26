#pragma once

#include <span>
#include <stdexcept>
#include <string_view>

#include "ndprover/term.hpp"

namespace ndp {

struct BuiltinError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// geq/leq/eq over integer constants. Builtins are evaluated, never matched.
bool is_builtin(std::string_view predicate);
constexpr std::size_t kBuiltinArity = 2;

// Throws BuiltinError on unknown predicate, wrong arity, or non-ground / non-integer arguments.
bool eval_builtin(std::string_view predicate, std::span<const Term> args);

}  // namespace ndp
