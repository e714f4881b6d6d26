#include "ndprover/builtins.hpp"

#include <string>

namespace ndp {

bool is_builtin(std::string_view predicate) {
  return predicate == "geq" || predicate == "leq" || predicate == "eq";
}

bool eval_builtin(std::string_view predicate, std::span<const Term> args) {
  if (!is_builtin(predicate)) throw BuiltinError("unknown builtin " + std::string(predicate));
  if (args.size() != kBuiltinArity)
    throw BuiltinError(std::string(predicate) + " expects 2 arguments, got " +
                       std::to_string(args.size()));
  for (const Term& t : args) {
    if (!t.is_ground()) throw BuiltinError(std::string(predicate) + ": non-ground argument " + t.to_string());
    if (!t.is_integer())
      throw BuiltinError(std::string(predicate) + ": non-integer argument " + t.to_string());
  }
  const auto a = args[0].value(), b = args[1].value();
  if (predicate == "geq") return a >= b;
  if (predicate == "leq") return a <= b;
  return a == b;
}

}  // namespace ndp
