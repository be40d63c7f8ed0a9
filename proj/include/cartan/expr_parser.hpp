#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cartan/expr.hpp"

namespace cartan {

/// Maps an identifier (with any trailing primes) to a symbol, or nullopt if
/// the identifier is not allowed in this context.
using SymbolResolver = std::function<std::optional<Symbol>(std::string_view)>;

/// Builtins (jet coordinates, a1..a15, f0..f4 with primes) plus the given
/// constant names.
SymbolResolver default_resolver(const std::set<std::string>& constants = {});

/// Grammar: sums and differences of products and quotients of powers; atoms
/// are decimal numbers, identifiers, and parenthesized subexpressions.
/// Exponents must reduce to rational constants. Errors carry the byte offset.
Expr parse_expr(std::string_view text, const SymbolResolver& resolve = default_resolver());

}  // namespace cartan
