#pragma once

#include <set>
#include <string>
#include <string_view>

#include "cartan/operator_problem.hpp"

namespace cartan {

/// Parses "coeff*D^k + ... + coeff" where coefficients are arithmetic in x,
/// the declared constants and rationals. Missing powers are zero and a
/// missing D^5 is implied. Errors: ParseError (with position) for bad syntax,
/// unknown identifiers or powers of D above 5; NotMonic when the D^5
/// coefficient is not 1.
OperatorSpec parse_operator(std::string_view text, const std::set<std::string>& constants = {});

/// Inverse of parse_operator: parse_operator(print_operator(op), op.constants)
/// reproduces op.
std::string print_operator(const OperatorSpec& op);

}  // namespace cartan
