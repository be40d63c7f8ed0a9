#pragma once

#include <string>

#include <json.hpp>

#include "cartan/expr.hpp"

namespace cartan {

/// {"numerator": [terms], "denominator": [terms]}; each term is
/// {"coeff": "p/q", "factors": [{"symbol": name, "exp": "p/q"}]}.
nlohmann::json to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);

std::string to_latex(const Expr& e);
std::string to_latex(const Symbol& s);

}  // namespace cartan
