#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cartan/invariants.hpp"

namespace cartan {

/// The shipped worked example: D^5 + (q0 - lam*a^5) with constant potential.
struct WorkedExample {
  std::string operator_text;
  std::set<std::string> constants;
  NamedExprs direct;
  NamedExprs gauge;

  OperatorSpec op() const;
  const NamedExprs& golden(Variant v) const { return v == Variant::Direct ? direct : gauge; }
  static WorkedExample builtin();
};

struct GoldenCheck {
  std::string name;
  Expr engine;
  Expr golden;
  bool match = false;
};

struct ExampleReport {
  Variant variant = Variant::Direct;
  std::string operator_text;
  std::vector<GoldenCheck> checks;
  bool pass() const;
};

/// Runs the reduction for the example operator and compares each named
/// invariant with the golden value.
ExampleReport run_worked_example(Variant v);

nlohmann::json to_json(const ExampleReport& rep);
std::string to_text(const ExampleReport& rep);

}  // namespace cartan
