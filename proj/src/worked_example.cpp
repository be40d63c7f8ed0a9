#include "cartan/worked_example.hpp"

#include <sstream>

#include "cartan/embedded_data.hpp"
#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/operator_text.hpp"

namespace cartan {

OperatorSpec WorkedExample::op() const { return parse_operator(operator_text, constants); }

WorkedExample WorkedExample::builtin() {
  WorkedExample ex;
  try {
    const auto j = nlohmann::json::parse(embedded_data("goldens/worked_example.json"));
    ex.operator_text = j.at("operator").get<std::string>();
    for (const auto& c : j.at("constants")) ex.constants.insert(c.get<std::string>());
    const auto resolve = default_resolver(ex.constants);
    for (const auto& [key, list] : {std::pair<const char*, NamedExprs*>{"direct", &ex.direct}, std::pair<const char*, NamedExprs*>{"gauge", &ex.gauge}}) {
      // Keep file order: I1..I6 / L1..L5 sort the same lexicographically.
      for (const auto& [name, v] : j.at(key).items()) list->emplace_back(name, parse_expr(v.get<std::string>(), resolve));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed golden file: ") + e.what());
  }
  return ex;
}

bool ExampleReport::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.match) return false;
  return true;
}

ExampleReport run_worked_example(Variant v) {
  const WorkedExample ex = WorkedExample::builtin();
  const OperatorSpec op = ex.op();
  const auto plan = NormalizationPlan::builtin(v);
  const InvariantSet inv = extract_invariants(run_reduction(op, v, plan), plan);
  ExampleReport rep;
  rep.variant = v;
  rep.operator_text = print_operator(op);
  for (const auto& [name, golden] : ex.golden(v)) {
    const Expr* got = inv.find(name);
    if (!got) throw Error(ErrorCode::IncompleteReduction, "engine produced no invariant named " + name);
    rep.checks.push_back({name, *got, golden, *got == golden});
  }
  return rep;
}

nlohmann::json to_json(const ExampleReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"engine", c.engine.str()}, {"golden", c.golden.str()}, {"match", c.match}});
  return {{"kind", "example"},
          {"variant", to_string(rep.variant)},
          {"operator", rep.operator_text},
          {"checks", checks},
          {"pass", rep.pass()}};
}

std::string to_text(const ExampleReport& rep) {
  std::ostringstream os;
  os << "variant: " << to_string(rep.variant) << "\noperator: " << rep.operator_text << '\n';
  for (const auto& c : rep.checks) {
    os << "  " << c.name << " = " << c.engine.str() << "  [" << (c.match ? "match" : "MISMATCH") << "]\n";
    if (!c.match) os << "      golden: " << c.golden.str() << '\n';
  }
  os << (rep.pass() ? "PASS" : "FAIL") << " against golden values\n";
  return os.str();
}

}  // namespace cartan
