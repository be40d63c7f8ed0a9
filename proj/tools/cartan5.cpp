// cartan5: drive the equivalence reductions from the command line.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cartan/error.hpp"
#include "cartan/invariants.hpp"
#include "cartan/operator_text.hpp"
#include "cartan/oracle.hpp"
#include "cartan/serialize.hpp"
#include "cartan/worked_example.hpp"

namespace {

using namespace cartan;

constexpr int kExitFailed = 1;  // verification or golden mismatch
constexpr int kExitError = 3;   // library error (record on stderr)

const char* kDefaultVerifyOperator = "x*D^4 + D^3 + x^2*D^2 + 3";

struct Options {
  std::string variant = "direct";
  std::string format = "text";
  std::uint64_t seed = 0;
  int samples = 0;  // 0: per-command default
  std::string out;
  std::string constants;
  std::vector<std::string> operators;
  std::string trace_path;
};

struct Constants {
  std::set<std::string> names;
  std::map<std::string, double> values;
};

// "q0=1.5,lam,a=2": names without a value are declared only.
Constants parse_constants(const std::string& text) {
  Constants c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string name = item.substr(0, eq);
    if (!Symbol::is_valid_constant_name(name))
      throw Error(ErrorCode::InvalidArgument, "invalid constant name '" + name + "'");
    c.names.insert(name);
    if (eq != std::string::npos) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
        c.values[name] = v;
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "bad value for constant '" + name + "'");
      }
    }
  }
  return c;
}

OperatorSpec operator_arg(const Options& o, std::size_t i, const Constants& c, const char* fallback) {
  const std::string text = i < o.operators.size() ? o.operators[i] : std::string(fallback);
  if (text == "generic") return OperatorSpec::generic();
  return parse_operator(text, c.names);
}

void emit(const Options& o, const std::string& doc) {
  if (o.out.empty()) {
    std::cout << doc;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + o.out);
  f << doc;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int cmd_derive(const Options& o) {
  const Constants c = parse_constants(o.constants);
  const OperatorSpec op = operator_arg(o, 0, c, "generic");
  const Variant v = parse_variant(o.variant);
  const auto plan = NormalizationPlan::builtin(v);
  const ReductionTrace trace = run_reduction(op, v, plan);
  if (o.format == "json")
    emit(o, dump(to_json(trace)));
  else if (o.format == "latex")
    emit(o, latex_document(latex_structure_equations(trace, plan)));
  else
    emit(o, to_text(trace));
  return 0;
}

int cmd_invariants(const Options& o) {
  const Constants c = parse_constants(o.constants);
  const OperatorSpec op = operator_arg(o, 0, c, "generic");
  const Variant v = parse_variant(o.variant);
  const auto plan = NormalizationPlan::builtin(v);
  const ReductionTrace trace = run_reduction(op, v, plan);
  const InvariantSet inv = extract_invariants(trace, plan);
  if (o.format == "json")
    emit(o, dump(to_json(inv, op.is_generic() ? "generic" : print_operator(op))));
  else if (o.format == "latex")
    emit(o, latex_document(latex_structure_equations(trace, plan)));
  else
    emit(o, to_text(inv));
  return 0;
}

int cmd_compare(const Options& o) {
  if (o.operators.size() != 2) throw Error(ErrorCode::InvalidArgument, "compare needs exactly two operators");
  const Constants c = parse_constants(o.constants);
  SampleOptions so;
  so.seed = o.seed;
  so.samples = o.samples > 0 ? o.samples : 64;
  so.constants = c.values;
  const auto rep = compare(operator_arg(o, 0, c, ""), operator_arg(o, 1, c, ""), parse_variant(o.variant), so);
  if (o.format == "json")
    emit(o, dump(to_json(rep)));
  else if (o.format == "latex")
    throw Error(ErrorCode::InvalidArgument, "compare has no LaTeX output");
  else
    emit(o, to_text(rep));
  return 0;
}

int cmd_verify(const Options& o) {
  const Constants c = parse_constants(o.constants);
  ReductionTrace trace;
  OperatorSpec scene_op;
  if (!o.trace_path.empty()) {
    std::ifstream f(o.trace_path);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + o.trace_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("trace file is not JSON: ") + e.what());
    }
    trace = trace_from_json(doc, c.names);
    // A generic trace is exercised with the default polynomial coefficients.
    scene_op = trace.op.is_generic() ? operator_arg(o, 0, c, kDefaultVerifyOperator) : trace.op;
  } else {
    const Variant v = parse_variant(o.variant);
    trace = run_reduction(OperatorSpec::generic(), v, NormalizationPlan::builtin(v));
    scene_op = operator_arg(o, 0, c, kDefaultVerifyOperator);
  }
  if (scene_op.is_generic()) throw Error(ErrorCode::InvalidArgument, "verify needs explicit coefficients");
  const auto scenes = make_scenes(scene_op, c.values, o.samples > 0 ? o.samples : 100, o.seed);
  ResidualReport rep = check_structure_equations(trace, scenes);
  rep.operator_text = print_operator(scene_op);
  if (o.format == "json")
    emit(o, dump(to_json(rep)));
  else if (o.format == "latex")
    throw Error(ErrorCode::InvalidArgument, "verify has no LaTeX output");
  else
    emit(o, to_text(rep));
  return rep.all_pass() ? 0 : kExitFailed;
}

int cmd_example(const Options& o, bool variant_given) {
  std::vector<Variant> vs = {Variant::Direct, Variant::Gauge};
  if (variant_given) vs = {parse_variant(o.variant)};
  std::vector<ExampleReport> reps;
  for (Variant v : vs) reps.push_back(run_worked_example(v));
  bool ok = true;
  for (const auto& r : reps) ok = ok && r.pass();
  if (o.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reps) arr.push_back(to_json(r));
    emit(o, dump({{"kind", "example_set"}, {"reports", arr}, {"pass", ok}}));
  } else if (o.format == "latex") {
    std::string body;
    for (Variant v : vs) {
      const auto plan = NormalizationPlan::builtin(v);
      body += latex_structure_equations(run_reduction(WorkedExample::builtin().op(), v, plan), plan);
    }
    emit(o, latex_document(body));
  } else {
    std::string text;
    for (const auto& r : reps) text += to_text(r);
    emit(o, text);
  }
  return ok ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence reductions for fifth-order linear operators"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool operators) {
    sub->add_option("--variant", o.variant, "direct or gauge")->check(CLI::IsMember({"direct", "gauge"}));
    sub->add_option("--format", o.format, "text, json or latex")->check(CLI::IsMember({"text", "json", "latex"}));
    sub->add_option("--seed", o.seed, "sampling seed");
    sub->add_option("--samples", o.samples, "sample or scene count")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "write the document here instead of stdout");
    sub->add_option("--constants", o.constants, "declared constants: name[=value],...");
    if (operators) sub->add_option("operator", o.operators, "operator text, e.g. \"D^5 + x*D + 1\", or generic");
  };
  auto* derive = app.add_subcommand("derive", "run the reduction and print the trace");
  common(derive, true);
  auto* invariants = app.add_subcommand("invariants", "fundamental invariants of the final structure");
  common(invariants, true);
  auto* cmp = app.add_subcommand("compare", "compare two operators by invariant fingerprints");
  common(cmp, true);
  auto* verify = app.add_subcommand("verify", "check the final structure equations numerically");
  common(verify, true);
  verify->add_option("--trace", o.trace_path, "trace document written by derive --format json");
  auto* example = app.add_subcommand("example", "run the worked example against golden values");
  common(example, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (derive->parsed()) return cmd_derive(o);
    if (invariants->parsed()) return cmd_invariants(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (verify->parsed()) return cmd_verify(o);
    if (example->parsed()) return cmd_example(o, example->count("--variant") > 0);
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << '\n';
    return kExitError;
  }
  return 0;
}
