#include "cartan/serialize.hpp"

#include <cctype>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "cartan/error.hpp"
#include "cartan/expr_io.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/operator_text.hpp"

namespace cartan {

namespace {

using nlohmann::json;

ContextPtr context_for(const json& basis) {
  for (const auto& ctx : {BasisContext::coordinate(), BasisContext::abstract()})
    if (basis == json(ctx->labels())) return ctx;
  throw Error(ErrorCode::BasisMismatch, "unknown basis in form document");
}

int label_index(const ContextPtr& ctx, const std::string& label) {
  const int i = ctx->index_of(label);
  if (i < 0) throw Error(ErrorCode::BasisMismatch, "unknown covector label '" + label + "'");
  return i;
}

std::string operator_text(const OperatorSpec& op) { return op.is_generic() ? "generic" : print_operator(op); }

std::string param_name(int l) { return "a" + std::to_string(l); }

json param_list(const std::set<int>& s) {
  json out = json::array();
  for (int l : s) out.push_back(param_name(l));
  return out;
}

json torsion_json(const StructureEquations& se) {
  json out = json::object();
  for (int i = 1; i <= 7; ++i)
    for (const auto& [jk, c] : se.torsion[i - 1]) out[TorsionIndex{i, jk.first, jk.second}.str()] = c.str();
  return out;
}

json mc_json(const StructureEquations& se) {
  json out = json::array();
  for (int i = 1; i <= 7; ++i)
    for (const auto& t : se.mc[i - 1])
      out.push_back({{"equation", i}, {"alpha", t.l}, {"theta", t.j}, {"coeff", to_string(t.a)}});
  return out;
}

json named_json(const NamedExprs& list) {
  json out = json::array();
  for (const auto& [n, e] : list) out.push_back({{"name", n}, {"value", e.str()}});
  return out;
}

std::string theta_latex(int i) { return "\\theta^{" + std::to_string(i) + "}"; }

std::string name_latex(const std::string& n) {
  // I1 -> I_{1}, T^4_15 -> T^{4}_{15}
  if (n.rfind("T^", 0) == 0) {
    const auto us = n.find('_');
    return "T^{" + n.substr(2, us - 2) + "}_{" + n.substr(us + 1) + "}";
  }
  std::size_t k = 0;
  while (k < n.size() && !std::isdigit(static_cast<unsigned char>(n[k]))) ++k;
  if (k == n.size() || k == 0) return "\\mathrm{" + n + "}";
  return n.substr(0, k) + "_{" + n.substr(k) + "}";
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

}  // namespace

json to_json(const OneForm& w) {
  json terms = json::object();
  for (const auto& [k, c] : w.terms()) terms[w.context()->label(static_cast<std::size_t>(k))] = to_json(c);
  return {{"basis", w.context()->labels()}, {"terms", terms}};
}

json to_json(const TwoForm& w) {
  json terms = json::object();
  const auto& ctx = *w.context();
  for (const auto& [jk, c] : w.terms())
    terms[ctx.label(static_cast<std::size_t>(jk.first)) + "^" + ctx.label(static_cast<std::size_t>(jk.second))] =
        to_json(c);
  return {{"basis", ctx.labels()}, {"terms", terms}};
}

OneForm one_form_from_json(const json& j) {
  const ContextPtr ctx = context_for(j.at("basis"));
  OneForm w(ctx);
  for (const auto& [label, c] : j.at("terms").items()) w.add(label_index(ctx, label), expr_from_json(c));
  return w;
}

TwoForm two_form_from_json(const json& j) {
  const ContextPtr ctx = context_for(j.at("basis"));
  TwoForm w(ctx);
  for (const auto& [label, c] : j.at("terms").items()) {
    const auto caret = label.find('^');
    if (caret == std::string::npos) throw Error(ErrorCode::ParseError, "two-form label needs '^': " + label);
    w.add(label_index(ctx, label.substr(0, caret)), label_index(ctx, label.substr(caret + 1)), expr_from_json(c));
  }
  return w;
}

json to_json(const ReductionTrace& trace) {
  json doc;
  doc["kind"] = "trace";
  doc["variant"] = to_string(trace.variant);
  doc["operator"] = operator_text(trace.op);
  doc["free_counts"] = trace.free_counts();
  json loops = json::array();
  for (const auto& lr : trace.loops) {
    json l;
    l["index"] = lr.index;
    l["free_before"] = param_list(lr.free_before);
    l["maurer_cartan_terms"] = mc_json(lr.equations);
    l["torsion"] = torsion_json(lr.equations);
    json ess = json::array();
    for (const auto& e : lr.absorption.essential) {
      json comb = json::array();
      for (const auto& [t, w] : e.combination) comb.push_back({{"slot", t.str()}, {"weight", to_string(w)}});
      ess.push_back({{"combination", comb}, {"value", e.value.str()}});
    }
    l["essential"] = ess;
    json z = json::object();
    for (const auto& [lk, v] : lr.absorption.z)
      z["z^" + std::to_string(lk.first) + "_" + std::to_string(lk.second)] = v.str();
    l["absorption"] = z;
    json as = json::object();
    for (const auto& [p, v] : lr.assignments) as[param_name(p)] = v.str();
    l["assignments"] = as;
    l["free_after"] = lr.free_after;
    loops.push_back(l);
  }
  doc["loops"] = loops;
  if (trace.final) {
    json coframe = json::array();
    const auto ctx = BasisContext::coordinate();
    for (const auto& row : trace.final->coframe) {
      json terms = json::object();
      for (std::size_t k = 0; k < row.size(); ++k)
        if (!row[k].is_zero()) terms[ctx->label(k)] = row[k].str();
      coframe.push_back(terms);
    }
    doc["final"] = {{"coframe", coframe}, {"torsion", torsion_json(trace.final->equations)}};
  } else {
    doc["final"] = nullptr;
  }
  json disc = json::array();
  for (const auto& d : trace.discrepancies)
    disc.push_back({{"id", d.id}, {"where", d.where}, {"engine", d.engine}, {"reference", d.reference}, {"note", d.note}});
  doc["discrepancies"] = disc;
  return doc;
}

json to_json(const InvariantSet& inv, const std::string& op) {
  return {{"kind", "invariants"},
          {"variant", to_string(inv.variant)},
          {"operator", op},
          {"entries", named_json(inv.entries)},
          {"extras", named_json(inv.extras)},
          {"reference", named_json(inv.reference)}};
}

json to_json(const CompareReport& rep) {
  auto fp_json = [](const Fingerprint& fp, const std::string& op) {
    json stats = json::array();
    for (const auto& s : fp.stats)
      stats.push_back({{"name", s.name},
                       {"constant", s.constant},
                       {"mean", s.mean},
                       {"stddev", s.stddev},
                       {"x_dependent", s.x_dependent}});
    std::map<int, int> hist;
    for (int r : fp.sample_ranks) ++hist[r];
    json ranks = json::array();
    for (const auto& [r, c] : hist) ranks.push_back({{"rank", r}, {"samples", c}});
    json dep = json::array();
    for (const auto& [a, b, d] : fp.dependence) dep.push_back({{"first", a}, {"second", b}, {"dependent", d}});
    return json{{"operator", op}, {"invariants", stats}, {"rank", fp.rank}, {"rank_table", ranks},
                {"dependence", dep}, {"rejected_points", fp.rejected}};
  };
  json doc;
  doc["kind"] = "compare";
  doc["variant"] = to_string(rep.variant);
  doc["verdict"] = to_string(rep.verdict);
  doc["seed"] = rep.options.seed;
  doc["samples"] = rep.options.samples;
  doc["note"] = "NecessaryConditionsHold is not a proof of equivalence";
  if (rep.witness) {
    const auto& w = *rep.witness;
    json wj = {{"kind", w.kind}, {"invariant", w.invariant}, {"detail", w.detail}, {"first", w.first},
               {"second", w.second}};
    wj["point"] = w.point ? json(*w.point) : json(nullptr);
    doc["witness"] = wj;
  } else {
    doc["witness"] = nullptr;
  }
  doc["fingerprints"] = {fp_json(rep.first, rep.first_operator), fp_json(rep.second, rep.second_operator)};
  return doc;
}

json to_json(const ResidualReport& rep) {
  json eqs = json::array();
  for (const auto& e : rep.equations)
    eqs.push_back({{"equation", "dtheta^" + std::to_string(e.i)},
                   {"relative", e.relative},
                   {"absolute", e.absolute},
                   {"relative_coarse", e.relative_coarse},
                   {"absolute_coarse", e.absolute_coarse},
                   {"worst_scene", e.worst_scene},
                   {"pass", e.pass}});
  return {{"kind", "verify"},   {"variant", to_string(rep.variant)},
          {"operator", rep.operator_text}, {"tolerance", rep.tolerance},
          {"absolute_floor", rep.absolute_floor}, {"scenes", rep.scenes},
          {"equations", eqs},   {"pass", rep.all_pass()}};
}

json error_json(const Error& e) {
  return {{"kind", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

ReductionTrace trace_from_json(const json& doc, const std::set<std::string>& constants) {
  if (doc.value("kind", "") != "trace") throw Error(ErrorCode::ParseError, "not a trace document");
  ReductionTrace trace;
  try {
    trace.variant = parse_variant(doc.at("variant").get<std::string>());
    const std::string op = doc.at("operator").get<std::string>();
    trace.op = op == "generic" ? OperatorSpec::generic() : parse_operator(op, constants);
    const auto& fin = doc.at("final");
    if (fin.is_null()) return trace;
    const auto resolve = default_resolver(constants);
    const auto ctx = BasisContext::coordinate();
    FinalStructure fs;
    for (const auto& row : fin.at("coframe")) {
      std::vector<Expr> r(kJetCount);
      for (const auto& [label, v] : row.items()) {
        const int k = label_index(ctx, label);
        if (k >= kJetCount) throw Error(ErrorCode::BasisMismatch, "final coframe involves " + label);
        r[static_cast<std::size_t>(k)] = parse_expr(v.get<std::string>(), resolve);
      }
      fs.coframe.push_back(std::move(r));
    }
    if (fs.coframe.size() != 7) throw Error(ErrorCode::ParseError, "final coframe needs seven rows");
    for (const auto& [slot, v] : fin.at("torsion").items()) {
      int i = 0, j = 0, k = 0;
      if (std::sscanf(slot.c_str(), "T^%d_%1d%1d", &i, &j, &k) != 3 || i < 1 || i > 7 || j < 1 || k > 7 || j >= k)
        throw Error(ErrorCode::ParseError, "bad torsion slot " + slot);
      fs.equations.torsion[i - 1].emplace(std::pair{j, k}, parse_expr(v.get<std::string>(), resolve));
    }
    trace.final = std::move(fs);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed trace document: ") + e.what());
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Text

std::string to_text(const ReductionTrace& trace) {
  std::ostringstream os;
  os << "variant: " << to_string(trace.variant) << "\noperator: " << operator_text(trace.op) << "\nfree counts:";
  for (int c : trace.free_counts()) os << ' ' << c;
  os << '\n';
  for (const auto& lr : trace.loops) {
    os << "\nloop " << lr.index << " (" << lr.free_before.size() << " free)\n";
    os << "  essential torsion:\n";
    for (const auto& e : lr.absorption.essential) {
      os << "    ";
      for (std::size_t n = 0; n < e.combination.size(); ++n) {
        const auto& [t, w] = e.combination[n];
        if (n) os << " + ";
        if (w != 1) os << to_string(w) << "*";
        os << t.str();
      }
      os << " = " << e.value.str() << '\n';
    }
    os << "  assignments:\n";
    for (const auto& [p, v] : lr.assignments) os << "    " << param_name(p) << " = " << v.str() << '\n';
  }
  if (trace.final) {
    os << "\nfinal structure equations:\n";
    for (int i = 1; i <= 7; ++i) {
      os << "  dtheta^" << i << " =";
      const auto& t = trace.final->equations.torsion[i - 1];
      if (t.empty()) os << " 0";
      bool first = true;
      for (const auto& [jk, c] : t) {
        os << (first ? " " : " + ") << "(" << c.str() << ") theta^" << jk.first << "^theta^" << jk.second;
        first = false;
      }
      os << '\n';
    }
  }
  if (!trace.discrepancies.empty()) {
    os << "\ndiscrepancies with the reference:\n";
    for (const auto& d : trace.discrepancies) {
      os << "  " << d.id << " at " << d.where << "\n    engine:    " << d.engine << "\n    reference: " << d.reference
         << '\n';
      if (!d.note.empty()) os << "    note: " << d.note << '\n';
    }
  }
  return os.str();
}

std::string to_text(const InvariantSet& inv) {
  std::ostringstream os;
  os << "variant: " << to_string(inv.variant) << '\n';
  for (const auto& [n, e] : inv.entries) os << n << " = " << e.str() << '\n';
  for (const auto& [n, e] : inv.extras) os << n << " (unnamed) = " << e.str() << '\n';
  return os.str();
}

std::string to_text(const CompareReport& rep) {
  std::ostringstream os;
  os << "variant: " << to_string(rep.variant) << "\nfirst:  " << rep.first_operator
     << "\nsecond: " << rep.second_operator << "\nverdict: " << to_string(rep.verdict) << '\n';
  if (rep.witness) {
    const auto& w = *rep.witness;
    os << "witness: " << w.kind;
    if (!w.invariant.empty()) os << " on " << w.invariant;
    os << " (" << w.detail << "): " << w.first << " vs " << w.second << '\n';
  } else {
    os << "(necessary conditions only; not a proof of equivalence)\n";
  }
  os << "ranks: " << rep.first.rank << " / " << rep.second.rank << '\n';
  for (std::size_t i = 0; i < rep.first.stats.size(); ++i) {
    const auto& a = rep.first.stats[i];
    const auto& b = rep.second.stats[i];
    os << "  " << a.name << ": constant " << a.constant << "/" << b.constant << ", x-dependent " << a.x_dependent
       << "/" << b.x_dependent << '\n';
  }
  return os.str();
}

std::string to_text(const ResidualReport& rep) {
  std::ostringstream os;
  os << "variant: " << to_string(rep.variant) << "\noperator: " << rep.operator_text << "\nscenes: " << rep.scenes
     << ", tolerance " << rep.tolerance << " (absolute floor " << rep.absolute_floor << ")\n";
  for (const auto& e : rep.equations)
    os << "  dtheta^" << e.i << ": " << (e.pass ? "pass" : "FAIL") << "  relative " << fmt(e.relative) << " (coarse "
       << fmt(e.relative_coarse) << "), absolute " << fmt(e.absolute) << '\n';
  os << (rep.all_pass() ? "all equations pass\n" : "some equations fail\n");
  return os.str();
}

// ---------------------------------------------------------------------------
// LaTeX

std::string latex_structure_equations(const ReductionTrace& trace, const NormalizationPlan& plan) {
  if (!trace.final) throw Error(ErrorCode::IncompleteReduction, "reduction trace has no final structure");
  std::map<TorsionIndex, std::string> names;
  for (const auto& d : plan.final_display)
    if (!d.constant) names.emplace(d.slot, d.invariant);
  const InvariantSet inv = extract_invariants(trace, plan);
  for (const auto& [n, e] : inv.extras) {
    const auto us = n.find('_');
    const std::string jk = n.substr(us + 1);
    names.emplace(TorsionIndex{std::stoi(n.substr(2, us - 2)), jk[0] - '0', jk[1] - '0'}, n);
  }

  std::ostringstream os;
  os << "\\begin{align*}\n";
  for (int i = 1; i <= 7; ++i) {
    os << "d" << theta_latex(i) << " &= ";
    const auto& t = trace.final->equations.torsion[i - 1];
    if (t.empty()) os << "0";
    bool first = true;
    for (const auto& [jk, c] : t) {
      const TorsionIndex slot{i, jk.first, jk.second};
      std::string coeff;
      auto it = names.find(slot);
      if (it != names.end()) {
        coeff = name_latex(it->second) + "\\,";
      } else if (c == Expr(1)) {
        coeff = "";
      } else if (c == Expr(-1)) {
        coeff = "-";
      } else {
        coeff = to_latex(c) + "\\,";
      }
      if (!first) os << (coeff.rfind('-', 0) == 0 ? " " : " + ");
      os << coeff << theta_latex(jk.first) << "\\wedge" << theta_latex(jk.second);
      first = false;
    }
    os << (i < 7 ? ",\\\\\n" : ".\n");
  }
  os << "\\end{align*}\n";
  os << "where\n" << latex_invariants(inv);
  return os.str();
}

std::string latex_invariants(const InvariantSet& inv) {
  std::ostringstream os;
  os << "\\begin{align*}\n";
  const NamedExprs all = inv.all();
  for (std::size_t n = 0; n < all.size(); ++n) {
    os << name_latex(all[n].first) << " &= " << to_latex(all[n].second);
    os << (n + 1 < all.size() ? ",\\\\\n" : ".\n");
  }
  os << "\\end{align*}\n";
  return os.str();
}

std::string latex_document(const std::string& body) {
  return "\\documentclass{article}\n\\usepackage{amsmath}\n\\allowdisplaybreaks\n\\begin{document}\n" + body +
         "\\end{document}\n";
}

}  // namespace cartan
