#include "cartan/reduction.hpp"

#include <algorithm>
#include <set>

#include "cartan/embedded_data.hpp"
#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/linear_solve.hpp"

namespace cartan {

namespace {

[[noreturn]] void plan_mismatch(const std::string& what) { throw Error(ErrorCode::PlanMismatch, what); }

Rational exponent_rational(const Exponent& e) { return Rational(e.num(), e.den()); }

Exponent rational_exponent(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (!c.get_num().fits_slong_p() || !c.get_den().fits_slong_p()) throw Error(ErrorCode::Unsupported, "exponent too large");
  return Exponent(c.get_num().get_si(), c.get_den().get_si());
}

TorsionIndex parse_torsion_index(const std::string& s) {
  // T^i_jk
  if (s.size() != 6 || s[0] != 'T' || s[1] != '^' || s[3] != '_')
    throw Error(ErrorCode::ParseError, "bad torsion index '" + s + "' (expected T^i_jk)");
  TorsionIndex t{s[2] - '0', s[4] - '0', s[5] - '0'};
  auto ok = [](int v) { return v >= 1 && v <= 7; };
  if (!ok(t.i) || !ok(t.j) || !ok(t.k) || t.j >= t.k) throw Error(ErrorCode::ParseError, "bad torsion index '" + s + "'");
  return t;
}

Bindings specialization(const OperatorSpec& op) {
  if (op.is_generic()) return {};
  return op.coefficient_bindings(4);
}

Expr specialize_expr(const Expr& e, const Bindings& b) { return b.empty() ? e : e.substitute(b); }

std::set<int> params_in(const Expr& e) {
  std::set<int> out;
  for (const Symbol& s : e.symbols())
    if (s.kind() == Symbol::Kind::GroupParam) out.insert(s.index());
  return out;
}

}  // namespace

std::string TorsionIndex::str() const {
  return "T^" + std::to_string(i) + "_" + std::to_string(j) + std::to_string(k);
}

Expr StructureEquations::torsion_at(int i, int j, int k) const {
  const auto& m = torsion.at(i - 1);
  if (j == k) return Expr(0);
  const bool flip = j > k;
  auto it = m.find(flip ? std::make_pair(k, j) : std::make_pair(j, k));
  if (it == m.end()) return Expr(0);
  return flip ? -it->second : it->second;
}

std::size_t StructureEquations::torsion_count() const {
  std::size_t n = 0;
  for (const auto& m : torsion) n += m.size();
  return n;
}

// ---------------------------------------------------------------------------

StructureEquations structure_equations(const LiftedCoframe& lc, const std::map<int, OneForm>& alpha,
                                       const StructureOptions& opts) {
  const FrameChange frame(lc.theta, alpha);
  StructureEquations se;
  for (int i = 0; i < 7; ++i) {
    const TwoForm d = exterior_derivative(lc.theta[i]);
    const Decomposition dec = decompose_two_form(d, frame);
    if (!dec.alpha_alpha.empty())
      throw Error(ErrorCode::BasisMismatch, "dθ" + std::to_string(i + 1) + " has an α∧α component");
    for (const auto& [lj, c] : dec.alpha_theta) {
      auto q = c.as_rational();
      if (!q)
        throw Error(ErrorCode::BasisMismatch, "dθ" + std::to_string(i + 1) + ": non-constant coefficient " + c.str() +
                                                  " on α" + std::to_string(lj.first) + "∧θ" + std::to_string(lj.second));
      se.mc[i].push_back({lj.first, lj.second, *q});
    }
    se.torsion[i] = dec.theta_theta;
    if (opts.verify && !(recompose(dec, frame) == d))
      throw Error(ErrorCode::NumericFailure, "recomposition of dθ" + std::to_string(i + 1) + " failed");
  }
  return se;
}

// ---------------------------------------------------------------------------

std::optional<Expr> AbsorptionResult::essential_at(const TorsionIndex& t) const {
  for (const auto& e : essential)
    if (e.combination.size() == 1 && e.combination[0].first == t && e.combination[0].second == 1) return e.value;
  return std::nullopt;
}

AbsorptionResult absorb(const StructureEquations& se) {
  // Unknowns z^l_k for every α^l present.
  std::set<int> ls;
  for (const auto& terms : se.mc)
    for (const auto& t : terms) ls.insert(t.l);
  std::map<std::pair<int, int>, std::size_t> var;
  std::vector<std::pair<int, int>> var_key;
  for (int l : ls)
    for (int k = 1; k <= 7; ++k) {
      var.emplace(std::make_pair(l, k), var_key.size());
      var_key.emplace_back(l, k);
    }
  const std::size_t nv = var_key.size();

  struct Row {
    std::vector<Rational> a;
    Expr rhs;
    std::map<std::size_t, Rational> origin;
  };
  std::vector<Row> rows;
  std::vector<TorsionIndex> slots;
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 7; ++j) {
      for (int k = j + 1; k <= 7; ++k) {
        Row row{std::vector<Rational>(nv), -se.torsion_at(i, j, k), {}};
        bool any = false;
        for (const auto& t : se.mc[i - 1]) {
          if (t.j == k) {
            row.a[var.at({t.l, j})] += t.a;
            any = true;
          } else if (t.j == j) {
            row.a[var.at({t.l, k})] -= t.a;
            any = true;
          }
        }
        if (!any && row.rhs.is_zero()) continue;
        row.origin.emplace(slots.size(), Rational(1));
        slots.push_back({i, j, k});
        rows.push_back(std::move(row));
      }
    }
  }
  const std::vector<Row> original = rows;

  // Gauss-Jordan over the rationals, carrying the Expr right-hand sides.
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, var)
  std::size_t r = 0;
  for (std::size_t c = 0; c < nv && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p].a[c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const Rational inv = 1 / rows[r].a[c];
    for (auto& v : rows[r].a) v *= inv;
    rows[r].rhs = Expr(inv) * rows[r].rhs;
    for (auto& [o, w] : rows[r].origin) w *= inv;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q == r || rows[q].a[c] == 0) continue;
      const Rational f = rows[q].a[c];
      for (std::size_t j = 0; j < nv; ++j) rows[q].a[j] -= f * rows[r].a[j];
      rows[q].rhs -= Expr(f) * rows[r].rhs;
      for (const auto& [o, w] : rows[r].origin) {
        rows[q].origin[o] -= f * w;
        if (rows[q].origin[o] == 0) rows[q].origin.erase(o);
      }
    }
    pivots.emplace_back(r, c);
    ++r;
  }

  AbsorptionResult ar;
  for (const auto& [row, c] : pivots)
    if (!rows[row].rhs.is_zero()) ar.z.emplace(var_key[c], rows[row].rhs);
  for (std::size_t q = r; q < rows.size(); ++q) {
    if (rows[q].rhs.is_zero()) continue;
    EssentialTorsion e;
    // rhs = Σ w·(−T); report Σ (w/w0)·T = −rhs/w0 with the first weight normalized to 1.
    const Rational w0 = rows[q].origin.begin()->second;
    for (const auto& [o, w] : rows[q].origin) e.combination.emplace_back(slots[o], w / w0);
    e.value = -(Expr(Rational(1 / w0)) * rows[q].rhs);
    ar.essential.push_back(std::move(e));
  }
  std::sort(ar.essential.begin(), ar.essential.end(),
            [](const EssentialTorsion& a, const EssentialTorsion& b) { return a.combination < b.combination; });

  // Absorption check: with z substituted, only essential torsion survives.
  std::set<std::size_t> essential_rows;
  for (std::size_t q = r; q < rows.size(); ++q)
    for (const auto& [o, w] : rows[q].origin) essential_rows.insert(o);
  for (std::size_t o = 0; o < original.size(); ++o) {
    if (essential_rows.count(o)) continue;
    Expr residual = -original[o].rhs;  // T
    for (std::size_t j = 0; j < nv; ++j) {
      if (original[o].a[j] == 0) continue;
      auto it = ar.z.find(var_key[j]);
      if (it != ar.z.end()) residual += Expr(original[o].a[j]) * it->second;
    }
    if (!residual.is_zero())
      throw Error(ErrorCode::NumericFailure, "absorption check failed at " + slots[o].str());
  }
  return ar;
}

// ---------------------------------------------------------------------------

std::map<int, Expr> normalize(const AbsorptionResult& ar, const PlanLoop& loop, const std::set<int>& free) {
  struct Item {
    const PlanEntry* entry;
    Expr value;
  };
  std::vector<Item> items;
  std::set<int> designated;
  for (const auto& e : loop.entries) {
    if (!free.count(e.param)) plan_mismatch("a" + std::to_string(e.param) + " is not free at this loop");
    if (!designated.insert(e.param).second) plan_mismatch("a" + std::to_string(e.param) + " is solved twice in one loop");
    auto v = ar.essential_at(e.torsion);
    if (!v) plan_mismatch(e.torsion.str() + " is not an essential torsion component at this loop");
    items.push_back({&e, *v});
  }

  // Monomial subsystem: entries with nonzero target that are single
  // monomials in designated parameters only.
  std::vector<const Item*> mono;
  for (const auto& it : items)
    if (it.entry->target != 0 && it.value.is_monomial()) mono.push_back(&it);
  for (bool changed = true; changed;) {
    changed = false;
    std::set<int> pset;
    for (auto* m : mono) pset.insert(m->entry->param);
    for (auto m = mono.begin(); m != mono.end(); ++m) {
      const auto used = params_in((*m)->value);
      if (!std::includes(pset.begin(), pset.end(), used.begin(), used.end())) {
        mono.erase(m);
        changed = true;
        break;
      }
    }
  }

  std::map<int, Expr> solved;
  if (!mono.empty()) {
    const std::size_t n = mono.size();
    std::vector<int> params;
    for (auto* m : mono) params.push_back(m->entry->param);
    std::sort(params.begin(), params.end());
    // Non-parameter symbols appearing in the entries.
    std::set<Symbol> others;
    for (auto* m : mono)
      for (const Symbol& s : m->value.symbols())
        if (s.kind() != Symbol::Kind::GroupParam) others.insert(s);
    const std::vector<Symbol> other(others.begin(), others.end());
    // E (n×n) | F (n×|other|) | log-constant handled separately.
    RationalMatrix aug(n, std::vector<Rational>(n + other.size() + n));
    std::vector<Rational> ratio(n);
    for (std::size_t e = 0; e < n; ++e) {
      const auto [c, m] = *mono[e]->value.as_monomial();
      for (std::size_t p = 0; p < n; ++p) aug[e][p] = exponent_rational(m.exponent_of(Symbol::param(params[p])));
      for (std::size_t s = 0; s < other.size(); ++s) aug[e][n + s] = -exponent_rational(m.exponent_of(other[s]));
      aug[e][n + other.size() + e] = 1;
      ratio[e] = mono[e]->entry->target / c;
    }
    const auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] != n - 1)
      plan_mismatch("monomial normalization system is singular for the designated parameters");
    for (std::size_t p = 0; p < n; ++p) {
      // Row p now reads a_p-exponent row: a_p = κ_p Π other^{aug[p][n+s]}, κ_p = Π ratio_e^{Einv[p][e]}.
      Rational kappa = 1;
      for (std::size_t e = 0; e < n; ++e) {
        const Rational w = aug[p][n + other.size() + e];
        if (w == 0) continue;
        Rational part;
        if (!exact_rational_power(ratio[e], rational_exponent(w), part))
          plan_mismatch("normalization needs an irrational constant for a" + std::to_string(params[p]));
        kappa *= part;
      }
      std::vector<Factor> factors;
      for (std::size_t s = 0; s < other.size(); ++s) {
        const Rational x = aug[p][n + s];
        if (x != 0) factors.push_back({other[s], rational_exponent(x)});
      }
      solved.emplace(params[p], Expr::monomial(kappa, Monomial::from_factors(std::move(factors))));
    }
  }

  // Affine isolation, in plan order.
  for (const auto& it : items) {
    const int l = it.entry->param;
    if (solved.count(l)) continue;
    Bindings b;
    for (const auto& [k, v] : solved) b.emplace(Symbol::param(k), v);
    const Expr t = it.value.substitute(b);
    const Symbol a = Symbol::param(l);
    const Expr slope = t.partial(a);
    if (slope.is_zero() || !slope.partial(a).is_zero())
      plan_mismatch(it.entry->torsion.str() + " = " + t.str() + " is not affine in a" + std::to_string(l));
    const Expr offset = t.substitute({{a, Expr(0)}});
    const Expr value = (Expr(it.entry->target) - offset) / slope;
    if (!params_in(value).empty())
      plan_mismatch("solving " + it.entry->torsion.str() + " for a" + std::to_string(l) +
                    " leaves group parameters: " + value.str());
    solved.emplace(l, value);
  }

  // Every target is met.
  Bindings all;
  for (const auto& [k, v] : solved) all.emplace(Symbol::param(k), v);
  for (const auto& it : items) {
    const Expr got = it.value.substitute(all);
    if (!(got == Expr(it.entry->target)))
      plan_mismatch(it.entry->torsion.str() + " evaluates to " + got.str() + " after normalization, not " +
                    to_string(it.entry->target));
  }
  return solved;
}

// ---------------------------------------------------------------------------

std::vector<int> ReductionTrace::free_counts() const {
  std::vector<int> out;
  if (loops.empty()) {
    out.push_back(group.free_count());
    return out;
  }
  out.push_back(static_cast<int>(loops.front().free_before.size()));
  for (const auto& l : loops) out.push_back(l.free_after);
  return out;
}

ReductionTrace run_reduction(const OperatorSpec& op, Variant variant, const NormalizationPlan& plan,
                             const RunOptions& opts) {
  if (plan.variant != variant) plan_mismatch("plan is for the " + to_string(plan.variant) + " problem");
  ReductionTrace trace;
  trace.variant = variant;
  trace.op = op;
  trace.group = GroupState::full();
  const Bindings spec = specialization(op);
  const auto omega = base_coframe(op, variant);

  try {
    int index = 0;
    for (const auto& loop : plan.loops) {
      if (opts.max_loops && index >= opts.max_loops) return trace;
      ++index;
      LoopRecord rec;
      rec.index = index;
      rec.free_before = trace.group.free;
      const LiftedCoframe lc = lifted_coframe(omega, trace.group);
      rec.equations = structure_equations(lc, maurer_cartan(trace.group), opts.structure);
      rec.absorption = absorb(rec.equations);

      if (index == 1) {
        for (const auto& [slot, ref] : plan.expected_loop1) {
          const Expr want = specialize_expr(ref, spec);
          const auto got = rec.absorption.essential_at(slot);
          if (!got || !(*got == want))
            trace.discrepancies.push_back({"loop1:" + slot.str(), "loop 1 essential torsion " + slot.str(),
                                           got ? got->str() : "(not essential)", want.str(), ""});
        }
      }

      rec.assignments = normalize(rec.absorption, loop, trace.group.free);
      for (const auto& e : loop.entries) {
        if (!e.expected) continue;
        const Expr want = specialize_expr(*e.expected, spec);
        const Expr& got = rec.assignments.at(e.param);
        if (got == want) continue;
        const std::string id = "assignment:a" + std::to_string(e.param);
        if (opts.strict_expected)
          plan_mismatch("loop " + std::to_string(index) + ": a" + std::to_string(e.param) + " = " + got.str() +
                        ", expected " + want.str());
        auto known = plan.known_issues.find(id);
        trace.discrepancies.push_back({id, "loop " + std::to_string(index), got.str(), want.str(),
                                       known == plan.known_issues.end() ? "" : known->second});
      }
      trace.group = trace.group.with_stage(rec.assignments);
      rec.free_after = trace.group.free_count();
      trace.loops.push_back(std::move(rec));
    }
    if (trace.group.free_count() != 0)
      throw Error(ErrorCode::IncompleteReduction,
                  "plan leaves " + std::to_string(trace.group.free_count()) + " group parameters free");

    const LiftedCoframe lc = lifted_coframe(omega, trace.group);
    FinalStructure fin;
    fin.equations = structure_equations(lc, {}, opts.structure);
    fin.coframe = lc.matrix;
    trace.final = std::move(fin);
    auto more = compare_with_display(trace, plan);
    trace.discrepancies.insert(trace.discrepancies.end(), more.begin(), more.end());
  } catch (const Error& e) {
    throw ReductionError(e, trace);
  }
  return trace;
}

std::vector<Discrepancy> compare_with_display(const ReductionTrace& trace, const NormalizationPlan& plan) {
  std::vector<Discrepancy> out;
  if (!trace.final || plan.final_display.empty()) return out;
  const Bindings spec = specialization(trace.op);
  std::map<std::string, Expr> refs;
  for (const auto& [name, e] : plan.invariants) refs.emplace(name, specialize_expr(e, spec));
  std::map<TorsionIndex, const DisplayTerm*> display;
  for (const auto& t : plan.final_display) display.emplace(t.slot, &t);

  auto note_for = [&](const std::string& id) {
    auto it = plan.known_issues.find(id);
    return it == plan.known_issues.end() ? std::string() : it->second;
  };
  const auto& eq = trace.final->equations;
  std::set<TorsionIndex> slots;
  for (int i = 1; i <= 7; ++i)
    for (const auto& [jk, c] : eq.torsion[i - 1]) slots.insert({i, jk.first, jk.second});
  for (const auto& [slot, t] : display) slots.insert(slot);

  for (const auto& slot : slots) {
    const Expr got = eq.torsion_at(slot.i, slot.j, slot.k);
    auto it = display.find(slot);
    if (it == display.end()) {
      const std::string id = "extra:" + slot.str();
      out.push_back({id, slot.str(), got.str(), "0", note_for(id)});
      continue;
    }
    const DisplayTerm& d = *it->second;
    if (d.constant) {
      if (!(got == Expr(*d.constant))) {
        const std::string id = got.is_zero() ? "missing:" + slot.str() : "structure:" + slot.str();
        out.push_back({id, slot.str(), got.str(), to_string(*d.constant), note_for(id)});
      }
      continue;
    }
    auto ref = refs.find(d.invariant);
    if (ref == refs.end()) throw Error(ErrorCode::InvalidArgument, "display names unknown invariant " + d.invariant);
    if (!(got == ref->second)) {
      const std::string id = "invariant:" + d.invariant;
      out.push_back({id, slot.str() + " (" + d.invariant + ")", got.str(), ref->second.str(), note_for(id)});
    }
  }
  return out;
}

void validate_plan(const NormalizationPlan& plan) {
  RunOptions opts;
  opts.strict_expected = true;
  (void)run_reduction(OperatorSpec::generic(), plan.variant, plan, opts);
}

// ---------------------------------------------------------------------------
// Plan serialization

NormalizationPlan NormalizationPlan::from_json(const nlohmann::json& j) {
  NormalizationPlan plan;
  try {
    plan.variant = parse_variant(j.at("variant").get<std::string>());
    std::set<int> seen;
    for (const auto& jl : j.at("loops")) {
      PlanLoop loop;
      for (const auto& je : jl.at("entries")) {
        PlanEntry e;
        e.torsion = parse_torsion_index(je.at("torsion").get<std::string>());
        e.target = parse_rational(je.at("target").get<std::string>());
        const auto ps = je.at("param").get<std::string>();
        auto sym = Symbol::builtin(ps);
        if (!sym || sym->kind() != Symbol::Kind::GroupParam) throw Error(ErrorCode::ParseError, "bad parameter '" + ps + "'");
        e.param = sym->index();
        if (!seen.insert(e.param).second) throw Error(ErrorCode::PlanMismatch, "parameter " + ps + " is solved twice");
        if (je.contains("expected")) e.expected = parse_expr(je.at("expected").get<std::string>());
        loop.entries.push_back(std::move(e));
      }
      plan.loops.push_back(std::move(loop));
    }
    if (j.contains("loop1_torsion"))
      for (const auto& [k, v] : j.at("loop1_torsion").items())
        plan.expected_loop1.emplace(parse_torsion_index(k), parse_expr(v.get<std::string>()));
    if (j.contains("final")) {
      for (const auto& jt : j.at("final").at("terms")) {
        DisplayTerm t;
        t.slot = parse_torsion_index(jt.at("slot").get<std::string>());
        const auto c = jt.at("coeff").get<std::string>();
        if (!c.empty() && (std::isalpha(static_cast<unsigned char>(c[0]))))
          t.invariant = c;
        else
          t.constant = parse_rational(c);
        plan.final_display.push_back(std::move(t));
      }
      for (const auto& ji : j.at("final").at("invariants"))
        plan.invariants.emplace_back(ji.at("name").get<std::string>(), parse_expr(ji.at("value").get<std::string>()));
    }
    if (j.contains("known_issues"))
      for (const auto& [k, v] : j.at("known_issues").items()) plan.known_issues.emplace(k, v.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed plan: ") + e.what());
  }
  return plan;
}

nlohmann::json NormalizationPlan::to_json() const {
  nlohmann::json j;
  j["variant"] = to_string(variant);
  j["loops"] = nlohmann::json::array();
  for (const auto& loop : loops) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : loop.entries) {
      nlohmann::json je = {{"torsion", e.torsion.str()}, {"target", to_string(e.target)}, {"param", "a" + std::to_string(e.param)}};
      if (e.expected) je["expected"] = e.expected->str();
      entries.push_back(std::move(je));
    }
    j["loops"].push_back({{"entries", entries}});
  }
  if (!expected_loop1.empty()) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : expected_loop1) t[k.str()] = v.str();
    j["loop1_torsion"] = t;
  }
  if (!final_display.empty()) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : final_display)
      terms.push_back({{"slot", t.slot.str()}, {"coeff", t.constant ? to_string(*t.constant) : t.invariant}});
    nlohmann::json inv = nlohmann::json::array();
    for (const auto& [n, e] : invariants) inv.push_back({{"name", n}, {"value", e.str()}});
    j["final"] = {{"terms", terms}, {"invariants", inv}};
  }
  if (!known_issues.empty()) j["known_issues"] = known_issues;
  return j;
}

NormalizationPlan NormalizationPlan::builtin(Variant v) {
  const auto text = embedded_data(v == Variant::Direct ? "plans/direct.json" : "plans/gauge.json");
  return from_json(nlohmann::json::parse(text));
}

}  // namespace cartan
