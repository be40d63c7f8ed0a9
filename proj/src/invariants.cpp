#include "cartan/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SVD>

#include "cartan/error.hpp"
#include "cartan/operator_text.hpp"

namespace cartan {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kValueTol = 1e-9;
constexpr int kSweepBases = 4;
constexpr int kSweepPoints = 16;

int max_coeff_order(const NamedExprs& list) {
  int m = 0;
  for (const auto& [name, e] : list)
    for (const auto& s : e.symbols())
      if (s.is(Symbol::Kind::CoeffFn)) m = std::max(m, s.order());
  return m;
}

NamedExprs substitute_all(const NamedExprs& list, const Bindings& b) {
  NamedExprs out;
  for (const auto& [name, e] : list) out.emplace_back(name, e.substitute(b));
  return out;
}

int numeric_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = kRankTol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

bool differ(double a, double b) { return std::abs(a - b) > kValueTol * (1 + std::max(std::abs(a), std::abs(b))); }

// Values of every invariant at a point, or nullopt at a pole.
std::optional<std::vector<double>> try_values(const NamedExprs& inv, const NumericEnv& env) {
  std::vector<double> v;
  try {
    for (const auto& [name, e] : inv) {
      const double y = e.evaluate(env);
      if (!std::isfinite(y)) return std::nullopt;
      v.push_back(y);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PoleAtPoint) return std::nullopt;
    throw;
  }
  return v;
}

}  // namespace

const Expr* InvariantSet::find(const std::string& name) const {
  for (const auto* list : {&entries, &extras})
    for (const auto& [n, e] : *list)
      if (n == name) return &e;
  return nullptr;
}

NamedExprs InvariantSet::all() const {
  NamedExprs out = entries;
  out.insert(out.end(), extras.begin(), extras.end());
  return out;
}

InvariantSet extract_invariants(const ReductionTrace& trace, const NormalizationPlan& plan) {
  if (!trace.complete()) throw Error(ErrorCode::IncompleteReduction, "reduction trace has no final structure");
  const auto& eq = trace.final->equations;
  InvariantSet inv;
  inv.variant = trace.variant;

  std::map<std::string, TorsionIndex> first_slot;
  std::set<TorsionIndex> displayed;
  for (const auto& d : plan.final_display) {
    displayed.insert(d.slot);
    if (!d.constant) first_slot.emplace(d.invariant, d.slot);
  }
  for (const auto& [name, ref] : plan.invariants) {
    auto it = first_slot.find(name);
    if (it == first_slot.end()) continue;
    const auto& s = it->second;
    inv.entries.emplace_back(name, eq.torsion_at(s.i, s.j, s.k));
    inv.reference.emplace_back(name, ref);
  }
  for (int i = 1; i <= 7; ++i)
    for (const auto& [jk, c] : eq.torsion[i - 1]) {
      const TorsionIndex t{i, jk.first, jk.second};
      if (!displayed.count(t) && !c.is_constant()) inv.extras.emplace_back(t.str(), c);
    }
  if (!trace.op.is_generic()) {
    const Bindings b = trace.op.coefficient_bindings(max_coeff_order(inv.reference));
    inv.reference = substitute_all(inv.reference, b);
  }
  return inv;
}

InvariantSet extract_invariants(const ReductionTrace& trace) {
  return extract_invariants(trace, NormalizationPlan::builtin(trace.variant));
}

InvariantSet specialize(const InvariantSet& inv, const OperatorSpec& op) {
  if (op.is_generic()) return inv;
  InvariantSet out = inv;
  const int order = std::max({max_coeff_order(inv.entries), max_coeff_order(inv.extras), max_coeff_order(inv.reference)});
  const Bindings b = op.coefficient_bindings(order);
  out.entries = substitute_all(inv.entries, b);
  out.extras = substitute_all(inv.extras, b);
  out.reference = substitute_all(inv.reference, b);
  return out;
}

InvariantSet generic_invariants(Variant v) {
  const auto plan = NormalizationPlan::builtin(v);
  return extract_invariants(run_reduction(OperatorSpec::generic(), v, plan), plan);
}

// ---------------------------------------------------------------------------
// Sampling

JetSampler::JetSampler(std::uint64_t seed) : gen_(seed) {}

double JetSampler::uniform(double lo, double hi) {
  // 53 random bits; independent of the standard library's distributions so
  // the stream is the same everywhere.
  const double unit = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

JetPoint JetSampler::next() {
  JetPoint pt{};
  pt[0] = uniform(-1, 1);
  pt[1] = uniform(0.5, 2);
  for (int k = 2; k < kJetCount; ++k) pt[k] = uniform(-2, 2);
  return pt;
}

NumericEnv numeric_env(const JetPoint& pt, const std::map<std::string, double>& constants) {
  NumericEnv env;
  for (int k = 0; k < kJetCount; ++k) env.jet[k] = pt[k];
  for (const auto& [name, v] : constants) env.constants.emplace(Symbol::constant(name), v);
  return env;
}

bool is_constant_sample(const std::vector<double>& values, double* mean, double* stddev) {
  double m = 0, sd = 0;
  if (!values.empty()) {
    for (double v : values) m += v;
    m /= static_cast<double>(values.size());
    if (values.size() > 1) {
      for (double v : values) sd += (v - m) * (v - m);
      sd = std::sqrt(sd / static_cast<double>(values.size() - 1));
    }
  }
  if (mean) *mean = m;
  if (stddev) *stddev = sd;
  return sd < 1e-9 * (1 + std::abs(m));
}

Fingerprint fingerprint_at(const NamedExprs& inv, const std::vector<JetPoint>& points,
                           const std::map<std::string, double>& constants) {
  Fingerprint fp;
  fp.points = points;
  const std::size_t n = inv.size();
  std::vector<std::array<Expr, kJetCount>> grad(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < kJetCount; ++k) grad[i][k] = inv[i].second.partial(Symbol::jet(static_cast<Jet>(k)));

  fp.values.assign(n, {});
  std::vector<Eigen::MatrixXd> jac;
  for (const auto& pt : points) {
    const NumericEnv env = numeric_env(pt, constants);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), kJetCount);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = inv[i].second.evaluate(env);
      if (!std::isfinite(v)) throw Error(ErrorCode::NumericFailure, "non-finite value of " + inv[i].first);
      fp.values[i].push_back(v);
      for (int k = 0; k < kJetCount; ++k) m(static_cast<Eigen::Index>(i), k) = grad[i][k].evaluate(env);
    }
    fp.sample_ranks.push_back(numeric_rank(m));
    jac.push_back(std::move(m));
  }
  fp.rank = fp.sample_ranks.empty() ? 0 : *std::max_element(fp.sample_ranks.begin(), fp.sample_ranks.end());

  for (std::size_t i = 0; i < n; ++i) {
    InvariantStats st;
    st.name = inv[i].first;
    st.constant = is_constant_sample(fp.values[i], &st.mean, &st.stddev);
    // Sweep x at a few fixed fiber points.
    for (std::size_t b = 0; b < points.size() && b < kSweepBases && !st.x_dependent; ++b) {
      std::vector<double> sweep;
      for (int j = 0; j < kSweepPoints; ++j) {
        JetPoint pt = points[b];
        pt[0] = -1.0 + 2.0 * j / (kSweepPoints - 1);
        try {
          sweep.push_back(inv[i].second.evaluate(numeric_env(pt, constants)));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::PoleAtPoint) throw;
        }
      }
      st.x_dependent = !is_constant_sample(sweep);
    }
    fp.stats.push_back(st);
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool dep = true;
      for (const auto& m : jac) {
        Eigen::MatrixXd two(2, kJetCount);
        two.row(0) = m.row(static_cast<Eigen::Index>(i));
        two.row(1) = m.row(static_cast<Eigen::Index>(j));
        if (numeric_rank(two) > 1) {
          dep = false;
          break;
        }
      }
      fp.dependence.emplace_back(inv[i].first, inv[j].first, dep);
    }
  return fp;
}

namespace {

// Draws points at which every list evaluates without a pole.
std::vector<JetPoint> draw_points(const std::vector<const NamedExprs*>& lists, const SampleOptions& opts,
                                  int* rejected) {
  if (opts.samples <= 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  JetSampler sampler(opts.seed);
  std::vector<JetPoint> pts;
  int tries = 0, bad = 0;
  const int max_tries = 10 * opts.samples;
  while (static_cast<int>(pts.size()) < opts.samples) {
    if (tries >= max_tries)
      throw Error(ErrorCode::SamplingFailure, "sampling rejected " + std::to_string(bad) + " of " +
                                                  std::to_string(tries) + " points (poles)");
    ++tries;
    const JetPoint pt = sampler.next();
    const NumericEnv env = numeric_env(pt, opts.constants);
    bool ok = true;
    for (const auto* l : lists) ok = ok && try_values(*l, env).has_value();
    if (ok) {
      pts.push_back(pt);
    } else {
      ++bad;
    }
  }
  if (rejected) *rejected = bad;
  return pts;
}

}  // namespace

Fingerprint fingerprint(const NamedExprs& inv, const SampleOptions& opts) {
  int rejected = 0;
  const auto pts = draw_points({&inv}, opts, &rejected);
  Fingerprint fp = fingerprint_at(inv, pts, opts.constants);
  fp.rejected = rejected;
  return fp;
}

std::string to_string(Verdict v) {
  return v == Verdict::Distinguished ? "Distinguished" : "NecessaryConditionsHold";
}

CompareReport compare(const InvariantSet& generic, const OperatorSpec& op1, const OperatorSpec& op2,
                      const SampleOptions& opts) {
  CompareReport rep;
  rep.variant = generic.variant;
  rep.options = opts;
  rep.first_operator = print_operator(op1);
  rep.second_operator = print_operator(op2);
  const NamedExprs a = specialize(generic, op1).all();
  const NamedExprs b = specialize(generic, op2).all();
  for (const auto* l : {&a, &b})
    for (const auto& [name, e] : *l)
      if (e.depends_on(Symbol::Kind::CoeffFn))
        throw Error(ErrorCode::InvalidArgument, "compare needs operators with explicit coefficients");

  int rejected = 0;
  const auto pts = draw_points({&a, &b}, opts, &rejected);
  rep.first = fingerprint_at(a, pts, opts.constants);
  rep.second = fingerprint_at(b, pts, opts.constants);
  rep.first.rejected = rep.second.rejected = rejected;

  const auto& s1 = rep.first.stats;
  const auto& s2 = rep.second.stats;
  auto found = [&](Witness w) {
    rep.verdict = Verdict::Distinguished;
    rep.witness = std::move(w);
  };
  // Strongest evidence first; every test is symmetric in the two operators.
  for (std::size_t i = 0; i < s1.size() && !rep.witness; ++i)
    if (s1[i].constant != s2[i].constant)
      found({"constancy", s1[i].name, "constant for one operator only", s1[i].stddev, s2[i].stddev, std::nullopt});
  for (std::size_t i = 0; i < s1.size() && !rep.witness; ++i)
    if (s1[i].constant && s2[i].constant && differ(s1[i].mean, s2[i].mean))
      found({"constant_value", s1[i].name, "different constant values", s1[i].mean, s2[i].mean, std::nullopt});
  if (!rep.witness && rep.first.rank != rep.second.rank)
    found({"rank", "", "different Jacobian ranks at matched samples", static_cast<double>(rep.first.rank),
           static_cast<double>(rep.second.rank), std::nullopt});
  for (std::size_t i = 0; i < s1.size() && !rep.witness; ++i)
    if (s1[i].x_dependent != s2[i].x_dependent)
      found({"x_dependence", s1[i].name, "depends on x at fixed fiber point for one operator only",
             s1[i].x_dependent ? 1.0 : 0.0, s2[i].x_dependent ? 1.0 : 0.0, std::nullopt});
  for (std::size_t i = 0; i < s1.size() && !rep.witness; ++i)
    for (std::size_t n = 0; n < pts.size(); ++n) {
      const double x1 = rep.first.values[i][n], x2 = rep.second.values[i][n];
      if (differ(x1, x2)) {
        found({"sample_value", s1[i].name, "values differ at a matched sample point (identity point map)", x1, x2,
               pts[n]});
        break;
      }
    }
  return rep;
}

CompareReport compare(const OperatorSpec& op1, const OperatorSpec& op2, Variant variant, const SampleOptions& opts) {
  return compare(generic_invariants(variant), op1, op2, opts);
}

}  // namespace cartan
