#include "cartan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cartan/error.hpp"
#include "cartan/operator_text.hpp"

namespace cartan {

namespace {

void check_coordinate(const OneForm& w) {
  for (const auto& [k, c] : w.terms())
    if (k >= kJetCount) throw Error(ErrorCode::NeedsCoordinateBasis, "oracle needs forms in dx..dt only");
}

double eval(const Expr& e, const NumericEnv& env) {
  const double v = e.evaluate(env);
  if (!std::isfinite(v)) throw Error(ErrorCode::NumericFailure, "non-finite value of " + e.str());
  return v;
}

std::array<double, kJetCount> coeffs_at(const OneForm& w, const NumericScene& scene, const JetPoint& pt) {
  std::array<double, kJetCount> out{};
  const NumericEnv env = scene.env_at(pt);
  for (const auto& [k, c] : w.terms()) out[k] = eval(c, env);
  return out;
}

NumericTwoForm central(const OneForm& w, const NumericScene& scene, double h) {
  // g[m][n] = ∂_m ω_n
  std::array<std::array<double, kJetCount>, kJetCount> g{};
  for (int m = 0; m < kJetCount; ++m) {
    JetPoint plus = scene.point, minus = scene.point;
    plus[m] += h;
    minus[m] -= h;
    const auto a = coeffs_at(w, scene, plus);
    const auto b = coeffs_at(w, scene, minus);
    for (int n = 0; n < kJetCount; ++n) g[m][n] = (a[n] - b[n]) / (2 * h);
  }
  NumericTwoForm out{};
  for (int m = 0; m < kJetCount; ++m)
    for (int n = 0; n < kJetCount; ++n) out[m][n] = g[m][n] - g[n][m];
  return out;
}

NumericTwoForm wedge_values(const std::array<double, kJetCount>& a, const std::array<double, kJetCount>& b) {
  NumericTwoForm out{};
  for (int m = 0; m < kJetCount; ++m)
    for (int n = 0; n < kJetCount; ++n) out[m][n] = a[m] * b[n] - a[n] * b[m];
  return out;
}

struct SceneResidual {
  double relative = 0;
  double absolute = 0;
};

SceneResidual residual(const NumericTwoForm& lhs, const NumericTwoForm& rhs) {
  // Mixed measure: relative for O(1) and larger entries, absolute below.
  double diff = 0, scale = 1;
  for (int m = 0; m < kJetCount; ++m)
    for (int n = m + 1; n < kJetCount; ++n) {
      diff = std::max(diff, std::abs(lhs[m][n] - rhs[m][n]));
      scale = std::max({scale, std::abs(lhs[m][n]), std::abs(rhs[m][n])});
    }
  return {diff / scale, diff};
}

}  // namespace

CoeffFunction coefficient_functions(const OperatorSpec& op, const std::map<std::string, double>& constants,
                                    int max_order) {
  auto table = std::make_shared<std::array<std::vector<Expr>, kCoeffFnCount>>();
  for (int i = 0; i < kCoeffFnCount; ++i) {
    Expr d = op.f[i];
    if (d.depends_on(Symbol::Kind::CoeffFn))
      throw Error(ErrorCode::InvalidArgument, "numeric scenes need explicit coefficient functions");
    for (int k = 0; k <= max_order; ++k) {
      (*table)[i].push_back(d);
      d = d.partial(Symbol::jet(Jet::x));
    }
  }
  auto consts = std::make_shared<std::map<Symbol, double>>();
  for (const auto& [name, v] : constants) consts->emplace(Symbol::constant(name), v);
  return [table, consts](int index, int order, double x) {
    if (index < 0 || index >= kCoeffFnCount || order < 0 || order >= static_cast<int>((*table)[index].size()))
      throw Error(ErrorCode::UnboundSymbol, "coefficient derivative out of range");
    NumericEnv env;
    env.set(Jet::x, x);
    env.constants = *consts;
    return (*table)[index][order].evaluate(env);
  };
}

NumericEnv NumericScene::env_at(const JetPoint& pt) const {
  NumericEnv env = numeric_env(pt, constants);
  env.coeff_fn = coeff;
  return env;
}

std::vector<NumericScene> make_scenes(const OperatorSpec& op, const std::map<std::string, double>& constants,
                                      int count, std::uint64_t seed) {
  const CoeffFunction f = coefficient_functions(op, constants);
  JetSampler sampler(seed);
  std::vector<NumericScene> out;
  for (int n = 0; n < count; ++n) {
    NumericScene s;
    s.point = sampler.next();
    s.coeff = f;
    s.constants = constants;
    s.seed = seed;
    out.push_back(std::move(s));
  }
  return out;
}

FdResult fd_exterior_derivative(const OneForm& w, const NumericScene& scene) {
  check_coordinate(w);
  FdResult r;
  const auto [h1, h2] = scene.steps;
  r.coarse = central(w, scene, h1);
  r.fine = central(w, scene, h2);
  const double q = (h1 / h2) * (h1 / h2);
  for (int m = 0; m < kJetCount; ++m)
    for (int n = 0; n < kJetCount; ++n) r.richardson[m][n] = (q * r.fine[m][n] - r.coarse[m][n]) / (q - 1);
  return r;
}

NumericTwoForm evaluate_two_form(const TwoForm& f, const NumericScene& scene) {
  NumericTwoForm out{};
  const NumericEnv env = scene.env_at(scene.point);
  for (const auto& [jk, c] : f.terms()) {
    const auto [j, k] = jk;
    if (j >= kJetCount || k >= kJetCount)
      throw Error(ErrorCode::NeedsCoordinateBasis, "oracle needs forms in dx..dt only");
    const double v = eval(c, env);
    out[j][k] += v;
    out[k][j] -= v;
  }
  return out;
}

std::array<double, kJetCount> evaluate_one_form(const OneForm& w, const NumericScene& scene) {
  check_coordinate(w);
  return coeffs_at(w, scene, scene.point);
}

bool ResidualReport::all_pass() const {
  return !equations.empty() && std::all_of(equations.begin(), equations.end(), [](const auto& e) { return e.pass; });
}

ResidualReport check_structure_equations(const ReductionTrace& trace, const std::vector<NumericScene>& scenes) {
  if (!trace.complete()) throw Error(ErrorCode::IncompleteReduction, "reduction trace has no final structure");
  ResidualReport rep;
  rep.variant = trace.variant;
  rep.operator_text = print_operator(trace.op);
  rep.scenes = static_cast<int>(scenes.size());
  const auto theta = forms_from_matrix(trace.final->coframe);
  const auto& eq = trace.final->equations;

  for (int i = 1; i <= 7; ++i) rep.equations.push_back({i, 0, 0, 0, 0, -1, true});
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    const auto& scene = scenes[n];
    std::vector<std::array<double, kJetCount>> th;
    for (const auto& t : theta) th.push_back(evaluate_one_form(t, scene));
    const NumericEnv env = scene.env_at(scene.point);
    for (int i = 1; i <= 7; ++i) {
      NumericTwoForm rhs{};
      for (const auto& [jk, c] : eq.torsion[i - 1]) {
        const double v = eval(c, env);
        const auto w = wedge_values(th[jk.first - 1], th[jk.second - 1]);
        for (int a = 0; a < kJetCount; ++a)
          for (int b = 0; b < kJetCount; ++b) rhs[a][b] += v * w[a][b];
      }
      const FdResult lhs = fd_exterior_derivative(theta[i - 1], scene);
      const SceneResidual fine = residual(lhs.richardson, rhs);
      const SceneResidual coarse = residual(lhs.coarse, rhs);
      auto& er = rep.equations[i - 1];
      if (er.worst_scene < 0 || fine.relative > er.relative) er.worst_scene = static_cast<int>(n);
      er.relative = std::max(er.relative, fine.relative);
      er.absolute = std::max(er.absolute, fine.absolute);
      er.relative_coarse = std::max(er.relative_coarse, coarse.relative);
      er.absolute_coarse = std::max(er.absolute_coarse, coarse.absolute);
      if (!(fine.relative < rep.tolerance || fine.absolute < rep.absolute_floor)) er.pass = false;
    }
  }
  return rep;
}

ReductionTrace perturb_invariant(const ReductionTrace& trace, const NormalizationPlan& plan, const std::string& name,
                                 const Expr& delta) {
  if (!trace.complete()) throw Error(ErrorCode::IncompleteReduction, "reduction trace has no final structure");
  ReductionTrace out = trace;
  bool hit = false;
  for (const auto& d : plan.final_display) {
    if (d.constant || d.invariant != name) continue;
    auto& slot = out.final->equations.torsion[d.slot.i - 1];
    const std::pair<int, int> jk{d.slot.j, d.slot.k};
    const Expr v = out.final->equations.torsion_at(d.slot.i, d.slot.j, d.slot.k) + delta;
    if (v.is_zero()) {
      slot.erase(jk);
    } else {
      slot.insert_or_assign(jk, v);
    }
    hit = true;
  }
  if (!hit) throw Error(ErrorCode::InvalidArgument, "plan display has no invariant named " + name);
  return out;
}

}  // namespace cartan
