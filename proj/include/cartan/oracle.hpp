#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cartan/forms.hpp"
#include "cartan/invariants.hpp"
#include "cartan/reduction.hpp"

namespace cartan {

using CoeffFunction = std::function<double(int index, int order, double x)>;
using NumericTwoForm = std::array<std::array<double, kJetCount>, kJetCount>;

/// f_i^(k)(x) for an operator with explicit coefficients. Derivatives are
/// taken symbolically up to max_order. Throws InvalidArgument for the generic
/// operator.
CoeffFunction coefficient_functions(const OperatorSpec& op, const std::map<std::string, double>& constants,
                                    int max_order = 8);

struct NumericScene {
  JetPoint point{};
  CoeffFunction coeff;
  std::map<std::string, double> constants;
  /// Coarse and fine central-difference steps.
  std::array<double, 2> steps{1e-4, 1e-5};
  std::uint64_t seed = 0;

  NumericEnv env_at(const JetPoint& pt) const;
};

/// `count` scenes at points drawn from the fingerprint domain.
std::vector<NumericScene> make_scenes(const OperatorSpec& op, const std::map<std::string, double>& constants,
                                      int count, std::uint64_t seed);

struct FdResult {
  NumericTwoForm coarse{};      // step h1
  NumericTwoForm fine{};        // step h2
  NumericTwoForm richardson{};  // (r^2 D(h2) - D(h1)) / (r^2 - 1), r = h1/h2
};

/// dω(e_m, e_n) = ∂_m ω_n − ∂_n ω_m by central differences in the jet
/// coordinates. Throws NeedsCoordinateBasis for forms with da terms and
/// NumericFailure on non-finite values.
FdResult fd_exterior_derivative(const OneForm& w, const NumericScene& scene);

/// Exact two-form evaluated at the scene point.
NumericTwoForm evaluate_two_form(const TwoForm& f, const NumericScene& scene);
std::array<double, kJetCount> evaluate_one_form(const OneForm& w, const NumericScene& scene);

struct EquationResidual {
  int i = 0;  // dθ^i
  /// Max over scenes of max|LHS − RHS| / max(1, max|LHS|, max|RHS|), maxima
  /// over coordinate pairs.
  double relative = 0;
  double absolute = 0;
  /// Same measure with the coarse step only (no extrapolation).
  double relative_coarse = 0;
  double absolute_coarse = 0;
  int worst_scene = -1;
  bool pass = false;
};

struct ResidualReport {
  Variant variant = Variant::Direct;
  std::string operator_text;
  double tolerance = 1e-6;
  double absolute_floor = 1e-9;
  int scenes = 0;
  std::vector<EquationResidual> equations;

  bool all_pass() const;
};

/// Checks every final structure equation dθ^i = Σ T^i_jk θ^j∧θ^k at each
/// scene: the left side by finite differences of the final coframe, the right
/// side from the coefficients. Throws IncompleteReduction without a final
/// stage.
ResidualReport check_structure_equations(const ReductionTrace& trace, const std::vector<NumericScene>& scenes);

/// Copy of the trace with delta added at every final slot carrying the named
/// invariant (per the plan's display).
ReductionTrace perturb_invariant(const ReductionTrace& trace, const NormalizationPlan& plan, const std::string& name,
                                 const Expr& delta);

}  // namespace cartan
