#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cartan/error.hpp"
#include "cartan/expr.hpp"
#include "cartan/forms.hpp"
#include "cartan/operator_problem.hpp"

namespace cartan {

/// Torsion slot T^i_{jk}, 1-based, j < k.
struct TorsionIndex {
  int i = 0, j = 0, k = 0;
  auto operator<=>(const TorsionIndex&) const = default;
  std::string str() const;  // "T^2_13"
};

struct McTerm {
  int l = 0;  // Maurer-Cartan form α^l
  int j = 0;  // θ^j
  Rational a;
};

/// dθ^i = Σ A α^l∧θ^j + Σ_{j<k} T^i_jk θ^j∧θ^k for i = 1..7 (index 0..6).
struct StructureEquations {
  std::array<std::vector<McTerm>, 7> mc;
  std::array<std::map<std::pair<int, int>, Expr>, 7> torsion;

  Expr torsion_at(int i, int j, int k) const;
  std::size_t torsion_count() const;
};

struct StructureOptions {
  /// Recompose every dθ^i from its decomposition and compare.
  bool verify = true;
};

/// Exterior derivative of each θ^i decomposed in the frame (θ, α). Throws
/// BasisMismatch when an α∧θ coefficient is not constant or an α∧α term
/// survives.
StructureEquations structure_equations(const LiftedCoframe& lc, const std::map<int, OneForm>& alpha,
                                       const StructureOptions& opts = {});

struct EssentialTorsion {
  /// Σ weight · T over the listed slots; a single slot with weight 1 in the
  /// usual case.
  std::vector<std::pair<TorsionIndex, Rational>> combination;
  Expr value;
};

struct AbsorptionResult {
  /// (l, k) -> z^l_k; unconstrained components are 0 and omitted.
  std::map<std::pair<int, int>, Expr> z;
  std::vector<EssentialTorsion> essential;

  /// The essential value at a single slot, if that slot is essential on its own.
  std::optional<Expr> essential_at(const TorsionIndex& t) const;
};

/// Solves Σ(A^i_{kl} z^l_j − A^i_{jl} z^l_k) = −T^i_jk by rational
/// elimination; rows without a pivot are the essential torsion.
AbsorptionResult absorb(const StructureEquations& se);

struct PlanEntry {
  TorsionIndex torsion;
  Rational target;
  int param = 0;
  /// Value stated by the reference for the generic operator (may be absent).
  std::optional<Expr> expected;
};

struct PlanLoop {
  std::vector<PlanEntry> entries;
};

/// One term of a reference display of the final structure equations: the
/// coefficient is either a rational constant or the name of an invariant.
struct DisplayTerm {
  TorsionIndex slot;
  std::optional<Rational> constant;
  std::string invariant;
};

struct NormalizationPlan {
  Variant variant = Variant::Direct;
  std::vector<PlanLoop> loops;
  /// Expected essential torsion at loop 1 for the generic operator.
  std::map<TorsionIndex, Expr> expected_loop1;
  std::vector<DisplayTerm> final_display;
  /// Invariant name -> reference expression for the generic operator.
  std::vector<std::pair<std::string, Expr>> invariants;
  /// Discrepancy ids the reference is known to carry.
  std::map<std::string, std::string> known_issues;

  static NormalizationPlan from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Built-in plans shipped with the library.
  static NormalizationPlan builtin(Variant v);
};

/// Solves one loop's entries: jointly for monomial entries with nonzero
/// targets, then by affine isolation in plan order. Throws PlanMismatch.
std::map<int, Expr> normalize(const AbsorptionResult& ar, const PlanLoop& loop, const std::set<int>& free);

struct LoopRecord {
  int index = 0;
  std::set<int> free_before;
  StructureEquations equations;
  AbsorptionResult absorption;
  std::map<int, Expr> assignments;
  int free_after = 0;
};

struct Discrepancy {
  std::string id;
  std::string where;
  std::string engine;
  std::string reference;
  std::string note;
};

struct FinalStructure {
  StructureEquations equations;  // no Maurer-Cartan terms
  ExprMatrix coframe;            // θ over dx..dt
};

struct ReductionTrace {
  Variant variant = Variant::Direct;
  OperatorSpec op;
  std::vector<LoopRecord> loops;
  std::optional<FinalStructure> final;
  GroupState group;
  std::vector<Discrepancy> discrepancies;

  std::vector<int> free_counts() const;
  bool complete() const { return final.has_value(); }
};

struct RunOptions {
  StructureOptions structure;
  /// Throw PlanMismatch when a solved assignment differs from the plan's
  /// expected value (the plan validator); otherwise record a discrepancy.
  bool strict_expected = false;
  /// Stop after this many loops (0 = run to completion).
  int max_loops = 0;
};

/// Runs the loops of the plan. On PlanMismatch the partial trace is attached
/// to the thrown ReductionError.
ReductionTrace run_reduction(const OperatorSpec& op, Variant variant, const NormalizationPlan& plan,
                             const RunOptions& opts = {});

/// Compares the final structure against the plan's reference display.
std::vector<Discrepancy> compare_with_display(const ReductionTrace& trace, const NormalizationPlan& plan);

/// Recomputes a plan's assignments for the generic operator and throws
/// PlanMismatch on the first difference from the expected values.
void validate_plan(const NormalizationPlan& plan);

class ReductionError : public Error {
 public:
  ReductionError(const Error& e, ReductionTrace partial) : Error(e), partial_(std::move(partial)) {}
  const ReductionTrace& partial() const { return partial_; }

 private:
  ReductionTrace partial_;
};

}  // namespace cartan
