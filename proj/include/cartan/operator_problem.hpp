#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"
#include "cartan/forms.hpp"
#include "cartan/linear_solve.hpp"

namespace cartan {

enum class Variant { Direct, Gauge };

std::string to_string(Variant v);
Variant parse_variant(std::string_view s);

/// Monic fifth-order operator D^5 + f4 D^4 + ... + f0. Coefficients are
/// either the formal symbols f0..f4 (generic operator) or expressions in x
/// and declared constants.
struct OperatorSpec {
  std::array<Expr, 5> f;
  std::set<std::string> constants;

  static OperatorSpec generic();
  bool is_generic() const;
  /// Bindings f_i^(k) -> d^k f_i/dx^k for every order up to max_order.
  Bindings coefficient_bindings(int max_order) const;

  friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// (row, column), 0-based, of group parameter a_l in the 7x7 structure group.
std::pair<int, int> param_position(int l);
/// Parameter at a matrix position, or 0.
int param_at(int row, int col);

/// Structure-group matrix with the given entries; parameters not listed take
/// their identity value (1 on the diagonal, 0 elsewhere).
ExprMatrix group_matrix(const std::map<int, Expr>& entries);
/// Group matrix with the listed parameters symbolic and the rest at identity.
ExprMatrix symbolic_group_matrix(const std::set<int>& free);

/// Parameter assignments made loop by loop. Each stage acts on the coframe
/// produced by the previous stages.
struct GroupState {
  std::vector<std::map<int, Expr>> stages;
  std::set<int> free;

  static GroupState full();
  int free_count() const { return static_cast<int>(free.size()); }
  /// All solved values keyed by parameter.
  std::map<int, Expr> assignments() const;
  /// New state with one more stage; the stage's parameters leave the free set.
  GroupState with_stage(const std::map<int, Expr>& values) const;
};

/// Base coframe ω¹..ω⁷ in the coordinate basis, and the function I with ω⁷ = dI.
Expr base_invariant(const OperatorSpec& op, Variant variant);
std::vector<OneForm> base_coframe(const OperatorSpec& op, Variant variant);

/// Coefficient matrix (rows = forms, columns = dx..dt) of jet-only one-forms.
ExprMatrix coframe_matrix(const std::vector<OneForm>& forms);
std::vector<OneForm> forms_from_matrix(const ExprMatrix& m);

struct LiftedCoframe {
  std::vector<OneForm> theta;
  GroupState group;
  /// θ coefficient matrix over dx..dt, and its inverse (coframe -> coordinates).
  ExprMatrix matrix;
  ExprMatrix change_of_basis;
  /// Coframe after applying every normalized stage (θ at the identity of the
  /// remaining group).
  ExprMatrix normalized_matrix;
};

/// θ = h(free)·ω⁽ᵏ⁾ where ω⁽ᵏ⁾ applies each stage of g in turn to ω.
/// Throws SingularGroup when a1·a3·a6·a10·a15 vanishes under the assignments.
LiftedCoframe lifted_coframe(const std::vector<OneForm>& omega, const GroupState& g);

/// α^l = (dh·h⁻¹) at the position of each free parameter l, as coordinate
/// one-forms in the da covectors.
std::map<int, OneForm> maurer_cartan(const GroupState& g);
/// The full matrix dh·h⁻¹ for the free parameters (entries are one-forms).
std::vector<std::vector<OneForm>> maurer_cartan_matrix(const std::set<int>& free);

}  // namespace cartan
