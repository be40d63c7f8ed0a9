#pragma once

#include <vector>

#include "cartan/expr.hpp"

namespace cartan {

using ExprMatrix = std::vector<std::vector<Expr>>;

ExprMatrix identity_matrix(std::size_t n);
ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b);
std::vector<Expr> multiply(const ExprMatrix& a, const std::vector<Expr>& x);
ExprMatrix transpose(const ExprMatrix& a);
bool is_identity(const ExprMatrix& a);

struct SolveOptions {
  /// Recompose A·X and compare with B after solving; mismatch is a logic
  /// error and throws NumericFailure.
  bool verify = true;
};

/// Solves A·X = B for X (B has any number of columns) by Gauss-Jordan
/// elimination. Pivots are chosen per column: single monomials in group
/// parameters, u and constants first, then other monomials, then the
/// shortest polynomial. Throws SingularSystem naming the column when every
/// candidate pivot is zero.
ExprMatrix solve_linear(const ExprMatrix& a, const ExprMatrix& b, const SolveOptions& opts = {});
std::vector<Expr> solve_linear(const ExprMatrix& a, const std::vector<Expr>& b, const SolveOptions& opts = {});
ExprMatrix inverse(const ExprMatrix& a, const SolveOptions& opts = {});

/// Determinant via the same elimination (product of pivots with row-swap sign).
Expr determinant(const ExprMatrix& a);

/// Exact rational matrices, used for exponent systems and constant
/// absorption systems.
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Row-reduced echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m);

/// Basis of {y : yᵀ·M = 0}.
RationalMatrix left_null_space(const RationalMatrix& m);

}  // namespace cartan
