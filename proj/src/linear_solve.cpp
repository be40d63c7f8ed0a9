#include "cartan/linear_solve.hpp"

#include <limits>

#include "cartan/error.hpp"

namespace cartan {

namespace {

// Lower score is a better pivot.
int pivot_score(const Expr& e) {
  if (e.is_zero()) return std::numeric_limits<int>::max();
  if (e.is_monomial()) {
    bool safe = true;
    for (const Symbol& s : e.symbols()) {
      const bool ok = s.kind() == Symbol::Kind::GroupParam || s.kind() == Symbol::Kind::Const ||
                      (s.kind() == Symbol::Kind::JetCoord && s.jet_coord() == Jet::u);
      safe = safe && ok;
    }
    return safe ? 0 : 1;
  }
  return 2 + static_cast<int>(e.numerator().size() + e.denominator().size());
}

void check_rect(const ExprMatrix& a, std::size_t rows, const char* what) {
  if (a.size() != rows) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": row count mismatch");
}

}  // namespace

ExprMatrix identity_matrix(std::size_t n) {
  ExprMatrix m(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Expr(1);
  return m;
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.empty()) return {};
  const std::size_t inner = b.size();
  const std::size_t cols = inner ? b[0].size() : 0;
  ExprMatrix out(a.size(), std::vector<Expr>(cols));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw Error(ErrorCode::InvalidArgument, "multiply: dimension mismatch");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j)
        if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

std::vector<Expr> multiply(const ExprMatrix& a, const std::vector<Expr>& x) {
  std::vector<Expr> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw Error(ErrorCode::InvalidArgument, "multiply: dimension mismatch");
    for (std::size_t k = 0; k < x.size(); ++k)
      if (!a[i][k].is_zero() && !x[k].is_zero()) out[i] += a[i][k] * x[k];
  }
  return out;
}

ExprMatrix transpose(const ExprMatrix& a) {
  if (a.empty()) return {};
  ExprMatrix t(a[0].size(), std::vector<Expr>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

bool is_identity(const ExprMatrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (!(a[i][j] == Expr(i == j ? 1 : 0))) return false;
  return true;
}

ExprMatrix solve_linear(const ExprMatrix& a, const ExprMatrix& b, const SolveOptions& opts) {
  const std::size_t n = a.size();
  check_rect(b, n, "solve_linear");
  for (const auto& row : a)
    if (row.size() != n) throw Error(ErrorCode::InvalidArgument, "solve_linear: matrix is not square");
  const std::size_t m = n ? b[0].size() : 0;

  ExprMatrix lhs = a, rhs = b;
  std::vector<bool> used(n, false);
  std::vector<std::size_t> pivot_row(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    int best_score = std::numeric_limits<int>::max();
    for (std::size_t r = 0; r < n; ++r) {
      if (used[r]) continue;
      const int s = pivot_score(lhs[r][col]);
      if (s < best_score) {
        best_score = s;
        best = r;
      }
    }
    if (best == n)
      throw Error(ErrorCode::SingularSystem, "singular system: no nonzero pivot in column " + std::to_string(col) +
                                                 " (elimination stage " + std::to_string(col + 1) + ")");
    used[best] = true;
    pivot_row[col] = best;
    const Expr piv = lhs[best][col];
    for (std::size_t j = 0; j < n; ++j)
      if (!lhs[best][j].is_zero()) lhs[best][j] = lhs[best][j] / piv;
    for (std::size_t j = 0; j < m; ++j)
      if (!rhs[best][j].is_zero()) rhs[best][j] = rhs[best][j] / piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == best || lhs[r][col].is_zero()) continue;
      const Expr f = lhs[r][col];
      for (std::size_t j = 0; j < n; ++j)
        if (!lhs[best][j].is_zero()) lhs[r][j] -= f * lhs[best][j];
      for (std::size_t j = 0; j < m; ++j)
        if (!rhs[best][j].is_zero()) rhs[r][j] -= f * rhs[best][j];
    }
  }
  ExprMatrix x(n);
  for (std::size_t col = 0; col < n; ++col) x[col] = std::move(rhs[pivot_row[col]]);

  if (opts.verify) {
    const ExprMatrix back = multiply(a, x);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!(back[i][j] == b[i][j]))
          throw Error(ErrorCode::NumericFailure, "solve_linear: recomposition check failed");
  }
  return x;
}

std::vector<Expr> solve_linear(const ExprMatrix& a, const std::vector<Expr>& b, const SolveOptions& opts) {
  ExprMatrix col(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) col[i] = {b[i]};
  ExprMatrix x = solve_linear(a, col, opts);
  std::vector<Expr> out;
  out.reserve(x.size());
  for (auto& row : x) out.push_back(row[0]);
  return out;
}

ExprMatrix inverse(const ExprMatrix& a, const SolveOptions& opts) {
  return solve_linear(a, identity_matrix(a.size()), opts);
}

Expr determinant(const ExprMatrix& a) {
  const std::size_t n = a.size();
  ExprMatrix lhs = a;
  std::vector<std::size_t> order;  // pivot row chosen for each column
  std::vector<bool> used(n, false);
  Expr det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = n;
    int best_score = std::numeric_limits<int>::max();
    for (std::size_t r = 0; r < n; ++r) {
      if (used[r]) continue;
      const int s = pivot_score(lhs[r][col]);
      if (s < best_score) {
        best_score = s;
        best = r;
      }
    }
    if (best == n) return Expr(0);
    used[best] = true;
    order.push_back(best);
    const Expr piv = lhs[best][col];
    det *= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (used[r] || lhs[r][col].is_zero()) continue;
      const Expr f = lhs[r][col] / piv;
      for (std::size_t j = col; j < n; ++j)
        if (!lhs[best][j].is_zero()) lhs[r][j] -= f * lhs[best][j];
    }
  }
  // Sign of the permutation col -> order[col].
  int sign = 1;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = order[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign > 0 ? det : -det;
}

std::vector<std::size_t> rref(RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

RationalMatrix left_null_space(const RationalMatrix& m) {
  // Null space of Mᵀ.
  if (m.empty()) return {};
  const std::size_t rows = m.size(), cols = m[0].size();
  RationalMatrix t(cols, std::vector<Rational>(rows));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  const auto pivots = rref(t);
  std::vector<bool> is_pivot(rows, false);
  for (auto p : pivots) is_pivot[p] = true;
  RationalMatrix basis;
  for (std::size_t f = 0; f < rows; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> y(rows);
    y[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) y[pivots[k]] = -t[k][f];
    basis.push_back(std::move(y));
  }
  return basis;
}

}  // namespace cartan
