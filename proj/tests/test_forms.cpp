#include <doctest.h>

#include <algorithm>

#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/forms.hpp"
#include "cartan/linear_solve.hpp"
#include "cartan/operator_problem.hpp"
#include "derived_values.hpp"
#include "random_expr.hpp"

using namespace cartan;

namespace {

Expr P(std::string_view s) { return parse_expr(s); }

OneForm d(Jet j) { return OneForm::basis(BasisContext::coordinate(), coord_index(j)); }

// Random coordinate one-form over the jets and a few da's.
OneForm random_one_form(testing::ExprGenerator& gen) {
  OneForm w;
  for (int k = 0; k < 3; ++k) {
    const int idx = std::uniform_int_distribution<int>(0, kJetCount + 3)(gen.rng());
    w.add(idx, gen.tree(2));
  }
  return w;
}

}  // namespace

TEST_CASE("wedge products of coordinate covectors") {
  CHECK(wedge(d(Jet::x), d(Jet::x)).is_zero());
  const TwoForm xu = wedge(d(Jet::x), d(Jet::u));
  CHECK(xu.coeff(coord_index(Jet::x), coord_index(Jet::u)) == Expr(1));
  CHECK(wedge(d(Jet::u), d(Jet::x)).coeff(coord_index(Jet::x), coord_index(Jet::u)) == Expr(-1));
  const TwoForm pq = wedge(P("p") * d(Jet::x), P("q") * d(Jet::u));
  CHECK(pq.coeff(coord_index(Jet::x), coord_index(Jet::u)) == P("p*q"));
}

TEST_CASE("wedge rejects mismatched bases") {
  const OneForm th = OneForm::basis(BasisContext::abstract(), theta_index(1));
  CHECK_THROWS_AS(wedge(d(Jet::x), th), Error);
  try {
    (void)wedge(d(Jet::x), th);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BasisMismatch);
  }
}

TEST_CASE("property: wedge antisymmetry and bilinearity") {
  testing::ExprGenerator gen(11);
  for (int k = 0; k < 60; ++k) {
    OneForm a, b, c;
    Expr s;
    try {
      a = random_one_form(gen);
      b = random_one_form(gen);
      c = random_one_form(gen);
      s = gen.tree(1);
    } catch (const Error&) {
      continue;
    }
    CHECK(wedge(a, a).is_zero());
    CHECK(wedge(a, b) == Expr(-1) * wedge(b, a));
    CHECK(wedge(a + c, b) == wedge(a, b) + wedge(c, b));
    CHECK(wedge(s * a, b) == s * wedge(a, b));
  }
}

TEST_CASE("exterior derivative examples") {
  CHECK(exterior_derivative(d(Jet::x)).is_zero());
  const OneForm w2 = Expr(1) / P("u") * (d(Jet::u) - P("p") * d(Jet::x));
  const TwoForm dw = exterior_derivative(w2);
  CHECK(dw.coeff(coord_index(Jet::x), coord_index(Jet::u)) == P(derived::kDOmega2_x_u));
  CHECK(dw.coeff(coord_index(Jet::x), coord_index(Jet::p)) == P(derived::kDOmega2_x_p));
  CHECK(dw.terms().size() == 2);
  // The direct ω⁷ is exact.
  const auto omega = base_coframe(OperatorSpec::generic(), Variant::Direct);
  CHECK(exterior_derivative(omega[6]).is_zero());
}

TEST_CASE("coefficient functions differentiate through x") {
  const OneForm df = differential(P("f4*s"));
  CHECK(df.coeff(coord_index(Jet::x)) == P("f4'*s"));
  CHECK(df.coeff(coord_index(Jet::s)) == P("f4"));
}

TEST_CASE("exterior derivative needs the coordinate basis") {
  const OneForm th = OneForm::basis(BasisContext::abstract(), theta_index(2));
  try {
    (void)exterior_derivative(th);
    FAIL("expected NeedsCoordinateBasis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NeedsCoordinateBasis);
  }
}

TEST_CASE("property: d(df) = 0 on 200 random 0-forms") {
  testing::ExprGenerator gen(5);
  int checked = 0;
  while (checked < 200) {
    Expr f;
    try {
      f = gen.tree(3);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    CHECK(exterior_derivative(differential(f)).is_zero());
  }
}

TEST_CASE("property: Leibniz rule") {
  testing::ExprGenerator gen(17);
  for (int k = 0; k < 60; ++k) {
    Expr e;
    OneForm w;
    try {
      e = gen.tree(2);
      w = random_one_form(gen);
    } catch (const Error&) {
      continue;
    }
    const TwoForm lhs = exterior_derivative(e * w);
    const TwoForm rhs = wedge(differential(e), w) + e * exterior_derivative(w);
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("solve_linear examples") {
  const ExprMatrix id = identity_matrix(3);
  const std::vector<Expr> b = {P("p"), P("1/u"), P("a1")};
  const auto x = solve_linear(id, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == b[i]);

  const ExprMatrix a = {{P("u"), Expr(0)}, {P("p"), P("u")}};
  const auto y = solve_linear(a, std::vector<Expr>{Expr(1), Expr(0)});
  CHECK(y[0] == P("1/u"));
  CHECK(y[1] == P("-p/u^2"));
}

TEST_CASE("structure-group inverse matches the independent computation") {
  std::set<int> all;
  for (int l = 1; l <= kParamCount; ++l) all.insert(l);
  const ExprMatrix g = symbolic_group_matrix(all);
  const ExprMatrix gi = inverse(g);
  CHECK(is_identity(multiply(g, gi)));
  CHECK(is_identity(multiply(gi, g)));
  const std::array<const char*, 7> diag = {"1/a1", "1", "1/a3", "1/a6", "1/a10", "1/a15", "1"};
  for (int i = 0; i < 7; ++i) CHECK(gi[i][i] == P(diag[i]));
  int nonzero = 0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (i != j && !gi[i][j].is_zero()) ++nonzero;
  CHECK(nonzero == static_cast<int>(std::size(derived::kGroupInverse)));
  for (const auto& e : derived::kGroupInverse) CHECK(gi[e.row][e.col] == P(e.value));
  CHECK(determinant(g) == P(derived::kGroupDeterminant));
}

TEST_CASE("solve_linear reports singular systems") {
  const ExprMatrix a = {{P("u"), P("p")}, {P("2*u"), P("2*p")}};
  try {
    (void)inverse(a);
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSystem);
  }
}

TEST_CASE("property: solve_linear recomposes on random systems") {
  testing::ExprGenerator gen(23);
  int solved = 0;
  for (int k = 0; k < 40; ++k) {
    ExprMatrix a(3, std::vector<Expr>(3));
    std::vector<Expr> b(3);
    // Block-triangular with monomial pivots, rows shuffled: the shape the
    // engine meets. Dense polynomial systems swell without a gcd.
    try {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = j < i ? gen.leaf() : j == i ? gen.monomial_divisor() : Expr(0);
      for (auto& c : b) c = gen.tree(1);
    } catch (const Error&) {
      continue;
    }
    std::shuffle(a.begin(), a.end(), gen.rng());
    try {
      const auto x = solve_linear(a, b);  // verify=true recomposes internally
      const auto ax = multiply(a, x);
      for (int i = 0; i < 3; ++i) CHECK(ax[i] == b[i]);
      ++solved;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularSystem);
    }
  }
  CHECK(solved > 20);
}

TEST_CASE("frame change round trip and decomposition") {
  const auto omega = base_coframe(OperatorSpec::generic(), Variant::Direct);
  const GroupState g = GroupState::full();
  const LiftedCoframe lc = lifted_coframe(omega, g);
  const FrameChange frame(lc.theta, maurer_cartan(g));
  for (int i = 0; i < 7; ++i) {
    const OneForm abstract = frame.to_frame(lc.theta[i]);
    CHECK(abstract == OneForm::basis(BasisContext::abstract(), theta_index(i + 1)));
    CHECK(frame.to_coordinates(abstract) == lc.theta[i]);
  }
  // dθ¹ = α¹∧θ¹ at the first loop.
  const Decomposition d1 = decompose_two_form(exterior_derivative(lc.theta[0]), frame);
  CHECK(d1.theta_theta.empty());
  CHECK(d1.alpha_alpha.empty());
  REQUIRE(d1.alpha_theta.size() == 1);
  CHECK(d1.alpha_theta.begin()->first == std::pair{1, 1});
  CHECK(d1.alpha_theta.begin()->second == Expr(1));
  // dθ² has torsion on θ¹∧θ² and θ¹∧θ³ only.
  const Decomposition d2 = decompose_two_form(exterior_derivative(lc.theta[1]), frame);
  CHECK(d2.alpha_theta.empty());
  CHECK(d2.theta_theta.size() == 2);
  CHECK(d2.theta_theta.count({1, 2}) == 1);
  CHECK(d2.theta_theta.count({1, 3}) == 1);
  // Zero decomposes to nothing.
  const Decomposition d0 = decompose_two_form(TwoForm(), frame);
  CHECK(d0.alpha_theta.empty());
  CHECK(d0.theta_theta.empty());
  // decompose∘recompose is the identity.
  for (int i = 0; i < 7; ++i) {
    const TwoForm dt = exterior_derivative(lc.theta[i]);
    CHECK(recompose(decompose_two_form(dt, frame), frame) == dt);
  }
}

TEST_CASE("decomposition fails outside the span") {
  // Only a1 free: da2 is not in the frame.
  GroupState g;
  g.free = {1};
  const auto omega = base_coframe(OperatorSpec::generic(), Variant::Direct);
  const LiftedCoframe lc = lifted_coframe(omega, g);
  const FrameChange frame(lc.theta, maurer_cartan(g));
  const TwoForm bad = wedge(OneForm::basis(BasisContext::coordinate(), coord_index_param(2)), d(Jet::x));
  try {
    (void)decompose_two_form(bad, frame);
    FAIL("expected BasisMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BasisMismatch);
  }
}
