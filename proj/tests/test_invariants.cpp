#include <doctest.h>

#include <cmath>

#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/invariants.hpp"
#include "cartan/operator_text.hpp"
#include "cartan/worked_example.hpp"
#include "derived_values.hpp"

using namespace cartan;

namespace {

Expr P(std::string_view s) { return parse_expr(s); }

const InvariantSet& generic(Variant v) {
  static const InvariantSet direct = generic_invariants(Variant::Direct);
  static const InvariantSet gauge = generic_invariants(Variant::Gauge);
  return v == Variant::Direct ? direct : gauge;
}

NumericEnv env_at(const JetPoint& pt) { return numeric_env(pt, {}); }

}  // namespace

TEST_CASE("named invariants of the generic operator") {
  const auto& d = generic(Variant::Direct);
  REQUIRE(d.entries.size() == 6);
  CHECK(*d.find("I1") == P("-(f4*u + 3*p)/u^(4/5)"));
  CHECK(*d.find("I3") == P("-(f0*u + f1*p + f2*q + f3*r + f4*s + t)"));
  CHECK(*d.find("I6") == *d.find("I1"));
  CHECK(d.extras.empty());
  const auto& g = generic(Variant::Gauge);
  REQUIRE(g.entries.size() == 5);
  CHECK(*g.find("L3") == P("-(2*p*f2 + 3*f3*q + 4*f4*r + f1*u + 5*s)/u"));
  CHECK(*g.find("L5") == *g.find("L1"));
  CHECK(g.find("I1") == nullptr);
  // Every named entry but I5 agrees with the reference expression.
  for (Variant v : {Variant::Direct, Variant::Gauge}) {
    const auto& inv = generic(v);
    REQUIRE(inv.reference.size() == inv.entries.size());
    for (std::size_t n = 0; n < inv.entries.size(); ++n) {
      INFO(inv.entries[n].first);
      if (inv.entries[n].first == "I5")
        CHECK_FALSE(inv.entries[n].second == inv.reference[n].second);
      else
        CHECK(inv.entries[n].second == inv.reference[n].second);
    }
  }
}

TEST_CASE("I1 derivative and sample value match the independent computation") {
  const Expr i1 = *generic(Variant::Direct).find("I1");
  CHECK(i1.partial(Symbol::jet(Jet::p)) == P(derived::kDI1Dp));
  const auto zero = specialize(generic(Variant::Direct), parse_operator("D^5"));
  JetPoint pt{0.3, 1.0, 2.0, 0.1, -0.2, 0.7, 1.1};
  CHECK(zero.find("I1")->evaluate(env_at(pt)) == doctest::Approx(derived::kI1AtSample).epsilon(1e-14));
}

TEST_CASE("specialization reproduces the worked example") {
  const auto ex = WorkedExample::builtin();
  for (Variant v : {Variant::Direct, Variant::Gauge}) {
    const auto inv = specialize(generic(v), ex.op());
    for (const auto& [name, value] : ex.golden(v)) {
      INFO(name);
      CHECK(*inv.find(name) == value);
    }
  }
  const auto d = specialize(generic(Variant::Direct), ex.op());
  CHECK(*d.find("I3") == parse_expr("a^5*lam*u - q0*u - t", default_resolver({"q0", "lam", "a"})));
  CHECK(*d.find("I1") == P("-3*p/u^(4/5)"));
  const auto g = specialize(generic(Variant::Gauge), ex.op());
  CHECK(*g.find("L2") == P("-10*p^2/u^2"));
}

TEST_CASE("property: specialization commutes with evaluation") {
  const OperatorSpec op = parse_operator("x^2*D^4 + (1 + x)*D^3 - x*D^2 + 3*x^3*D + 2 - x");
  JetSampler sampler(42);
  for (Variant v : {Variant::Direct, Variant::Gauge}) {
    const auto& gen = generic(v);
    const auto spec = specialize(gen, op);
    // Coefficient jets by hand.
    auto coeff = [](int i, int k, double x) -> double {
      switch (i * 10 + k) {
        case 40: return x * x;
        case 41: return 2 * x;
        case 42: return 2;
        case 30: return 1 + x;
        case 31: return 1;
        case 20: return -x;
        case 21: return -1;
        case 10: return 3 * x * x * x;
        case 11: return 9 * x * x;
        case 00: return 2 - x;
        case 01: return -1;
        default: return 0;
      }
    };
    for (int n = 0; n < 20; ++n) {
      const JetPoint pt = sampler.next();
      NumericEnv env = env_at(pt);
      NumericEnv fenv = env;
      fenv.coeff_fn = coeff;
      for (std::size_t e = 0; e < gen.entries.size(); ++e) {
        const double a = gen.entries[e].second.evaluate(fenv);
        const double b = spec.entries[e].second.evaluate(env);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST_CASE("shifting f4 moves I1 by -c u^(1/5)") {
  const Expr shift = P(derived::kI1ShiftPerC);
  const auto base = specialize(generic(Variant::Direct), parse_operator("x*D^4 + 1"));
  JetSampler sampler(3);
  for (double c : {0.5, 2.0, -1.0, 3.0, 0.25}) {
    const auto moved = specialize(generic(Variant::Direct),
                                  parse_operator("(x + " + std::to_string(c) + ")*D^4 + 1"));
    const JetPoint pt = sampler.next();
    const double diff = moved.find("I1")->evaluate(env_at(pt)) - base.find("I1")->evaluate(env_at(pt));
    CHECK(diff == doctest::Approx(c * shift.evaluate(env_at(pt))).epsilon(1e-12));
  }
}

TEST_CASE("compare is reflexive and symmetric") {
  const char* ops[] = {"D^5", "D^5 + x", "x*D^4 + D^3 + 3", "D^5 + x^2*D^2 - 1", "(1 + x^2)*D^4 + x*D"};
  for (const char* t : ops) {
    const auto op = parse_operator(t);
    for (Variant v : {Variant::Direct, Variant::Gauge}) {
      INFO(t << " " << to_string(v));
      const auto rep = compare(op, op, v);
      CHECK(rep.verdict == Verdict::NecessaryConditionsHold);
      CHECK_FALSE(rep.witness);
    }
  }
  const auto a = parse_operator("D^5"), b = parse_operator("D^5 + x");
  const auto ab = compare(a, b, Variant::Direct), ba = compare(b, a, Variant::Direct);
  CHECK(ab.verdict == ba.verdict);
  REQUIRE(ab.witness);
  REQUIRE(ba.witness);
  CHECK(ab.witness->kind == ba.witness->kind);
  CHECK(ab.witness->invariant == ba.witness->invariant);
}

TEST_CASE("compare witnesses") {
  SUBCASE("x-dependent potential") {
    const auto rep = compare(parse_operator("D^5"), parse_operator("D^5 + x"), Variant::Direct);
    CHECK(rep.verdict == Verdict::Distinguished);
    REQUIRE(rep.witness);
    CHECK(rep.witness->kind == "x_dependence");
    CHECK(rep.witness->invariant == "I3");
  }
  SUBCASE("shifted f4") {
    const auto rep = compare(parse_operator("x*D^4"), parse_operator("(x + 2)*D^4"), Variant::Direct);
    CHECK(rep.verdict == Verdict::Distinguished);
    REQUIRE(rep.witness);
    CHECK(rep.witness->kind == "sample_value");
    CHECK(rep.witness->invariant == "I1");
    CHECK(rep.witness->point);
  }
  SUBCASE("same seed, same report") {
    SampleOptions so;
    so.seed = 9;
    const auto r1 = compare(parse_operator("x*D^4"), parse_operator("D^5 + x"), Variant::Gauge, so);
    const auto r2 = compare(parse_operator("x*D^4"), parse_operator("D^5 + x"), Variant::Gauge, so);
    CHECK(r1.first.values == r2.first.values);
    CHECK(r1.verdict == r2.verdict);
  }
}

TEST_CASE("compare rejects the generic operator") {
  CHECK_THROWS_AS(compare(OperatorSpec::generic(), parse_operator("D^5"), Variant::Direct), Error);
}

TEST_CASE("fingerprint rank and constancy") {
  const auto inv = specialize(generic(Variant::Gauge), parse_operator("D^5"));
  const auto fp = fingerprint(inv.all(), {});
  CHECK(fp.stats.size() == 5);
  for (const auto& s : fp.stats) CHECK_FALSE(s.constant);
  // L5 = L1 and, for D^5, L2 = -(2/5) L1^2: three independent gradients.
  CHECK(fp.rank == 3);
  bool l1l5 = false;
  for (const auto& [a, b, parallel] : fp.dependence)
    if (a == "L1" && b == "L5") l1l5 = parallel;
  CHECK(l1l5);
}

TEST_CASE("sampling failure when every point is a pole") {
  const NamedExprs bad = {{"B", parse_expr("u/(k - 1)", default_resolver({"k"}))}};
  SampleOptions so;
  so.constants = {{"k", 1.0}};
  try {
    (void)fingerprint(bad, so);
    FAIL("expected SamplingFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SamplingFailure);
  }
  // An even root of a negative value is not a pole: it is reported as such.
  try {
    (void)fingerprint({{"R", P("p^(1/2)")}}, {});
    FAIL("expected NumericFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericFailure);
  }
}

TEST_CASE("incomplete reductions have no invariants") {
  RunOptions opts;
  opts.max_loops = 3;
  const auto plan = NormalizationPlan::builtin(Variant::Direct);
  const auto t = run_reduction(OperatorSpec::generic(), Variant::Direct, plan, opts);
  try {
    (void)extract_invariants(t, plan);
    FAIL("expected IncompleteReduction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteReduction);
  }
}
