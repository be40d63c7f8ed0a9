#include <doctest.h>

#include <random>

#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"
#include "cartan/operator_text.hpp"

using namespace cartan;

namespace {

const std::set<std::string> kConsts = {"q0", "lam", "a"};

Expr P(std::string_view s) { return parse_expr(s, default_resolver(kConsts)); }

ErrorCode code_of(std::string_view text, const std::set<std::string>& c = {}) {
  try {
    (void)parse_operator(text, c);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error for " << text);
  return ErrorCode::InvalidArgument;
}

std::string message_of(std::string_view text) {
  try {
    (void)parse_operator(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("operator text examples") {
  const auto ex = parse_operator("D^5 + (q0 - lam*a^5)", kConsts);
  CHECK(ex.f[0] == P("q0 - lam*a^5"));
  for (int i = 1; i < 5; ++i) CHECK(ex.f[i].is_zero());
  CHECK(ex.constants == kConsts);

  const auto zero = parse_operator("D^5");
  for (const auto& f : zero.f) CHECK(f.is_zero());

  const auto mixed = parse_operator("x^2*D^3 + 3*D + 1");
  CHECK(mixed.f[3] == P("x^2"));
  CHECK(mixed.f[1] == Expr(3));
  CHECK(mixed.f[0] == Expr(1));
  CHECK(mixed.f[2].is_zero());
  CHECK(mixed.f[4].is_zero());

  // Like powers collect; D^0 is the potential.
  const auto collected = parse_operator("x*D^4 + 2*D^4 - D^0 + 1/2");
  CHECK(collected.f[4] == P("x + 2"));
  CHECK(collected.f[0] == P("-1/2"));
  CHECK_FALSE(collected.is_generic());
}

TEST_CASE("operator text errors") {
  CHECK(code_of("D^6") == ErrorCode::ParseError);
  CHECK(code_of("x*D^4 + D^7") == ErrorCode::ParseError);
  CHECK(code_of("2*D^5 + x") == ErrorCode::NotMonic);
  CHECK(code_of("x*D^5") == ErrorCode::NotMonic);
  CHECK(code_of("D^5 + y") == ErrorCode::ParseError);
  CHECK(code_of("D^5 + q0") == ErrorCode::ParseError);  // undeclared constant
  CHECK(code_of("D^5 + 1/D") == ErrorCode::ParseError);
  CHECK(code_of("D^5 + (x") == ErrorCode::ParseError);
  CHECK(code_of("D^5 + u") == ErrorCode::ParseError);   // jet coordinates are not coefficients
  CHECK(code_of("D^5 + f0") == ErrorCode::ParseError);  // nor formal coefficients
  CHECK(message_of("D^5 + x*)").find("position") != std::string::npos);
  CHECK(message_of("D^9").find("position") != std::string::npos);
}

TEST_CASE("printing") {
  CHECK(print_operator(parse_operator("D^5")) == "D^5");
  const std::string s = print_operator(parse_operator("x^2*D^3 + 3*D + 1"));
  CHECK(s.rfind("D^5", 0) == 0);
  CHECK(parse_operator(s) == parse_operator("x^2*D^3 + 3*D + 1"));
}

TEST_CASE("property: print and parse round trip") {
  std::mt19937_64 rng(8);
  const char* atoms[] = {"x", "q0", "lam", "a", "2", "1/3", "-5", "(x + 1)", "(lam - x)"};
  auto atom = [&] { return std::string(atoms[std::uniform_int_distribution<int>(0, 8)(rng)]); };
  auto coeff = [&] {
    std::string c = atom();
    const int n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int k = 0; k < n; ++k) {
      const int op = std::uniform_int_distribution<int>(0, 3)(rng);
      c = "(" + c + (op == 0 ? " + " : op == 1 ? " - " : " * ") + atom() + ")";
      if (op == 3) c += "^2";
    }
    return c;
  };
  for (int n = 0; n < 200; ++n) {
    std::string text = "D^5";
    for (int k = 4; k >= 0; --k)
      if (std::uniform_int_distribution<int>(0, 2)(rng)) text += " + " + coeff() + (k ? "*D^" + std::to_string(k) : "");
    INFO(text);
    const auto op = parse_operator(text, kConsts);
    const std::string printed = print_operator(op);
    const auto again = parse_operator(printed, kConsts);
    CHECK(again == op);
    CHECK(print_operator(again) == printed);
  }
}
