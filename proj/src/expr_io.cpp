#include "cartan/expr_io.hpp"

#include <array>

#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"

namespace cartan {

namespace {

nlohmann::json poly_json(const Poly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : t.mono.factors()) factors.push_back({{"symbol", f.symbol.name()}, {"exp", f.exponent.str()}});
    terms.push_back({{"coeff", to_string(t.coeff)}, {"factors", factors}});
  }
  return terms;
}

Poly poly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of terms");
  std::vector<Term> terms;
  for (const auto& t : j) {
    std::vector<Factor> factors;
    for (const auto& f : t.at("factors")) {
      const std::string name = f.at("symbol").get<std::string>();
      auto sym = Symbol::builtin(name);
      if (!sym) sym = Symbol::constant(name);
      const Rational e = parse_rational(f.at("exp").get<std::string>());
      factors.push_back({*sym, Exponent(e.get_num().get_si(), e.get_den().get_si())});
    }
    terms.push_back({parse_rational(t.at("coeff").get<std::string>()), Monomial::from_factors(std::move(factors))});
  }
  return Poly::from_terms(std::move(terms));
}

std::string rational_latex(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

std::string monomial_latex(const Monomial& m) {
  std::string out;
  for (const auto& f : m.factors()) {
    if (!out.empty()) out += " ";
    std::string base = to_latex(f.symbol);
    if (f.exponent == Exponent(1)) {
      out += base;
      continue;
    }
    // Primed symbols need grouping before a superscript.
    if (base.find('\'') != std::string::npos) base = "\\left(" + base + "\\right)";
    out += base + "^{" + f.exponent.str() + "}";
  }
  return out;
}

std::string poly_latex(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool neg = t.coeff < 0;
    const Rational mag = neg ? Rational(-t.coeff) : t.coeff;
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (t.mono.is_one())
      out += rational_latex(mag);
    else if (mag == 1)
      out += monomial_latex(t.mono);
    else
      out += rational_latex(mag) + " " + monomial_latex(t.mono);
    first = false;
  }
  return out;
}

constexpr std::array<std::string_view, 16> kGreek = {"alpha", "beta",  "gamma", "delta", "epsilon", "kappa",
                                                     "lambda", "mu",   "nu",    "rho",   "sigma",   "tau",
                                                     "phi",    "chi",  "psi",   "omega"};

}  // namespace

nlohmann::json to_json(const Expr& e) {
  return {{"numerator", poly_json(e.numerator())}, {"denominator", poly_json(e.denominator())}};
}

Expr expr_from_json(const nlohmann::json& j) {
  return Expr::fraction(poly_from_json(j.at("numerator")), poly_from_json(j.at("denominator")));
}

std::string to_latex(const Symbol& s) {
  switch (s.kind()) {
    case Symbol::Kind::JetCoord:
      return s.name();
    case Symbol::Kind::GroupParam:
      return "a_{" + std::to_string(s.index()) + "}";
    case Symbol::Kind::CoeffFn:
      return "f_{" + std::to_string(s.index()) + "}" + std::string(s.order(), '\'');
    case Symbol::Kind::Const: {
      const std::string n = s.name();
      if (n == "lam") return "\\lambda";
      for (auto g : kGreek)
        if (n == g) return "\\" + n;
      if (n.size() == 1) return n;
      return "\\mathrm{" + n + "}";
    }
  }
  return s.name();
}

std::string to_latex(const Expr& e) {
  Poly n = e.numerator();
  Poly d = e.denominator();
  if (d.is_single_term() && d.leading().mono.is_one() && d.leading().coeff == 1) return poly_latex(n);
  // Integer coefficients inside the fraction, as in the text printer.
  mpz_class l = 1;
  for (const Poly* poly : {&n, &d})
    for (const auto& t : poly->terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  if (l != 1) {
    n = n.scaled(Rational(l), Monomial());
    d = d.scaled(Rational(l), Monomial());
  }
  if (n.leading().coeff < 0) return "-\\frac{" + poly_latex(-n) + "}{" + poly_latex(d) + "}";
  return "\\frac{" + poly_latex(n) + "}{" + poly_latex(d) + "}";
}

}  // namespace cartan
