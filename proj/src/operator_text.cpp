#include "cartan/operator_text.hpp"

#include <regex>

#include "cartan/error.hpp"
#include "cartan/expr_parser.hpp"

namespace cartan {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Catches D^6 and friends before parsing so the error can point at them.
void check_powers(std::string_view text) {
  static const std::regex pow_re(R"((^|[^A-Za-z0-9_'])D\s*\^\s*\(?\s*(-?[0-9]+))");
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pow_re); it != std::sregex_iterator(); ++it) {
    const int k = std::stoi((*it)[2].str());
    if (k > 5 || k < 0)
      fail(ErrorCode::ParseError, "parse error at position " + std::to_string((*it).position(2)) +
                                      ": power of D must be between 0 and 5, got " + std::to_string(k));
  }
}

}  // namespace

OperatorSpec parse_operator(std::string_view text, const std::set<std::string>& constants) {
  for (const auto& c : constants)
    if (!Symbol::is_valid_constant_name(c)) fail(ErrorCode::InvalidArgument, "invalid constant name '" + c + "'");
  check_powers(text);

  const Symbol d_sym = Symbol::operator_d();
  const Symbol x_sym = Symbol::jet(Jet::x);
  auto resolve = [&](std::string_view name) -> std::optional<Symbol> {
    if (name == "D") return d_sym;
    if (name == "x") return x_sym;
    if (constants.count(std::string(name))) return Symbol::constant(name);
    return std::nullopt;
  };
  const Expr e = parse_expr(text, resolve);

  for (const auto& t : e.denominator().terms())
    if (!t.mono.exponent_of(d_sym).is_zero()) fail(ErrorCode::ParseError, "D may not appear in a denominator");

  std::array<std::vector<Term>, 6> by_power;
  for (const auto& t : e.numerator().terms()) {
    const Exponent k = t.mono.exponent_of(d_sym);
    if (k.den() != 1 || k.num() < 0 || k.num() > 5)
      fail(ErrorCode::ParseError, "power of D must be an integer between 0 and 5");
    std::vector<Factor> rest;
    for (const auto& f : t.mono.factors())
      if (!(f.symbol == d_sym)) rest.push_back(f);
    by_power[static_cast<std::size_t>(k.num())].push_back({t.coeff, Monomial::from_factors(std::move(rest))});
  }

  OperatorSpec op;
  op.constants = constants;
  for (int k = 0; k < 5; ++k) op.f[k] = Expr::fraction(Poly::from_terms(by_power[k]), e.denominator());
  if (!by_power[5].empty()) {
    const Expr lead = Expr::fraction(Poly::from_terms(by_power[5]), e.denominator());
    if (!(lead == Expr(1))) fail(ErrorCode::NotMonic, "coefficient of D^5 must be 1, got " + lead.str());
  }
  return op;
}

std::string print_operator(const OperatorSpec& op) {
  std::string out = "D^5";
  for (int k = 4; k >= 0; --k) {
    const Expr& c = op.f[k];
    if (c.is_zero()) continue;
    std::string cs = c.str();
    const bool bare = cs.find_first_of(" /") == std::string::npos && cs[0] != '-';
    if (!bare) cs = "(" + cs + ")";
    out += " + ";
    if (k == 0) {
      out += cs;
    } else {
      if (!(c == Expr(1))) out += cs + "*";
      out += k == 1 ? "D" : "D^" + std::to_string(k);
    }
  }
  return out;
}

}  // namespace cartan
