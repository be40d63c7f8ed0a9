#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cartan/rational.hpp"
#include "cartan/symbol.hpp"

namespace cartan {

struct Factor {
  Symbol symbol;
  Exponent exponent;
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Power product with rational exponents, factors sorted by symbol, no zero
/// exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Symbol s, Exponent e = Exponent(1));
  static Monomial from_factors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  Exponent exponent_of(const Symbol& s) const;

  Monomial operator*(const Monomial& other) const;
  Monomial pow(const Exponent& e) const;
  Monomial inverse() const { return pow(Exponent(-1)); }

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Lexicographic comparison on exponent vectors, symbols in Symbol order.
/// Returns <0, 0, >0.
int compare(const Monomial& a, const Monomial& b);

struct Term {
  Rational coeff;
  Monomial mono;
};

/// Sparse sum of terms sorted in descending monomial order, merged, no zero
/// coefficients.
class Poly {
 public:
  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly monomial(const Rational& c, Monomial m);
  /// Sorts and merges arbitrary terms.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_single_term() const { return terms_.size() == 1; }
  std::size_t size() const { return terms_.size(); }
  const Term& leading() const { return terms_.front(); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& c, const Monomial& m) const;

  friend bool operator==(const Poly& a, const Poly& b);

 private:
  std::vector<Term> terms_;
};

class Expr;
using Bindings = std::map<Symbol, Expr>;

/// Values for numeric evaluation. Coefficient functions are looked up through
/// `coeff_fn(index, derivative_order, x)` at the bound value of x.
struct NumericEnv {
  std::array<std::optional<double>, kJetCount> jet{};
  std::array<std::optional<double>, kParamCount + 1> params{};
  std::map<Symbol, double> constants;
  std::function<double(int, int, double)> coeff_fn;

  void set(Jet j, double v) { jet[static_cast<int>(j)] = v; }
};

/// Exact rational expression numerator/denominator over Symbol, kept in
/// canonical form: monomial content cancelled between numerator and
/// denominator, all exponents nonnegative, leading denominator coefficient 1.
/// Values are immutable and cheap to copy.
class Expr {
 public:
  Expr();
  Expr(int v);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& v);  // NOLINT(google-explicit-constructor)
  Expr(Symbol s);  // NOLINT(google-explicit-constructor)

  /// Canonicalizes num/den. Throws DivisionByZero when den is zero.
  static Expr fraction(Poly num, Poly den);
  static Expr monomial(const Rational& c, const Monomial& m);

  const Poly& numerator() const { return data_->num; }
  const Poly& denominator() const { return data_->den; }

  bool is_zero() const { return data_->num.is_zero(); }
  bool is_constant() const;
  std::optional<Rational> as_rational() const;
  /// True when the expression is c * monomial (with any rational exponents).
  bool is_monomial() const;
  std::optional<std::pair<Rational, Monomial>> as_monomial() const;

  bool depends_on(const Symbol& s) const;
  bool depends_on(Symbol::Kind kind) const;
  std::set<Symbol> symbols() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  Expr pow(int n) const;
  /// Rational powers are only defined for monomial expressions.
  Expr pow(const Exponent& e) const;

  /// Mathematical equality (cross-multiplication zero test).
  friend bool operator==(const Expr& a, const Expr& b);

  Expr partial(const Symbol& s) const;
  /// Simultaneous substitution.
  Expr substitute(const Bindings& bindings) const;
  double evaluate(const NumericEnv& env) const;

  /// Deterministic printer; parse_expr(str()) reproduces the value.
  std::string str() const;

 private:
  struct Data {
    Poly num;
    Poly den;
  };
  explicit Expr(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

  std::shared_ptr<const Data> data_;
};

/// Total derivative in x: partial in x plus f_i^(k) -> f_i^(k+1) chain terms.
Expr total_x_derivative(const Expr& e);

/// Real power with the odd-root branch for negative bases.
double real_power(double base, const Exponent& e);

std::string to_string(const Poly& p);

}  // namespace cartan
