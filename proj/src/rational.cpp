#include "cartan/rational.hpp"

#include <numeric>

#include "cartan/error.hpp"

namespace cartan {

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw Error(ErrorCode::ParseError, "invalid rational '" + text + "'");
  q.canonicalize();
  if (q.get_den() == 0) throw Error(ErrorCode::DivisionByZero, "rational with zero denominator");
  return q;
}

Exponent::Exponent(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::DivisionByZero, "exponent with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
  if (num_ == 0) den_ = 1;
  if (den_ > kMaxDenominator)
    throw Error(ErrorCode::Unsupported, "exponent denominator exceeds limit: " + str());
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  const std::int64_t l = std::lcm(a.den_, b.den_);
  return Exponent(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
}

Exponent operator*(const Exponent& a, const Exponent& b) {
  return Exponent(a.num_ * b.num_, a.den_ * b.den_);
}

std::strong_ordering operator<=>(const Exponent& a, const Exponent& b) {
  // Denominators are tiny, so the cross products cannot overflow.
  return a.num_ * b.den_ <=> b.num_ * a.den_;
}

std::string Exponent::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

namespace {

bool exact_root(const mpz_class& value, unsigned long degree, mpz_class& out) {
  if (value < 0) {
    if (degree % 2 == 0) return false;
    mpz_class pos = -value;
    if (!exact_root(pos, degree, out)) return false;
    out = -out;
    return true;
  }
  return mpz_root(out.get_mpz_t(), value.get_mpz_t(), degree) != 0;
}

}  // namespace

bool exact_rational_power(const Rational& base, const Exponent& e, Rational& out) {
  if (base == 0) {
    if (e.num() <= 0) return false;
    out = 0;
    return true;
  }
  mpz_class num_root;
  mpz_class den_root;
  const auto degree = static_cast<unsigned long>(e.den());
  if (!exact_root(base.get_num(), degree, num_root)) return false;
  if (!exact_root(base.get_den(), degree, den_root)) return false;
  Rational root(num_root, den_root);
  root.canonicalize();
  const std::int64_t n = e.num() < 0 ? -e.num() : e.num();
  Rational result = 1;
  for (std::int64_t i = 0; i < n; ++i) result *= root;
  if (e.num() < 0) result = 1 / result;
  out = result;
  return true;
}

}  // namespace cartan
