#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace cartan {

/// Exact coefficient field.
using Rational = mpq_class;

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

/// Small exact rational used for symbol exponents. Denominators are bounded by
/// kMaxDenominator; the engine only ever needs fifth roots.
class Exponent {
 public:
  static constexpr std::int64_t kMaxDenominator = 20;

  constexpr Exponent() = default;
  Exponent(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  Rational to_rational() const { return Rational(num_, den_); }

  Exponent operator-() const { return Exponent(-num_, den_); }
  friend Exponent operator+(const Exponent& a, const Exponent& b);
  friend Exponent operator-(const Exponent& a, const Exponent& b) { return a + (-b); }
  friend Exponent operator*(const Exponent& a, const Exponent& b);

  friend bool operator==(const Exponent& a, const Exponent& b) = default;
  friend std::strong_ordering operator<=>(const Exponent& a, const Exponent& b);

  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Exact rational power of a rational number, if it exists (q^(n/d) with an
/// exact d-th root). Negative bases take the real root for odd d.
bool exact_rational_power(const Rational& base, const Exponent& e, Rational& out);

}  // namespace cartan
