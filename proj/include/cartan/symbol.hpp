#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cartan {

/// Jet-space coordinates on J^5, in chart order.
enum class Jet : std::uint8_t { x = 0, u, p, q, r, s, t };
inline constexpr int kJetCount = 7;
inline constexpr int kParamCount = 15;
inline constexpr int kCoeffFnCount = 5;

/// A variable of the coefficient field.
///
/// Kinds are closed sets except for constants: jet coordinates are x,u,p,q,r,s,t;
/// group parameters a1..a15; coefficient functions f0..f4 together with their
/// formal x-derivatives (f4' is f4 with order 1). Constants are declared by name
/// and interned in a process-wide, append-only table.
class Symbol {
 public:
  enum class Kind : std::uint8_t { CoeffFn = 0, Const = 1, GroupParam = 2, JetCoord = 3 };

  static Symbol jet(Jet j);
  static Symbol param(int index);  // 1..15
  static Symbol coeff(int index, int order = 0);  // f0..f4
  static Symbol constant(std::string_view name);
  /// The reserved constant "D" used while parsing operator text.
  static Symbol operator_d();

  /// Resolves x,u,..,t / a1..a15 / f0..f4 with trailing primes. Anything else
  /// is not a builtin and yields nullopt.
  static std::optional<Symbol> builtin(std::string_view name);
  static bool is_valid_constant_name(std::string_view name);

  Kind kind() const { return kind_; }
  int index() const { return index_; }
  int order() const { return order_; }
  std::string name() const;

  bool is(Kind k) const { return kind_ == k; }
  Jet jet_coord() const { return static_cast<Jet>(index_); }

  /// f_i^(k) -> f_i^(k+1). Only valid on coefficient-function symbols.
  Symbol bumped() const;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.kind_ == b.kind_ && a.index_ == b.index_ && a.order_ == b.order_;
  }
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b);

 private:
  Symbol(Kind k, std::uint16_t index, std::uint16_t order) : kind_(k), index_(index), order_(order) {}

  Kind kind_;
  std::uint16_t index_;
  std::uint16_t order_;
};

std::string_view jet_name(Jet j);

}  // namespace cartan
