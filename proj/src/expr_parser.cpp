#include "cartan/expr_parser.hpp"

#include <cctype>

#include "cartan/error.hpp"

namespace cartan {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolResolver& resolve) : text_(text), resolve_(resolve) {}

  Expr parse() {
    Expr e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "parse error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr acc = product();
    for (;;) {
      if (accept('+'))
        acc = acc + product();
      else if (accept('-'))
        acc = acc - product();
      else
        return acc;
    }
  }

  Expr product() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr d = unary();
        if (d.is_zero()) {
          pos_ = at;
          throw Error(ErrorCode::DivisionByZero, "division by zero at position " + std::to_string(at));
        }
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    Expr ex = unary();
    auto q = ex.as_rational();
    if (!q) {
      pos_ = at;
      fail("exponent must be a rational constant");
    }
    mpz_class num = q->get_num();
    mpz_class den = q->get_den();
    if (!num.fits_slong_p() || !den.fits_slong_p()) fail("exponent too large");
    return base.pow(Exponent(num.get_si(), den.get_si()));
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(start, pos_ - start));
    Rational value(mpz_class(digits, 10));
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      const std::size_t fstart = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string frac(text_.substr(fstart, pos_ - fstart));
      if (!frac.empty()) {
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        value += Rational(mpz_class(frac, 10), scale);
        value.canonicalize();
      }
    }
    return Expr(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    while (pos_ < text_.size() && text_[pos_] == '\'') ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    auto sym = resolve_(name);
    if (!sym) {
      pos_ = start;
      fail("unknown symbol '" + std::string(name) + "'");
    }
    return Expr(*sym);
  }

  std::string_view text_;
  const SymbolResolver& resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolResolver default_resolver(const std::set<std::string>& constants) {
  return [constants](std::string_view name) -> std::optional<Symbol> {
    if (auto b = Symbol::builtin(name)) return b;
    if (constants.count(std::string(name))) return Symbol::constant(name);
    return std::nullopt;
  };
}

Expr parse_expr(std::string_view text, const SymbolResolver& resolve) { return Parser(text, resolve).parse(); }

}  // namespace cartan
