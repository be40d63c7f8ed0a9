#include "cartan/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cartan/error.hpp"

namespace cartan {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(Symbol s, Exponent e) {
  if (!e.is_zero()) factors_.push_back({s, e});
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) { return a.symbol < b.symbol; });
  Monomial m;
  for (auto& f : factors) {
    if (!m.factors_.empty() && m.factors_.back().symbol == f.symbol) {
      m.factors_.back().exponent = m.factors_.back().exponent + f.exponent;
      if (m.factors_.back().exponent.is_zero()) m.factors_.pop_back();
    } else if (!f.exponent.is_zero()) {
      m.factors_.push_back(f);
    }
  }
  return m;
}

Exponent Monomial::exponent_of(const Symbol& s) const {
  for (const auto& f : factors_)
    if (f.symbol == s) return f.exponent;
  return Exponent(0);
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto i = factors_.begin();
  auto j = other.factors_.begin();
  while (i != factors_.end() && j != other.factors_.end()) {
    if (i->symbol == j->symbol) {
      const Exponent e = i->exponent + j->exponent;
      if (!e.is_zero()) out.factors_.push_back({i->symbol, e});
      ++i;
      ++j;
    } else if (i->symbol < j->symbol) {
      out.factors_.push_back(*i++);
    } else {
      out.factors_.push_back(*j++);
    }
  }
  out.factors_.insert(out.factors_.end(), i, factors_.end());
  out.factors_.insert(out.factors_.end(), j, other.factors_.end());
  return out;
}

Monomial Monomial::pow(const Exponent& e) const {
  Monomial out;
  if (e.is_zero()) return out;
  out.factors_.reserve(factors_.size());
  for (const auto& f : factors_) out.factors_.push_back({f.symbol, f.exponent * e});
  return out;
}

int compare(const Monomial& a, const Monomial& b) {
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].symbol == fb[j].symbol) {
      if (fa[i].exponent != fb[j].exponent) return fa[i].exponent < fb[j].exponent ? -1 : 1;
      ++i;
      ++j;
    } else if (fa[i].symbol < fb[j].symbol) {
      return fa[i].exponent.is_negative() ? -1 : 1;
    } else {
      return fb[j].exponent.is_negative() ? 1 : -1;
    }
  }
  if (i < fa.size()) return fa[i].exponent.is_negative() ? -1 : 1;
  if (j < fb.size()) return fb[j].exponent.is_negative() ? 1 : -1;
  return 0;
}

// -------------------------------------------------------------------- Poly

Poly Poly::constant(const Rational& c) { return monomial(c, Monomial()); }

Poly Poly::monomial(const Rational& c, Monomial m) {
  Poly p;
  Rational q = c;
  q.canonicalize();  // gmpxx does not canonicalize mpq_class(n, d)
  if (q != 0) p.terms_.push_back({std::move(q), std::move(m)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; });
  Poly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    t.coeff.canonicalize();
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  Poly out;
  out.terms_.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() && j != o.terms_.end()) {
    const int c = compare(i->mono, j->mono);
    if (c == 0) {
      Rational sum = i->coeff + j->coeff;
      if (sum != 0) out.terms_.push_back({std::move(sum), i->mono});
      ++i;
      ++j;
    } else if (c > 0) {
      out.terms_.push_back(*i++);
    } else {
      out.terms_.push_back(*j++);
    }
  }
  out.terms_.insert(out.terms_.end(), i, terms_.end());
  out.terms_.insert(out.terms_.end(), j, o.terms_.end());
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::scaled(const Rational& c, const Monomial& m) const {
  Poly out;
  if (c == 0) return out;
  out.terms_.reserve(terms_.size());
  // Multiplying by a fixed monomial preserves lexicographic order.
  for (const auto& t : terms_) out.terms_.push_back({t.coeff * c, t.mono * m});
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return {};
  if (o.is_single_term()) return scaled(o.terms_[0].coeff, o.terms_[0].mono);
  if (is_single_term()) return o.scaled(terms_[0].coeff, terms_[0].mono);
  std::vector<Term> prods;
  prods.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) prods.push_back({a.coeff * b.coeff, a.mono * b.mono});
  return from_terms(std::move(prods));
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].coeff != b.terms_[i].coeff || !(a.terms_[i].mono == b.terms_[i].mono)) return false;
  return true;
}

namespace {

// Per-symbol minimum exponent over all terms (a symbol absent from a term
// contributes exponent 0).
std::map<Symbol, Exponent> min_exponents(const Poly& p) {
  std::map<Symbol, Exponent> mins;
  for (const auto& t : p.terms())
    for (const auto& f : t.mono.factors()) mins.emplace(f.symbol, Exponent(0));
  for (auto& [sym, e] : mins) {
    bool first = true;
    for (const auto& t : p.terms()) {
      const Exponent x = t.mono.exponent_of(sym);
      if (first || x < e) e = x;
      first = false;
    }
  }
  return mins;
}

bool has_negative_exponent(const Monomial& m) {
  return std::any_of(m.factors().begin(), m.factors().end(),
                     [](const Factor& f) { return f.exponent.is_negative(); });
}

// Exact division num/den for multi-term den; nullopt when den does not divide.
std::optional<Poly> exact_divide(const Poly& num, const Poly& den) {
  Poly rem = num;
  std::vector<Term> quotient;
  const Term& lead = den.leading();
  const Monomial lead_inv = lead.mono.inverse();
  for (int guard = 0; !rem.is_zero(); ++guard) {
    if (guard > 4096) return std::nullopt;
    const Term& r = rem.leading();
    Monomial m = r.mono * lead_inv;
    if (has_negative_exponent(m)) return std::nullopt;
    Rational c = r.coeff / lead.coeff;
    rem = rem - den.scaled(c, m);
    quotient.push_back({std::move(c), std::move(m)});
  }
  return Poly::from_terms(std::move(quotient));
}

Poly poly_partial(const Poly& p, const Symbol& s) {
  std::vector<Term> out;
  for (const auto& t : p.terms()) {
    const Exponent e = t.mono.exponent_of(s);
    if (e.is_zero()) continue;
    out.push_back({t.coeff * e.to_rational(), t.mono * Monomial(s, Exponent(-1))});
  }
  return Poly::from_terms(std::move(out));
}

Monomial monomial_lcm(const Monomial& a, const Monomial& b) {
  std::set<Symbol> syms;
  for (const auto& f : a.factors()) syms.insert(f.symbol);
  for (const auto& f : b.factors()) syms.insert(f.symbol);
  std::vector<Factor> fs;
  for (const auto& s : syms) {
    const Exponent e = std::max(a.exponent_of(s), b.exponent_of(s));
    if (!e.is_zero()) fs.push_back({s, e});
  }
  return Monomial::from_factors(std::move(fs));
}

}  // namespace

// -------------------------------------------------------------------- Expr

Expr::Expr() : data_(std::make_shared<const Data>(Data{Poly(), Poly::constant(1)})) {}

Expr::Expr(int v) : Expr(Rational(v)) {}

Expr::Expr(const Rational& v) : data_(std::make_shared<const Data>(Data{Poly::constant(v), Poly::constant(1)})) {}

Expr::Expr(Symbol s)
    : data_(std::make_shared<const Data>(Data{Poly::monomial(1, Monomial(s)), Poly::constant(1)})) {}

Expr Expr::monomial(const Rational& c, const Monomial& m) {
  return fraction(Poly::monomial(c, m), Poly::constant(1));
}

Expr Expr::fraction(Poly num, Poly den) {
  if (den.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by an expression that is identically zero");
  if (num.is_zero()) return Expr();

  if (den.is_single_term()) {
    const Term& d = den.leading();
    num = num.scaled(1 / d.coeff, d.mono.inverse());
    den = Poly::constant(1);
  } else if (auto q = exact_divide(num, den)) {
    num = std::move(*q);
    den = Poly::constant(1);
  }

  // Cancel common monomial content and clear negative exponents.
  const auto num_min = min_exponents(num);
  const auto den_min = min_exponents(den);
  std::vector<Factor> shift;
  for (const auto& [s, e] : num_min) {
    auto it = den_min.find(s);
    const Exponent other = it == den_min.end() ? Exponent(0) : it->second;
    const Exponent c = std::min(e, other);
    if (!c.is_zero()) shift.push_back({s, c});
  }
  for (const auto& [s, e] : den_min) {
    if (num_min.count(s)) continue;
    const Exponent c = std::min(e, Exponent(0));
    if (!c.is_zero()) shift.push_back({s, c});
  }
  if (!shift.empty()) {
    const Monomial inv = Monomial::from_factors(std::move(shift)).inverse();
    num = num.scaled(1, inv);
    den = den.scaled(1, inv);
  }

  const Rational lc = den.leading().coeff;
  if (lc != 1) {
    const Rational inv = 1 / lc;
    num = num.scaled(inv, Monomial());
    den = den.scaled(inv, Monomial());
  }
  return Expr(std::make_shared<const Data>(Data{std::move(num), std::move(den)}));
}

bool Expr::is_constant() const {
  return data_->den.is_single_term() && data_->den.leading().mono.is_one() &&
         (data_->num.is_zero() || (data_->num.is_single_term() && data_->num.leading().mono.is_one()));
}

std::optional<Rational> Expr::as_rational() const {
  if (!is_constant()) return std::nullopt;
  if (is_zero()) return Rational(0);
  return data_->num.leading().coeff / data_->den.leading().coeff;
}

bool Expr::is_monomial() const { return data_->num.size() <= 1 && data_->den.is_single_term(); }

std::optional<std::pair<Rational, Monomial>> Expr::as_monomial() const {
  if (!is_monomial()) return std::nullopt;
  if (is_zero()) return std::make_pair(Rational(0), Monomial());
  const Term& n = data_->num.leading();
  const Term& d = data_->den.leading();
  return std::make_pair(Rational(n.coeff / d.coeff), n.mono * d.mono.inverse());
}

bool Expr::depends_on(const Symbol& s) const {
  for (const Poly* p : {&data_->num, &data_->den})
    for (const auto& t : p->terms())
      if (!t.mono.exponent_of(s).is_zero()) return true;
  return false;
}

bool Expr::depends_on(Symbol::Kind kind) const {
  for (const Poly* p : {&data_->num, &data_->den})
    for (const auto& t : p->terms())
      for (const auto& f : t.mono.factors())
        if (f.symbol.kind() == kind) return true;
  return false;
}

std::set<Symbol> Expr::symbols() const {
  std::set<Symbol> out;
  for (const Poly* p : {&data_->num, &data_->den})
    for (const auto& t : p->terms())
      for (const auto& f : t.mono.factors()) out.insert(f.symbol);
  return out;
}

Expr Expr::operator-() const { return Expr(std::make_shared<const Data>(Data{-data_->num, data_->den})); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Poly& da = a.denominator();
  const Poly& db = b.denominator();
  if (da == db) return Expr::fraction(a.numerator() + b.numerator(), da);
  if (da.is_single_term() && db.is_single_term()) {
    const Monomial l = monomial_lcm(da.leading().mono, db.leading().mono);
    Poly num = a.numerator().scaled(1, l * da.leading().mono.inverse()) +
               b.numerator().scaled(1, l * db.leading().mono.inverse());
    return Expr::fraction(std::move(num), Poly::monomial(1, l));
  }
  return Expr::fraction(a.numerator() * db + b.numerator() * da, da * db);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  return Expr::fraction(a.numerator() * b.numerator(), a.denominator() * b.denominator());
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw Error(ErrorCode::DivisionByZero, "division by zero expression");
  if (a.is_zero()) return Expr();
  return Expr::fraction(a.numerator() * b.denominator(), a.denominator() * b.numerator());
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.data_ == b.data_) return true;
  if (a.denominator() == b.denominator()) return a.numerator() == b.numerator();
  // Canonical forms with monomial denominators are unique.
  if (a.denominator().is_single_term() && b.denominator().is_single_term()) return false;
  return (a.numerator() * b.denominator() - b.numerator() * a.denominator()).is_zero();
}

Expr Expr::pow(int n) const {
  if (n == 0) return Expr(1);
  if (n < 0) return Expr(1) / pow(-n);
  Expr result(1);
  Expr base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Expr Expr::pow(const Exponent& e) const {
  if (e.is_integer()) return pow(static_cast<int>(e.num()));
  auto m = as_monomial();
  if (!m) throw Error(ErrorCode::Unsupported, "rational power of a non-monomial expression: (" + str() + ")^(" + e.str() + ")");
  if (m->first == 0) {
    if (e.is_negative()) throw Error(ErrorCode::DivisionByZero, "negative power of zero");
    return Expr();
  }
  Rational c;
  if (!exact_rational_power(m->first, e, c))
    throw Error(ErrorCode::Unsupported, "coefficient " + to_string(m->first) + " has no exact power " + e.str());
  return monomial(c, m->second.pow(e));
}

Expr Expr::partial(const Symbol& s) const {
  const Poly dn = poly_partial(data_->num, s);
  const Poly dd = poly_partial(data_->den, s);
  if (dd.is_zero()) {
    if (dn.is_zero()) return Expr();
    return fraction(dn, data_->den);
  }
  return fraction(dn * data_->den - data_->num * dd, data_->den * data_->den);
}

namespace {

Expr sum_exprs(const std::vector<Expr>& parts) {
  if (parts.empty()) return Expr();
  bool all_monomial = true;
  for (const auto& p : parts) all_monomial = all_monomial && p.denominator().is_single_term();
  if (!all_monomial) {
    Expr acc;
    for (const auto& p : parts) acc += p;
    return acc;
  }
  Monomial l;
  for (const auto& p : parts) l = monomial_lcm(l, p.denominator().leading().mono);
  std::vector<Term> terms;
  for (const auto& p : parts) {
    const Monomial scale = l * p.denominator().leading().mono.inverse();
    for (const auto& t : p.numerator().terms()) terms.push_back({t.coeff, t.mono * scale});
  }
  return Expr::fraction(Poly::from_terms(std::move(terms)), Poly::monomial(1, l));
}

Expr substitute_poly(const Poly& p, const Bindings& b, std::map<std::pair<Symbol, Exponent>, Expr>& cache) {
  std::vector<Expr> parts;
  parts.reserve(p.size());
  for (const auto& t : p.terms()) {
    std::vector<Factor> kept;
    Expr bound(t.coeff);
    for (const auto& f : t.mono.factors()) {
      auto it = b.find(f.symbol);
      if (it == b.end()) {
        kept.push_back(f);
        continue;
      }
      auto key = std::make_pair(f.symbol, f.exponent);
      auto c = cache.find(key);
      if (c == cache.end()) c = cache.emplace(key, it->second.pow(f.exponent)).first;
      bound = bound * c->second;
    }
    parts.push_back(bound * Expr::monomial(1, Monomial::from_factors(std::move(kept))));
  }
  return sum_exprs(parts);
}

}  // namespace

Expr Expr::substitute(const Bindings& bindings) const {
  if (bindings.empty()) return *this;
  bool touched = false;
  for (const auto& s : symbols())
    if (bindings.count(s)) {
      touched = true;
      break;
    }
  if (!touched) return *this;
  std::map<std::pair<Symbol, Exponent>, Expr> cache;
  const Expr n = substitute_poly(data_->num, bindings, cache);
  const Expr d = substitute_poly(data_->den, bindings, cache);
  if (d.is_zero()) throw Error(ErrorCode::DivisionByZero, "substitution makes the denominator of " + str() + " vanish");
  return n / d;
}

double real_power(double base, const Exponent& e) {
  if (e.is_integer()) {
    if (base == 0.0 && e.is_negative()) throw Error(ErrorCode::PoleAtPoint, "negative power of zero");
    return std::pow(base, static_cast<double>(e.num()));
  }
  if (base == 0.0) {
    if (e.is_negative()) throw Error(ErrorCode::PoleAtPoint, "negative power of zero");
    return 0.0;
  }
  if (base > 0.0) return std::pow(base, e.to_double());
  if (e.den() % 2 == 0) throw Error(ErrorCode::NumericFailure, "even root of a negative number");
  const double mag = std::pow(-base, e.to_double());
  return (e.num() % 2 == 0) ? mag : -mag;
}

namespace {

double symbol_value(const Symbol& s, const NumericEnv& env) {
  switch (s.kind()) {
    case Symbol::Kind::JetCoord:
      if (auto v = env.jet[s.index()]) return *v;
      break;
    case Symbol::Kind::GroupParam:
      if (auto v = env.params[s.index()]) return *v;
      break;
    case Symbol::Kind::Const:
      if (auto it = env.constants.find(s); it != env.constants.end()) return it->second;
      break;
    case Symbol::Kind::CoeffFn:
      if (env.coeff_fn && env.jet[0]) return env.coeff_fn(s.index(), s.order(), *env.jet[0]);
      break;
  }
  throw Error(ErrorCode::UnboundSymbol, "no numeric binding for symbol " + s.name());
}

double evaluate_poly(const Poly& p, const NumericEnv& env) {
  double sum = 0.0;
  for (const auto& t : p.terms()) {
    double v = t.coeff.get_d();
    for (const auto& f : t.mono.factors()) v *= real_power(symbol_value(f.symbol, env), f.exponent);
    sum += v;
  }
  return sum;
}

}  // namespace

double Expr::evaluate(const NumericEnv& env) const {
  const double d = evaluate_poly(data_->den, env);
  if (d == 0.0) throw Error(ErrorCode::PoleAtPoint, "denominator of " + str() + " vanishes at the point");
  return evaluate_poly(data_->num, env) / d;
}

Expr total_x_derivative(const Expr& e) {
  Expr out = e.partial(Symbol::jet(Jet::x));
  for (const auto& s : e.symbols())
    if (s.is(Symbol::Kind::CoeffFn)) out += e.partial(s) * Expr(s.bumped());
  return out;
}

// ----------------------------------------------------------------- printing

namespace {

std::string exponent_suffix(const Exponent& e) {
  if (e == Exponent(1)) return "";
  if (e.is_integer() && !e.is_negative()) return "^" + e.str();
  return "^(" + e.str() + ")";
}

std::string monomial_str(const Monomial& m) {
  std::string out;
  for (const auto& f : m.factors()) {
    if (!out.empty()) out += "*";
    out += f.symbol.name() + exponent_suffix(f.exponent);
  }
  return out;
}

// Prints |coeff|*mono without sign.
std::string term_body(const Rational& abs_coeff, const Monomial& m) {
  if (m.is_one()) return to_string(abs_coeff);
  if (abs_coeff == 1) return monomial_str(m);
  return to_string(abs_coeff) + "*" + monomial_str(m);
}

}  // namespace

std::string to_string(const Poly& p) {
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
    out += term_body(mag, t.mono);
    first = false;
  }
  return out;
}

namespace {
std::string scaled_str(const Poly& n, const Poly& d);
}  // namespace

std::string Expr::str() const {
  const Poly& n = data_->num;
  const Poly& d = data_->den;
  const bool den_one = d.is_single_term() && d.leading().mono.is_one() && d.leading().coeff == 1;
  if (den_one) return to_string(n);
  // Clear coefficient denominators for display: (f4*u + 3/5*p)/u is shown as
  // (5*f4*u + 3*p)/(5*u).
  mpz_class l = 1;
  for (const Poly* poly : {&data_->num, &data_->den})
    for (const auto& t : poly->terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  if (l != 1) return scaled_str(n.scaled(Rational(l), Monomial()), d.scaled(Rational(l), Monomial()));
  return scaled_str(n, d);
}

namespace {

std::string scaled_str(const Poly& n, const Poly& d) {
  std::string num_s;
  if (n.is_single_term()) {
    num_s = to_string(n);
    if (n.leading().coeff.get_den() != 1) num_s = "(" + num_s + ")";
  } else if (n.leading().coeff < 0) {
    num_s = "-(" + to_string(-n) + ")";
  } else {
    num_s = "(" + to_string(n) + ")";
  }
  std::string den_s = to_string(d);
  const bool den_atomic = d.is_single_term() && d.leading().coeff == 1 && d.leading().mono.factors().size() == 1;
  if (!den_atomic) den_s = "(" + den_s + ")";
  return num_s + "/" + den_s;
}

}  // namespace

}  // namespace cartan
