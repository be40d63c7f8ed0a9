#include "cartan/forms.hpp"

#include <algorithm>
#include <set>

#include "cartan/error.hpp"

namespace cartan {

namespace {

void require_same(const ContextPtr& a, const ContextPtr& b) {
  if (a != b) throw Error(ErrorCode::BasisMismatch, "forms over different bases: " + a->name() + " vs " + b->name());
}

void require_coordinate(const ContextPtr& c) {
  if (c != BasisContext::coordinate())
    throw Error(ErrorCode::NeedsCoordinateBasis, "exterior derivative needs the coordinate basis, got " + c->name());
}

OneForm differential_impl(const Expr& f, bool with_params) {
  OneForm out(BasisContext::coordinate());
  for (const Symbol& s : f.symbols()) {
    switch (s.kind()) {
      case Symbol::Kind::JetCoord:
        out.add(coord_index(s.jet_coord()), f.partial(s));
        break;
      case Symbol::Kind::GroupParam:
        if (with_params) out.add(coord_index_param(s.index()), f.partial(s));
        break;
      case Symbol::Kind::CoeffFn:
        out.add(coord_index(Jet::x), f.partial(s) * Expr(s.bumped()));
        break;
      case Symbol::Kind::Const:
        break;
    }
  }
  return out;
}

TwoForm derivative_impl(const OneForm& w, bool with_params) {
  require_coordinate(w.context());
  TwoForm out(w.context());
  for (const auto& [b, c] : w.terms()) {
    const OneForm dc = differential_impl(c, with_params);
    for (const auto& [a, e] : dc.terms()) out.add(a, b, e);
  }
  return out;
}

}  // namespace

BasisContext::BasisContext(std::string name, std::vector<std::string> labels)
    : name_(std::move(name)), labels_(std::move(labels)) {
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw Error(ErrorCode::InvalidArgument, "duplicate basis labels");
}

std::shared_ptr<const BasisContext> BasisContext::coordinate() {
  static const auto ctx = [] {
    std::vector<std::string> l;
    for (int j = 0; j < kJetCount; ++j) l.push_back("d" + std::string(jet_name(static_cast<Jet>(j))));
    for (int a = 1; a <= kParamCount; ++a) l.push_back("da" + std::to_string(a));
    return std::make_shared<const BasisContext>("coordinate", std::move(l));
  }();
  return ctx;
}

std::shared_ptr<const BasisContext> BasisContext::abstract() {
  static const auto ctx = [] {
    std::vector<std::string> l;
    for (int i = 1; i <= 7; ++i) l.push_back("theta" + std::to_string(i));
    for (int a = 1; a <= kParamCount; ++a) l.push_back("alpha" + std::to_string(a));
    return std::make_shared<const BasisContext>("abstract", std::move(l));
  }();
  return ctx;
}

int BasisContext::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::BasisMismatch, "unknown covector '" + label + "' in " + name_);
  return static_cast<int>(it - labels_.begin());
}

// ---------------------------------------------------------------------------
// OneForm

OneForm OneForm::basis(ContextPtr ctx, int index) {
  OneForm f(std::move(ctx));
  f.add(index, Expr(1));
  return f;
}

Expr OneForm::coeff(int index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? Expr(0) : it->second;
}

void OneForm::add(int index, const Expr& c) {
  if (index < 0 || static_cast<std::size_t>(index) >= ctx_->size())
    throw Error(ErrorCode::BasisMismatch, "covector index out of range");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(index, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

OneForm OneForm::operator+(const OneForm& o) const {
  require_same(ctx_, o.ctx_);
  OneForm out = *this;
  for (const auto& [i, c] : o.terms_) out.add(i, c);
  return out;
}

OneForm OneForm::operator-(const OneForm& o) const { return *this + Expr(-1) * o; }

OneForm operator*(const Expr& c, const OneForm& f) {
  OneForm out(f.ctx_);
  if (c.is_zero()) return out;
  for (const auto& [i, e] : f.terms_) out.add(i, c * e);
  return out;
}

bool operator==(const OneForm& a, const OneForm& b) {
  if (a.ctx_ != b.ctx_) return false;
  return (a - b).is_zero();
}

OneForm OneForm::substitute(const Bindings& b) const {
  OneForm out(ctx_);
  for (const auto& [i, c] : terms_) out.add(i, c.substitute(b));
  return out;
}

std::string OneForm::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [i, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ")*" + ctx_->label(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// TwoForm

Expr TwoForm::coeff(int j, int k) const {
  if (j == k) return Expr(0);
  const bool flip = j > k;
  auto it = terms_.find(flip ? std::make_pair(k, j) : std::make_pair(j, k));
  if (it == terms_.end()) return Expr(0);
  return flip ? -it->second : it->second;
}

void TwoForm::add(int j, int k, const Expr& c) {
  if (j == k || c.is_zero()) return;
  const int n = static_cast<int>(ctx_->size());
  if (j < 0 || k < 0 || j >= n || k >= n) throw Error(ErrorCode::BasisMismatch, "covector index out of range");
  const bool flip = j > k;
  const auto key = flip ? std::make_pair(k, j) : std::make_pair(j, k);
  const Expr v = flip ? -c : c;
  auto [it, inserted] = terms_.try_emplace(key, v);
  if (inserted) return;
  it->second += v;
  if (it->second.is_zero()) terms_.erase(it);
}

TwoForm TwoForm::operator+(const TwoForm& o) const {
  require_same(ctx_, o.ctx_);
  TwoForm out = *this;
  for (const auto& [jk, c] : o.terms_) out.add(jk.first, jk.second, c);
  return out;
}

TwoForm TwoForm::operator-(const TwoForm& o) const { return *this + Expr(-1) * o; }

TwoForm operator*(const Expr& c, const TwoForm& f) {
  TwoForm out(f.ctx_);
  if (c.is_zero()) return out;
  for (const auto& [jk, e] : f.terms_) out.add(jk.first, jk.second, c * e);
  return out;
}

bool operator==(const TwoForm& a, const TwoForm& b) {
  if (a.ctx_ != b.ctx_) return false;
  return (a - b).is_zero();
}

std::string TwoForm::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [jk, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ")*" + ctx_->label(jk.first) + "^" + ctx_->label(jk.second);
  }
  return out;
}

TwoForm wedge(const OneForm& a, const OneForm& b) {
  require_same(a.context(), b.context());
  TwoForm out(a.context());
  for (const auto& [i, ci] : a.terms())
    for (const auto& [j, cj] : b.terms())
      if (i != j) out.add(i, j, ci * cj);
  return out;
}

OneForm differential(const Expr& f) { return differential_impl(f, true); }
OneForm horizontal_differential(const Expr& f) { return differential_impl(f, false); }
TwoForm exterior_derivative(const OneForm& w) { return derivative_impl(w, true); }
TwoForm horizontal_exterior_derivative(const OneForm& w) { return derivative_impl(w, false); }

// ---------------------------------------------------------------------------
// FrameChange

FrameChange::FrameChange(std::vector<OneForm> theta, std::map<int, OneForm> alpha)
    : theta_(std::move(theta)), alpha_(std::move(alpha)) {
  if (theta_.size() != 7) throw Error(ErrorCode::InvalidArgument, "frame needs seven coframe forms");
  const auto coord = BasisContext::coordinate();
  std::vector<const OneForm*> rows;
  std::vector<int> abstract_index;
  for (int i = 0; i < 7; ++i) {
    require_same(theta_[i].context(), coord);
    rows.push_back(&theta_[i]);
    abstract_index.push_back(theta_index(i + 1));
  }
  for (const auto& [l, f] : alpha_) {
    require_same(f.context(), coord);
    rows.push_back(&f);
    abstract_index.push_back(alpha_index(l));
  }
  std::set<int> cols;
  for (int j = 0; j < kJetCount; ++j) cols.insert(j);
  for (const auto& [l, f] : alpha_) cols.insert(coord_index_param(l));
  for (const OneForm* f : rows)
    for (const auto& [i, c] : f->terms())
      if (!cols.count(i)) throw Error(ErrorCode::BasisMismatch, "frame form involves " + coord->label(i) + " outside the span");
  coords_.assign(cols.begin(), cols.end());
  const std::size_t n = rows.size();
  if (coords_.size() != n) throw Error(ErrorCode::BasisMismatch, "frame does not span the coordinate covectors");

  ExprMatrix m(n, std::vector<Expr>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r][c] = rows[r]->coeff(coords_[c]);
  ExprMatrix inv;
  try {
    inv = inverse(m);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularSystem) throw Error(ErrorCode::BasisMismatch, std::string("frame is degenerate: ") + e.what());
    throw;
  }
  // coordinate c = Σ_r inv[c][r] · (abstract form r)
  const auto abs = BasisContext::abstract();
  for (std::size_t c = 0; c < n; ++c) {
    OneForm f(abs);
    for (std::size_t r = 0; r < n; ++r) f.add(abstract_index[r], inv[c][r]);
    inverse_.emplace(coords_[c], std::move(f));
  }
}

const OneForm& FrameChange::coordinate_in_frame(int coord_index) const {
  auto it = inverse_.find(coord_index);
  if (it == inverse_.end())
    throw Error(ErrorCode::BasisMismatch, "covector " + BasisContext::coordinate()->label(coord_index) + " is outside the frame");
  return it->second;
}

OneForm FrameChange::to_frame(const OneForm& w) const {
  require_same(w.context(), BasisContext::coordinate());
  OneForm out(BasisContext::abstract());
  for (const auto& [i, c] : w.terms()) out = out + c * coordinate_in_frame(i);
  return out;
}

TwoForm FrameChange::to_frame(const TwoForm& w) const {
  require_same(w.context(), BasisContext::coordinate());
  TwoForm out(BasisContext::abstract());
  for (const auto& [jk, c] : w.terms()) {
    const OneForm& a = coordinate_in_frame(jk.first);
    const OneForm& b = coordinate_in_frame(jk.second);
    for (const auto& [i, ci] : a.terms())
      for (const auto& [j, cj] : b.terms())
        if (i != j) out.add(i, j, c * ci * cj);
  }
  return out;
}

OneForm FrameChange::to_coordinates(const OneForm& w) const {
  require_same(w.context(), BasisContext::abstract());
  OneForm out(BasisContext::coordinate());
  for (const auto& [i, c] : w.terms()) {
    if (i < 7) {
      out = out + c * theta_[i];
    } else {
      auto it = alpha_.find(i - 7 + 1);
      if (it == alpha_.end()) throw Error(ErrorCode::BasisMismatch, "alpha" + std::to_string(i - 6) + " is not in the frame");
      out = out + c * it->second;
    }
  }
  return out;
}

TwoForm FrameChange::to_coordinates(const TwoForm& w) const {
  require_same(w.context(), BasisContext::abstract());
  TwoForm out(BasisContext::coordinate());
  const auto abs = BasisContext::abstract();
  for (const auto& [jk, c] : w.terms()) {
    const OneForm a = to_coordinates(OneForm::basis(abs, jk.first));
    const OneForm b = to_coordinates(OneForm::basis(abs, jk.second));
    out = out + c * wedge(a, b);
  }
  return out;
}

Decomposition decompose_two_form(const TwoForm& omega, const FrameChange& frame) {
  const TwoForm f = frame.to_frame(omega);
  Decomposition d;
  for (const auto& [jk, c] : f.terms()) {
    const auto [j, k] = jk;  // j < k
    if (k < 7) {
      d.theta_theta.emplace(std::make_pair(j + 1, k + 1), c);
    } else if (j < 7) {
      // θ^j ∧ α^l = -α^l ∧ θ^j
      d.alpha_theta.emplace(std::make_pair(k - 7 + 1, j + 1), -c);
    } else {
      d.alpha_alpha.emplace(std::make_pair(j - 7 + 1, k - 7 + 1), c);
    }
  }
  return d;
}

TwoForm recompose(const Decomposition& d, const FrameChange& frame) {
  TwoForm abs(BasisContext::abstract());
  for (const auto& [jk, c] : d.theta_theta) abs.add(theta_index(jk.first), theta_index(jk.second), c);
  for (const auto& [lj, c] : d.alpha_theta) abs.add(alpha_index(lj.first), theta_index(lj.second), c);
  for (const auto& [lm, c] : d.alpha_alpha) abs.add(alpha_index(lm.first), alpha_index(lm.second), c);
  return frame.to_coordinates(abs);
}

}  // namespace cartan
