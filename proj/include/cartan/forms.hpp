#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"
#include "cartan/linear_solve.hpp"

namespace cartan {

/// Ordered list of covector labels. Contexts are compared by identity.
class BasisContext {
 public:
  BasisContext(std::string name, std::vector<std::string> labels);

  /// dx, du, dp, dq, dr, ds, dt, da1..da15.
  static std::shared_ptr<const BasisContext> coordinate();
  /// θ1..θ7, α1..α15.
  static std::shared_ptr<const BasisContext> abstract();

  const std::string& name() const { return name_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  int index_of(const std::string& label) const;

 private:
  std::string name_;
  std::vector<std::string> labels_;
};

using ContextPtr = std::shared_ptr<const BasisContext>;

/// Indices in the coordinate context.
constexpr int coord_index(Jet j) { return static_cast<int>(j); }
constexpr int coord_index_param(int l) { return kJetCount + l - 1; }
/// Indices in the abstract context.
constexpr int theta_index(int i) { return i - 1; }  // i = 1..7
constexpr int alpha_index(int l) { return 7 + l - 1; }  // l = 1..15

class OneForm {
 public:
  explicit OneForm(ContextPtr ctx = BasisContext::coordinate()) : ctx_(std::move(ctx)) {}
  static OneForm basis(ContextPtr ctx, int index);

  const ContextPtr& context() const { return ctx_; }
  const std::map<int, Expr>& terms() const { return terms_; }
  Expr coeff(int index) const;
  void add(int index, const Expr& c);
  bool is_zero() const { return terms_.empty(); }

  OneForm operator+(const OneForm& o) const;
  OneForm operator-(const OneForm& o) const;
  friend OneForm operator*(const Expr& c, const OneForm& f);
  friend bool operator==(const OneForm& a, const OneForm& b);

  OneForm substitute(const Bindings& b) const;
  std::string str() const;

 private:
  ContextPtr ctx_;
  std::map<int, Expr> terms_;
};

/// Two-form stored on pairs (j, k) with j < k in context order.
class TwoForm {
 public:
  explicit TwoForm(ContextPtr ctx = BasisContext::coordinate()) : ctx_(std::move(ctx)) {}

  const ContextPtr& context() const { return ctx_; }
  const std::map<std::pair<int, int>, Expr>& terms() const { return terms_; }
  /// Coefficient of e_j ∧ e_k in either orientation.
  Expr coeff(int j, int k) const;
  /// Adds c · e_j ∧ e_k, reorienting as needed.
  void add(int j, int k, const Expr& c);
  bool is_zero() const { return terms_.empty(); }

  TwoForm operator+(const TwoForm& o) const;
  TwoForm operator-(const TwoForm& o) const;
  friend TwoForm operator*(const Expr& c, const TwoForm& f);
  friend bool operator==(const TwoForm& a, const TwoForm& b);

  std::string str() const;

 private:
  ContextPtr ctx_;
  std::map<std::pair<int, int>, Expr> terms_;
};

TwoForm wedge(const OneForm& a, const OneForm& b);

/// df in the coordinate basis. Jet coordinates and group parameters are
/// coordinates; each coefficient-function symbol f contributes ∂f·f'·dx.
OneForm differential(const Expr& f);

/// Restriction of df to the jet covectors (group parameters held fixed).
OneForm horizontal_differential(const Expr& f);

/// d of a coordinate-basis one-form.
TwoForm exterior_derivative(const OneForm& w);
/// d restricted to jet directions (group parameters treated as constants).
TwoForm horizontal_exterior_derivative(const OneForm& w);

/// Change of basis between coordinate covectors and an abstract basis
/// (θ¹..θ⁷ plus the Maurer-Cartan forms of the free parameters).
class FrameChange {
 public:
  /// theta: 7 coordinate one-forms; alpha: map param index -> coordinate one-form.
  FrameChange(std::vector<OneForm> theta, std::map<int, OneForm> alpha);

  const std::vector<OneForm>& theta() const { return theta_; }
  const std::map<int, OneForm>& alpha() const { return alpha_; }
  /// Coordinate indices spanned (jets plus the da of the free parameters).
  const std::vector<int>& coordinates() const { return coords_; }

  /// Coordinate covector as an abstract one-form.
  const OneForm& coordinate_in_frame(int coord_index) const;
  OneForm to_frame(const OneForm& w) const;
  TwoForm to_frame(const TwoForm& w) const;
  OneForm to_coordinates(const OneForm& w) const;
  TwoForm to_coordinates(const TwoForm& w) const;

 private:
  std::vector<OneForm> theta_;
  std::map<int, OneForm> alpha_;
  std::vector<int> coords_;
  std::map<int, OneForm> inverse_;  // coordinate index -> abstract one-form
};

/// Split of an abstract two-form into α∧θ (A-terms), θ∧θ (torsion) and α∧α parts.
struct Decomposition {
  /// (l, j) -> coefficient of α^l ∧ θ^j
  std::map<std::pair<int, int>, Expr> alpha_theta;
  /// (j, k), j < k -> coefficient of θ^j ∧ θ^k (1-based indices)
  std::map<std::pair<int, int>, Expr> theta_theta;
  /// (l, m), l < m -> coefficient of α^l ∧ α^m
  std::map<std::pair<int, int>, Expr> alpha_alpha;
};

/// Rewrites a coordinate two-form in the frame. Throws BasisMismatch when Ω
/// involves covectors outside the frame's span.
Decomposition decompose_two_form(const TwoForm& omega, const FrameChange& frame);
TwoForm recompose(const Decomposition& d, const FrameChange& frame);

}  // namespace cartan
