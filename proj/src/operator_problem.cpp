#include "cartan/operator_problem.hpp"

#include "cartan/error.hpp"

namespace cartan {

namespace {

constexpr std::array<std::pair<int, int>, 16> kPositions = {{
    {-1, -1},  // unused: parameters are 1-based
    {0, 0},
    {2, 1}, {2, 2},
    {3, 1}, {3, 2}, {3, 3},
    {4, 1}, {4, 2}, {4, 3}, {4, 4},
    {5, 1}, {5, 2}, {5, 3}, {5, 4}, {5, 5},
}};

Expr jet(Jet j) { return Expr(Symbol::jet(j)); }

void check_param(int l) {
  if (l < 1 || l > kParamCount) throw Error(ErrorCode::InvalidArgument, "group parameter index out of range");
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::Direct ? "direct" : "gauge"; }

Variant parse_variant(std::string_view s) {
  if (s == "direct") return Variant::Direct;
  if (s == "gauge") return Variant::Gauge;
  throw Error(ErrorCode::InvalidArgument, "unknown variant '" + std::string(s) + "' (expected direct or gauge)");
}

OperatorSpec OperatorSpec::generic() {
  OperatorSpec op;
  for (int i = 0; i < 5; ++i) op.f[i] = Expr(Symbol::coeff(i));
  return op;
}

bool OperatorSpec::is_generic() const {
  for (int i = 0; i < 5; ++i)
    if (!(f[i] == Expr(Symbol::coeff(i)))) return false;
  return true;
}

Bindings OperatorSpec::coefficient_bindings(int max_order) const {
  Bindings b;
  const Symbol x = Symbol::jet(Jet::x);
  for (int i = 0; i < 5; ++i) {
    Expr d = f[i];
    for (int k = 0; k <= max_order; ++k) {
      b.emplace(Symbol::coeff(i, k), d);
      d = d.partial(x);
    }
  }
  return b;
}

std::pair<int, int> param_position(int l) {
  check_param(l);
  return kPositions[l];
}

int param_at(int row, int col) {
  for (int l = 1; l <= kParamCount; ++l)
    if (kPositions[l].first == row && kPositions[l].second == col) return l;
  return 0;
}

ExprMatrix group_matrix(const std::map<int, Expr>& entries) {
  ExprMatrix g = identity_matrix(7);
  for (const auto& [l, v] : entries) {
    const auto [r, c] = param_position(l);
    g[r][c] = v;
  }
  return g;
}

ExprMatrix symbolic_group_matrix(const std::set<int>& free) {
  std::map<int, Expr> entries;
  for (int l : free) entries.emplace(l, Expr(Symbol::param(l)));
  return group_matrix(entries);
}

GroupState GroupState::full() {
  GroupState g;
  for (int l = 1; l <= kParamCount; ++l) g.free.insert(l);
  return g;
}

std::map<int, Expr> GroupState::assignments() const {
  std::map<int, Expr> out;
  for (const auto& s : stages)
    for (const auto& [l, v] : s) out.insert_or_assign(l, v);
  return out;
}

GroupState GroupState::with_stage(const std::map<int, Expr>& values) const {
  GroupState g = *this;
  for (const auto& [l, v] : values) {
    check_param(l);
    if (!g.free.erase(l))
      throw Error(ErrorCode::InvalidArgument, "parameter a" + std::to_string(l) + " is already normalized");
  }
  g.stages.push_back(values);
  return g;
}

Expr base_invariant(const OperatorSpec& op, Variant variant) {
  const Expr lower = op.f[4] * jet(Jet::s) + op.f[3] * jet(Jet::r) + op.f[2] * jet(Jet::q) + op.f[1] * jet(Jet::p);
  if (variant == Variant::Direct) return jet(Jet::t) + lower + op.f[0] * jet(Jet::u);
  return (jet(Jet::t) + lower) / jet(Jet::u) + op.f[0];
}

std::vector<OneForm> base_coframe(const OperatorSpec& op, Variant variant) {
  const auto ctx = BasisContext::coordinate();
  auto d = [&](Jet j) { return OneForm::basis(ctx, coord_index(j)); };
  std::vector<OneForm> w;
  w.push_back(d(Jet::x));
  w.push_back(Expr(1) / jet(Jet::u) * (d(Jet::u) - jet(Jet::p) * d(Jet::x)));
  w.push_back(d(Jet::p) - jet(Jet::q) * d(Jet::x));
  w.push_back(d(Jet::q) - jet(Jet::r) * d(Jet::x));
  w.push_back(d(Jet::r) - jet(Jet::s) * d(Jet::x));
  w.push_back(d(Jet::s) - jet(Jet::t) * d(Jet::x));
  w.push_back(differential(base_invariant(op, variant)));
  return w;
}

ExprMatrix coframe_matrix(const std::vector<OneForm>& forms) {
  ExprMatrix m(forms.size(), std::vector<Expr>(kJetCount));
  for (std::size_t i = 0; i < forms.size(); ++i) {
    for (const auto& [k, c] : forms[i].terms()) {
      if (k >= kJetCount) throw Error(ErrorCode::BasisMismatch, "coframe form involves group-parameter covectors");
      m[i][k] = c;
    }
  }
  return m;
}

std::vector<OneForm> forms_from_matrix(const ExprMatrix& m) {
  std::vector<OneForm> out;
  const auto ctx = BasisContext::coordinate();
  for (const auto& row : m) {
    OneForm f(ctx);
    for (std::size_t k = 0; k < row.size(); ++k) f.add(static_cast<int>(k), row[k]);
    out.push_back(std::move(f));
  }
  return out;
}

LiftedCoframe lifted_coframe(const std::vector<OneForm>& omega, const GroupState& g) {
  if (omega.size() != 7) throw Error(ErrorCode::InvalidArgument, "base coframe needs seven forms");
  ExprMatrix w = coframe_matrix(omega);
  ExprMatrix w_inv = inverse(w);
  for (const auto& stage : g.stages) {
    for (int l : {1, 3, 6, 10, 15}) {
      auto it = stage.find(l);
      if (it != stage.end() && it->second.is_zero())
        throw Error(ErrorCode::SingularGroup, "degenerate group: a" + std::to_string(l) + " = 0");
    }
    const ExprMatrix h = group_matrix(stage);
    w = multiply(h, w);
    w_inv = multiply(w_inv, inverse(h));
  }
  const ExprMatrix h = symbolic_group_matrix(g.free);
  LiftedCoframe lc;
  lc.group = g;
  lc.normalized_matrix = w;
  lc.matrix = multiply(h, w);
  lc.change_of_basis = multiply(w_inv, inverse(h));
  lc.theta = forms_from_matrix(lc.matrix);
  return lc;
}

std::vector<std::vector<OneForm>> maurer_cartan_matrix(const std::set<int>& free) {
  const ExprMatrix h = symbolic_group_matrix(free);
  const ExprMatrix h_inv = inverse(h);
  const auto ctx = BasisContext::coordinate();
  std::vector<std::vector<OneForm>> gamma(7, std::vector<OneForm>(7, OneForm(ctx)));
  for (int i = 0; i < 7; ++i) {
    for (int k = 0; k < 7; ++k) {
      const int l = param_at(i, k);
      if (!l || !free.count(l)) continue;
      // dh[i][k] = da_l
      for (int j = 0; j < 7; ++j)
        if (!h_inv[k][j].is_zero()) gamma[i][j].add(coord_index_param(l), h_inv[k][j]);
    }
  }
  return gamma;
}

std::map<int, OneForm> maurer_cartan(const GroupState& g) {
  for (const auto& stage : g.stages)
    for (int l : {1, 3, 6, 10, 15}) {
      auto it = stage.find(l);
      if (it != stage.end() && it->second.is_zero())
        throw Error(ErrorCode::SingularGroup, "degenerate group: a" + std::to_string(l) + " = 0");
    }
  const auto gamma = maurer_cartan_matrix(g.free);
  std::map<int, OneForm> alpha;
  for (int l : g.free) {
    const auto [r, c] = param_position(l);
    alpha.emplace(l, gamma[r][c]);
  }
  return alpha;
}

}  // namespace cartan
