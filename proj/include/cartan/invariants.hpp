#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"
#include "cartan/operator_problem.hpp"
#include "cartan/reduction.hpp"

namespace cartan {

using NamedExprs = std::vector<std::pair<std::string, Expr>>;

/// Coefficients of the final {e}-structure. `entries` carry the reference
/// names (I1..I6 or L1..L5) in reference order; `extras` are non-constant
/// slots the reference display does not name, keyed "T^i_jk"; `reference`
/// holds the reference's own expressions for the same names.
struct InvariantSet {
  Variant variant = Variant::Direct;
  NamedExprs entries;
  NamedExprs extras;
  NamedExprs reference;

  const Expr* find(const std::string& name) const;
  /// entries followed by extras.
  NamedExprs all() const;
};

/// Throws IncompleteReduction when the trace has no final stage.
InvariantSet extract_invariants(const ReductionTrace& trace, const NormalizationPlan& plan);
InvariantSet extract_invariants(const ReductionTrace& trace);

/// Substitutes the operator's coefficients (and their x-derivatives) for the
/// formal f symbols.
InvariantSet specialize(const InvariantSet& inv, const OperatorSpec& op);

/// Invariants of the generic operator, from the built-in plan.
InvariantSet generic_invariants(Variant v);

struct SampleOptions {
  std::uint64_t seed = 0;
  int samples = 64;
  /// Numeric values for declared constants.
  std::map<std::string, double> constants;
};

/// Jet point (x, u, p, q, r, s, t).
using JetPoint = std::array<double, kJetCount>;

/// Draws points from the fingerprint domain: x in [-1, 1], u in [0.5, 2],
/// the other coordinates in [-2, 2].
class JetSampler {
 public:
  explicit JetSampler(std::uint64_t seed);
  JetPoint next();

 private:
  std::mt19937_64 gen_;
  double uniform(double lo, double hi);
};

NumericEnv numeric_env(const JetPoint& pt, const std::map<std::string, double>& constants);

/// Sample standard deviation below 1e-9 * (1 + |mean|).
bool is_constant_sample(const std::vector<double>& values, double* mean = nullptr, double* stddev = nullptr);

struct InvariantStats {
  std::string name;
  bool constant = false;
  double mean = 0;
  double stddev = 0;
  /// Varies with x at some fixed fiber point.
  bool x_dependent = false;
};

struct Fingerprint {
  std::vector<InvariantStats> stats;
  /// Jacobian rank with respect to (x, u, p, q, r, s, t), maximum over samples.
  int rank = 0;
  std::vector<int> sample_ranks;
  /// (i, j) -> true when the two gradients are parallel at every sample.
  std::vector<std::tuple<std::string, std::string, bool>> dependence;
  std::vector<JetPoint> points;
  /// values[i][n] = invariant i at point n.
  std::vector<std::vector<double>> values;
  int rejected = 0;
};

/// Evaluates a specialized set over sampled points. Points where any entry
/// has a pole are redrawn; more than 90% rejections -> SamplingFailure.
Fingerprint fingerprint(const NamedExprs& invariants, const SampleOptions& opts);
/// Same, at fixed points (no redraws; poles propagate).
Fingerprint fingerprint_at(const NamedExprs& invariants, const std::vector<JetPoint>& points,
                           const std::map<std::string, double>& constants);

enum class Verdict { NecessaryConditionsHold, Distinguished };
std::string to_string(Verdict v);

struct Witness {
  /// "constancy", "constant_value", "rank", "x_dependence", "sample_value"
  std::string kind;
  std::string invariant;
  std::string detail;
  double first = 0;
  double second = 0;
  std::optional<JetPoint> point;
};

struct CompareReport {
  Variant variant = Variant::Direct;
  Verdict verdict = Verdict::NecessaryConditionsHold;
  std::optional<Witness> witness;
  std::string first_operator;
  std::string second_operator;
  Fingerprint first;
  Fingerprint second;
  SampleOptions options;
};

/// Fingerprints both operators at shared sample points. A Distinguished
/// verdict always carries a witness; NecessaryConditionsHold is not a proof of
/// equivalence.
CompareReport compare(const OperatorSpec& op1, const OperatorSpec& op2, Variant variant,
                      const SampleOptions& opts = {});
/// As above with the generic invariants supplied by the caller.
CompareReport compare(const InvariantSet& generic, const OperatorSpec& op1, const OperatorSpec& op2,
                      const SampleOptions& opts = {});

}  // namespace cartan
