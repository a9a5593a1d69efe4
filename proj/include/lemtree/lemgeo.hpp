#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lemtree/chebyshev.hpp"
#include "lemtree/treecore.hpp"

namespace lemtree::lemgeo {

using cplx = std::complex<double>;

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Level-curve tracing did not close (step underflow, point budget, or no
/// return into the capture radius). Callers reject the trial.
struct TracingFailure : NumericError {
  using NumericError::NumericError;
};
/// Point-in-polygon membership and the argument-principle winding integral
/// disagree, or the winding integral is farther than 0.1 from an integer.
struct ArgumentMismatch : NumericError {
  using NumericError::NumericError;
};
/// The two petal zero sets of a critical point do not split an existing
/// block of the zero partition.
struct PartitionInconsistency : NumericError {
  using NumericError::NumericError;
};
/// A critical point kept a non-negligible imaginary part in a pipeline that
/// requires real critical points.
struct NonRealCritical : NumericError {
  using NumericError::NumericError;
};
/// Polynomial failed the genericity checks (value gap, separation, or a
/// critical point sitting on a zero).
struct NonGenericPolynomial : NumericError {
  using NumericError::NumericError;
};
/// p'/p requested at (numerically) a zero of p.
struct EvaluationAtZero : NumericError {
  using NumericError::NumericError;
};

/// A polynomial carried as any of: zero list (with leading coefficient),
/// monomial coefficients (low to high), or a Chebyshev-T series. Conversions
/// are on demand; evaluation prefers the most stable representation present
/// (zeros > Chebyshev > monomial).
class PolynomialRep {
 public:
  static PolynomialRep from_zeros(std::vector<cplx> zeros, cplx leading = 1.0);
  static PolynomialRep from_coeffs(std::vector<cplx> coeffs);
  static PolynomialRep from_chebyshev(polymodels::ChebSeries series);

  int degree() const { return degree_; }

  bool has_zeros() const { return zeros_.has_value(); }
  bool has_coeffs() const { return coeffs_.has_value(); }
  bool has_chebyshev() const { return cheb_.has_value(); }

  const std::vector<cplx>& zeros() const;
  const std::vector<cplx>& coeffs() const;
  const polymodels::ChebSeries& chebyshev() const;
  cplx leading() const { return leading_; }

  /// Fill the monomial form (expanding zeros, or converting the Chebyshev
  /// basis — refused above degree 30).
  void ensure_coeffs();
  /// Fill the zero list (simultaneous root finding on the monomial form).
  void ensure_zeros();

  cplx eval(cplx z) const;
  cplx deriv(cplx z) const;
  /// log|p(z)|; from zeros this is exponent-tracked and immune to overflow.
  double log_abs(cplx z) const;
  /// p'(z)/p(z); the zero form evaluates the sum of reciprocals directly.
  cplx log_derivative(cplx z) const;
  /// p''(z)/p(z).
  cplx second_over_p(cplx z) const;

  /// Max pairwise zero distance (requires zeros).
  double geometry_scale() const;

  /// Polynomial input JSON: accepts exactly one of
  /// {"zeros": [[re,im],...]}, {"coeffs": [[re,im],...]},
  /// {"basis":"chebyshev-T","coeffs":[...]}.
  static PolynomialRep from_json(const std::string& text);

 private:
  PolynomialRep() = default;
  int degree_ = 0;
  cplx leading_ = 1.0;
  std::optional<std::vector<cplx>> zeros_;
  std::optional<std::vector<cplx>> coeffs_;
  std::optional<polymodels::ChebSeries> cheb_;
};

/// The field p'/p (sum of reciprocals of distances to the zeros).
/// Throws EvaluationAtZero at a zero of p.
cplx log_derivative_field(const PolynomialRep& p, cplx w);

struct CriticalData {
  std::vector<cplx> points;        // the deg-1 roots of p'
  std::vector<double> values;      // |p(w_i)| (may over/underflow; see log_values)
  std::vector<double> log_values;  // log|p(w_i)|, used for ranking and gaps
  std::vector<int> order;          // order[r] = index of the rank-(r+1) point, values strictly decreasing
  std::vector<double> residuals;   // |p'(w_i)| in the scaled frame
  double residual_tolerance = 0;   // 1e-10 * max scaled coefficient of p'
  bool converged = false;          // all residuals within tolerance
};

/// All deg-1 critical points by simultaneous Aberth iteration on the
/// coefficients of p' (scaled to put the roots near the unit disk), polished
/// with Newton steps. Non-convergence is reported in the returned residuals,
/// not thrown. Throws std::invalid_argument below degree 2.
CriticalData critical_points(const PolynomialRep& p);

struct GenericityReport {
  double min_relative_value_gap = 0;   // min over sorted |p(w)| pairs of 1 - smaller/larger
  double min_critical_separation = 0;  // min pairwise |w_i - w_j|
  bool zero_on_critical_level = false; // some critical point coincides with a zero
  bool generic = false;
};

inline constexpr double kTauGap = 1e-9;   // relative critical-value gap
inline constexpr double kTauSep = 1e-8;   // * max pairwise zero distance
inline constexpr double kTauZero = 1e-12; // * zero scale, critical-point-on-zero test

/// Requires p to carry zeros (for the geometry scale) and crit to come from p.
GenericityReport genericity_check(const PolynomialRep& p, const CriticalData& crit);

struct PetalCurve {
  std::vector<cplx> vertices;  // closed polyline, first == last == critical point
  double level = 0;            // |p| on the curve
  double log_level = 0;
  std::vector<int> enclosed_zeros;  // zero indices, filled by zeros_in_petal
  int winding_count = 0;            // argument-principle count, filled by zeros_in_petal
};

struct TraceOptions {
  double initial_step_factor = 1e-3;  // * distance from the saddle to the nearest zero
  double max_chord_angle = 0.2;       // radians, per step
  long max_points = 1000000;
};

/// Traces the two petals of the singular level-curve component through the
/// simple critical point w at |p| = level. Throws TracingFailure.
std::array<PetalCurve, 2> trace_singular_component(const PolynomialRep& p, cplx w, double level,
                                                   const TraceOptions& opts = {});
/// Same with the level passed as log|p| (the level itself may over/underflow
/// a double at high degree).
std::array<PetalCurve, 2> trace_singular_component_log(const PolynomialRep& p, cplx w,
                                                       double log_level,
                                                       const TraceOptions& opts = {});

/// Zero membership by even-odd point-in-polygon, cross-checked against the
/// discrete argument-principle winding integral; fills petal.enclosed_zeros
/// and petal.winding_count. Requires p to carry zeros.
/// Throws ArgumentMismatch on disagreement.
std::vector<int> zeros_in_petal(const PolynomialRep& p, PetalCurve& petal);

/// Full geometric pipeline: critical points, genericity, petal tracing in
/// strictly decreasing critical-value order, and block-partition assembly of
/// the tree. Node labels are critical-value ranks (1 = largest = root).
treecore::LemnTree build_lemniscate_tree(const PolynomialRep& p, const TraceOptions& opts = {});

/// For a polynomial with all zeros and critical points real: rank critical
/// points by decreasing |p(w)|, read the rank labels left to right as a
/// permutation. real_rooted_tree is tree_from_permutation of it.
treecore::Permutation real_rooted_permutation(const PolynomialRep& p);
treecore::LemnTree real_rooted_tree(const PolynomialRep& p);

struct PairingStats {
  double paired_fraction = 0;       // zeros with exactly one critical point within r|zeta|/N
  double small_petal_fraction = 0;  // critical points whose smaller petal holds exactly 1 zero
  std::vector<double> nearest_critical_distance;  // per zero
  int eligible_zeros = 0;   // |zeta| >= N^{-1/4}
  int traced_components = 0;
};

/// r is the pairing radius multiplier (the pairing disk around zero zeta has
/// radius r|zeta|/N). trace_petals = false skips the petal census (cheap
/// distance-only statistics).
PairingStats pairing_stats(const PolynomialRep& p, double r, bool trace_petals = true,
                           const TraceOptions& opts = {});

}  // namespace lemtree::lemgeo
