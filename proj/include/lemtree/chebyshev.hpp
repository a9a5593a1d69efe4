#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lemtree::polymodels {

/// Raised when a caller declared an expected number of real roots and fewer
/// were isolated. The trial is meant to be rejected, not repaired.
struct RootCountMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Polynomial in the Chebyshev-T basis: sum_k coefficient(k) T_k(x).
class ChebSeries {
 public:
  ChebSeries() = default;
  explicit ChebSeries(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// Clenshaw backward recurrence. Outside [-1, 1] this evaluates the analytic
/// continuation (permitted, the recurrence is exact either way).
double cheb_eval(const ChebSeries& s, double x);
std::complex<double> cheb_eval(const ChebSeries& s, std::complex<double> z);

/// Coefficients of s' in the T basis: d_{k-1} = d_{k+1} + 2k b_k, with the
/// k = 1 halving.
ChebSeries cheb_derivative(const ChebSeries& s);

/// All simple real roots in [lo, hi] (subset of [-1.05, 1.05]): sign changes
/// on a grid of 8*degree Chebyshev points, refined by bisection then guarded
/// Newton. Sorted ascending.
std::vector<double> real_roots(const ChebSeries& s, double lo, double hi);

/// Same, but throws RootCountMismatch when fewer than expected_count roots
/// are found.
std::vector<double> real_roots(const ChebSeries& s, double lo, double hi, int expected_count);

/// Monomial coefficients (low to high). Refused above degree 30: the basis
/// change is exponentially ill-conditioned, evaluation should stay in the
/// Chebyshev basis instead.
std::vector<std::complex<double>> cheb_to_monomial(const ChebSeries& s);

}  // namespace lemtree::polymodels
