#include "lemtree/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lemtree::polymodels {

ChebSeries::ChebSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

namespace {

template <typename T>
T clenshaw(const std::vector<double>& c, T x) {
  if (c.empty()) return T(0);
  T b1(0), b2(0);
  T two_x = T(2) * x;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    T b0 = two_x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

}  // namespace

double cheb_eval(const ChebSeries& s, double x) { return clenshaw(s.coefficients(), x); }

std::complex<double> cheb_eval(const ChebSeries& s, std::complex<double> z) {
  return clenshaw(s.coefficients(), z);
}

ChebSeries cheb_derivative(const ChebSeries& s) {
  const auto& b = s.coefficients();
  int n = s.degree();
  if (n <= 0) return ChebSeries(std::vector<double>{});
  std::vector<double> d(n + 1, 0.0);  // d[n] unused, kept for index clarity
  for (int k = n; k >= 1; --k) d[k - 1] = (k + 1 <= n - 1 ? d[k + 1] : 0.0) + 2.0 * k * b[k];
  d[0] *= 0.5;
  d.resize(n);
  return ChebSeries(std::move(d));
}

namespace {

double refine_root(const ChebSeries& s, const ChebSeries& ds, double lo, double hi) {
  double flo = cheb_eval(s, lo);
  // Bisection until the bracket is small, then guarded Newton.
  for (int i = 0; i < 30; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = cheb_eval(s, mid);
    if ((flo <= 0) == (fm <= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    double f = cheb_eval(s, x);
    double df = cheb_eval(ds, x);
    if (df == 0.0) break;
    double step = f / df;
    double next = x - step;
    if (next < lo || next > hi) break;  // fall back to the bisected value
    x = next;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace

std::vector<double> real_roots(const ChebSeries& s, double lo, double hi) {
  if (lo >= hi) throw std::invalid_argument("real_roots: empty interval");
  if (lo < -1.05 || hi > 1.05) throw std::invalid_argument("real_roots: interval outside [-1.05, 1.05]");
  int n = std::max(1, s.degree());
  int grid = 8 * n;
  ChebSeries ds = cheb_derivative(s);

  // Chebyshev-distributed grid points on [lo, hi], endpoints included.
  std::vector<double> xs(grid + 1);
  for (int j = 0; j <= grid; ++j) {
    double t = std::cos(std::numbers::pi * (grid - j) / grid);  // -1..1 ascending
    xs[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }

  std::vector<double> roots;
  double fprev = cheb_eval(s, xs[0]);
  for (int j = 1; j <= grid; ++j) {
    double f = cheb_eval(s, xs[j]);
    if (fprev == 0.0) {
      roots.push_back(xs[j - 1]);
    } else if ((fprev < 0) != (f < 0)) {
      roots.push_back(refine_root(s, ds, xs[j - 1], xs[j]));
    }
    fprev = f;
  }
  if (fprev == 0.0) roots.push_back(xs[grid]);
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<double> real_roots(const ChebSeries& s, double lo, double hi, int expected_count) {
  auto roots = real_roots(s, lo, hi);
  if (static_cast<int>(roots.size()) != expected_count)
    throw RootCountMismatch("real_roots: found " + std::to_string(roots.size()) + " roots, expected " +
                            std::to_string(expected_count));
  return roots;
}

std::vector<std::complex<double>> cheb_to_monomial(const ChebSeries& s) {
  int n = s.degree();
  if (n > 30) throw std::invalid_argument("cheb_to_monomial: refused above degree 30 (ill-conditioned)");
  if (n < 0) return {};
  // T_{k+1} = 2x T_k - T_{k-1}, accumulated in monomial form.
  std::vector<double> tk_prev{1.0};      // T_0
  std::vector<double> tk{0.0, 1.0};      // T_1
  std::vector<double> out(n + 1, 0.0);
  const auto& c = s.coefficients();
  out[0] += c[0];
  if (n >= 1)
    for (std::size_t i = 0; i < tk.size(); ++i) out[i] += c[1] * tk[i];
  for (int k = 2; k <= n; ++k) {
    std::vector<double> next(k + 1, 0.0);
    for (std::size_t i = 0; i < tk.size(); ++i) next[i + 1] += 2.0 * tk[i];
    for (std::size_t i = 0; i < tk_prev.size(); ++i) next[i] -= tk_prev[i];
    tk_prev = std::move(tk);
    tk = std::move(next);
    for (std::size_t i = 0; i < tk.size(); ++i) out[i] += c[k] * tk[i];
  }
  std::vector<std::complex<double>> cc(out.begin(), out.end());
  return cc;
}

}  // namespace lemtree::polymodels
