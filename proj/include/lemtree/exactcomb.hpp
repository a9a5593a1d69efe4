#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lemtree/rng.hpp"
#include "lemtree/treecore.hpp"

namespace lemtree::exactcomb {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Dense polynomial in u with exact rational coefficients, trailing zeros
/// trimmed. coefficient(k) is the coefficient of u^k.
class UPolynomial {
 public:
  UPolynomial() = default;
  explicit UPolynomial(std::vector<Rational> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for the zero poly
  const Rational& coefficient(int k) const;
  const std::vector<Rational>& coefficients() const { return coeffs_; }

  Rational eval(const Rational& u) const;
  UPolynomial derivative() const;

 private:
  std::vector<Rational> coeffs_;
};

/// Exact integer table a_{n,k} = number of trees of size n+1 with k nodes of
/// outdegree two, for n = 0..n_max (row index follows the series convention:
/// a_{n,k} = n! [z^n u^k] of the tree-class generating function, so row n
/// describes trees of size n+1; public size-indexed operations convert).
class CoefficientTable {
 public:
  /// Series route: expands the z-series of
  ///   G(z,u) = cosh((z/2)s) - sinh((z/2)s)/s,  s^2 = 1 - 2u,
  /// whose z^n coefficient is a polynomial in u (only integer powers of s^2
  /// appear), squares it, and solves F * G^2 = 1 for F by forward
  /// substitution. Exact integer arithmetic throughout.
  static CoefficientTable expand_f(int n_max);

  /// Recurrence route: marginalizes the label-insertion state counts
  /// (independent of the series expansion; used as a cross-check oracle and
  /// as the fast path for large n).
  static CoefficientTable from_state_counts(int n_max);

  int n_max() const { return static_cast<int>(rows_.size()) - 1; }
  const std::vector<BigInt>& row(int n) const;
  BigInt row_sum(int n) const;  // total number of trees of size n + 1

  bool operator==(const CoefficientTable&) const = default;

 private:
  std::vector<std::vector<BigInt>> rows_;
};

/// Label-insertion state counts c(n, a, b): number of trees with n nodes,
/// a leaves and b nodes of outdegree one. Because a = (n - a - b) + 1 on every
/// reachable state, b is determined by (n, a); count() returns 0 elsewhere.
class StateCount {
 public:
  explicit StateCount(int n_max);

  int n_max() const { return static_cast<int>(levels_.size()) - 1; }
  const BigInt& count(int n, int leaves, int unary) const;

  /// Number of size-n trees with k nodes of outdegree two (= a_{n-1,k}).
  const BigInt& size_k_count(int n, int k) const;

  BigInt level_total(int n) const;  // total number of size-n trees

 private:
  const BigInt& at(int n, int leaves) const;
  std::vector<std::vector<BigInt>> levels_;  // levels_[n][a], a = 1..(n+1)/2
};

/// Every size-N tree exactly once (canonical encodings, sorted). Labels 2..N
/// are attached in order to any node of outdegree <= 1; each tree arises from
/// exactly one insertion history. Guarded to N <= 12.
std::vector<std::string> enumerate_trees(int N);

/// Streaming variant used by the exhaustive tests.
void enumerate_trees_visit(int N, const std::function<void(const treecore::LemnTree&)>& visit);

struct ExactMoments {
  Rational mean;
  Rational variance;
};

/// PGF of the outdegree-two count for a uniform size-N tree, from table row
/// N-1. Coefficients are exact rationals summing to 1.
/// Throws std::out_of_range if the table is too small.
UPolynomial exact_pgf(const CoefficientTable& table, int N);
ExactMoments exact_moments(const CoefficientTable& table, int N);

/// Convenience overloads backed by a freshly built state-count table
/// (identical to the series table; the equality is tested).
UPolynomial exact_pgf(int N);
ExactMoments exact_moments(int N);

/// Exactly uniform sampler over size-N trees. Precomputes exact completion
/// counts W(n,a,b) = a W(n+1,a,b+1) + b W(n+1,a+1,b-1) with W(N,.,.) = 1 and
/// chooses each insertion with probability proportional to the completions it
/// leaves. Above kExactLimit nodes the table switches to per-level normalized
/// doubles (the choice ratios only compare values within one level, so the
/// normalization cancels); the acceptance checks never use that path.
class UniformSampler {
 public:
  static constexpr int kExactLimit = 2000;

  explicit UniformSampler(int size);
  int size() const { return size_; }

  /// W(1,1,0) = number of size-N trees (exact mode only).
  const BigInt& total_trees() const;

  treecore::LemnTree sample(rng::Stream& stream) const;

 private:
  int size_;
  bool exact_;
  std::vector<std::vector<BigInt>> w_;        // w_[n][a]
  std::vector<std::vector<double>> w_float_;  // per-level normalized fallback
};

/// One uniformly random size-N tree. Builds the completion table on each
/// call; use UniformSampler directly to amortize it across draws.
treecore::LemnTree uniform_sample(int N, rng::Stream& stream);

/// Uniform random integer in [0, bound) drawn from the stream, unbiased.
BigInt random_below(const BigInt& bound, rng::Stream& stream);

struct AsymptoticConstants {
  double rho1;        // singularity location, pi/2
  double mean_slope;  // 1 - 2/pi
  double var_slope;   // 4/pi^2 + 2/pi - 1
};

/// rho(u) = log((1+s)/(1-s)) / s with s = sqrt(1-2u) on the principal branch;
/// analytic near u = 1 where s is near i.
std::complex<double> rho(std::complex<double> u);

/// Evaluates rho(1) and the first two derivatives of beta(u) = rho(1)/rho(u)
/// at u = 1 by order-6 central differences (step 1e-4), returning the slopes
/// of the mean and variance of the outdegree-two count.
AsymptoticConstants asymptotic_constants();

/// {"num": "...", "den": "..."} plus a float convenience field.
std::string rational_to_json(const Rational& q);

}  // namespace lemtree::exactcomb
