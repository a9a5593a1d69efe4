#include "lemtree/exactcomb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace lemtree::exactcomb {

namespace {

using IPoly = std::vector<BigInt>;  // dense integer polynomial in u

void trim(IPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

UPolynomial::UPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Rational& UPolynomial::coefficient(int k) const {
  static const Rational zero(0);
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return zero;
  return coeffs_[k];
}

Rational UPolynomial::eval(const Rational& u) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

UPolynomial UPolynomial::derivative() const {
  std::vector<Rational> d;
  for (int k = 1; k < static_cast<int>(coeffs_.size()); ++k) d.push_back(coeffs_[k] * k);
  return UPolynomial(std::move(d));
}

CoefficientTable CoefficientTable::expand_f(int n_max) {
  if (n_max < 0) throw std::invalid_argument("expand_f: n_max must be >= 0");

  // Scaled series of G: with s^2 = 1-2u,
  //   G(z,u) = sum_n g_n(u) z^n,  g_n(u) = (-1)^n (1-2u)^{floor(n/2)} / (2^n n!),
  // so gs_n := 2^n n! g_n = (-1)^n (1-2u)^{floor(n/2)} is an integer polynomial.
  std::vector<IPoly> gs(n_max + 1);
  {
    IPoly pw{BigInt(1)};  // (1-2u)^m, maintained incrementally
    for (int n = 0; n <= n_max; ++n) {
      if (n >= 2 && n % 2 == 0) {
        IPoly next(pw.size() + 1, BigInt(0));
        for (std::size_t i = 0; i < pw.size(); ++i) {
          next[i] += pw[i];
          next[i + 1] -= 2 * pw[i];
        }
        pw = std::move(next);
      }
      gs[n] = pw;
      if (n % 2 == 1)
        for (auto& c : gs[n]) c = -c;
    }
  }

  // Square the series. In EGF-normalized form hs_n := 2^n n! (G^2)_n satisfies
  // hs_n = sum_i C(n,i) gs_i gs_{n-i}, and ht_n := n! (G^2)_n = hs_n / 2^n is
  // integral (checked by exact division).
  std::vector<IPoly> ht(n_max + 1);
  {
    std::vector<BigInt> binom;
    for (int n = 0; n <= n_max; ++n) {
      binom.assign(n + 1, BigInt(1));
      for (int i = 1; i <= n; ++i) binom[i] = binom[i - 1] * (n - i + 1) / i;
      IPoly acc(static_cast<std::size_t>(n / 2) + 1, BigInt(0));
      BigInt t;
      for (int i = 0; i <= n; ++i) {
        const IPoly& x = gs[i];
        const IPoly& y = gs[n - i];
        for (std::size_t ax = 0; ax < x.size(); ++ax) {
          if (x[ax] == 0) continue;
          t = binom[i] * x[ax];
          for (std::size_t ay = 0; ay < y.size(); ++ay)
            mpz_addmul(acc[ax + ay].get_mpz_t(), t.get_mpz_t(), y[ay].get_mpz_t());
        }
      }
      BigInt two_n = BigInt(1) << n;
      for (auto& c : acc) {
        BigInt q;
        mpz_divexact(q.get_mpz_t(), c.get_mpz_t(), two_n.get_mpz_t());
        c = std::move(q);
      }
      trim(acc);
      ht[n] = std::move(acc);
    }
  }

  // Solve F * G^2 = 1 by forward substitution. With fr_n := n! [z^n] F
  // (integer; fr_n = row n of the table) and ht as above:
  //   fr_0 = 1,  fr_n = - sum_{j=1..n} C(n,j) ht_j fr_{n-j}.
  CoefficientTable table;
  table.rows_.resize(n_max + 1);
  table.rows_[0] = {BigInt(1)};
  std::vector<BigInt> binom;
  for (int n = 1; n <= n_max; ++n) {
    binom.assign(n + 1, BigInt(1));
    for (int i = 1; i <= n; ++i) binom[i] = binom[i - 1] * (n - i + 1) / i;
    IPoly acc(static_cast<std::size_t>(n / 2) + 1, BigInt(0));
    BigInt t;
    for (int j = 1; j <= n; ++j) {
      const IPoly& h = ht[j];
      const IPoly& f = table.rows_[n - j];
      for (std::size_t ah = 0; ah < h.size(); ++ah) {
        if (h[ah] == 0) continue;
        t = binom[j] * h[ah];
        for (std::size_t af = 0; af < f.size(); ++af)
          mpz_addmul(acc[ah + af].get_mpz_t(), t.get_mpz_t(), f[af].get_mpz_t());
      }
    }
    for (auto& c : acc) c = -c;
    trim(acc);
    for (const auto& c : acc)
      if (c < 0) throw std::logic_error("expand_f: negative coefficient");
    table.rows_[n] = std::move(acc);
  }
  return table;
}

CoefficientTable CoefficientTable::from_state_counts(int n_max) {
  if (n_max < 0) throw std::invalid_argument("from_state_counts: n_max must be >= 0");
  StateCount sc(n_max + 1);
  CoefficientTable table;
  table.rows_.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    std::vector<BigInt> row;
    for (int k = 0; k <= n / 2; ++k) row.push_back(sc.size_k_count(n + 1, k));
    trim(row);
    table.rows_[n] = std::move(row);
  }
  return table;
}

const std::vector<BigInt>& CoefficientTable::row(int n) const {
  if (n < 0 || n > n_max()) throw std::out_of_range("CoefficientTable::row: n out of range");
  return rows_[n];
}

BigInt CoefficientTable::row_sum(int n) const {
  BigInt s(0);
  for (const auto& c : row(n)) s += c;
  return s;
}

StateCount::StateCount(int n_max) {
  if (n_max < 1) throw std::invalid_argument("StateCount: n_max must be >= 1");
  levels_.resize(n_max + 1);
  for (int n = 1; n <= n_max; ++n) levels_[n].assign((n + 1) / 2 + 1, BigInt(0));
  levels_[1][1] = 1;
  for (int n = 1; n < n_max; ++n) {
    for (int a = 1; a <= (n + 1) / 2; ++a) {
      const BigInt& c = levels_[n][a];
      if (c == 0) continue;
      int b = n + 1 - 2 * a;
      // attach to a leaf: the leaf becomes unary, the new node is a leaf
      levels_[n + 1][a] += a * c;
      // attach to a unary node: it becomes binary, the new node is a leaf
      if (b >= 1) levels_[n + 1][a + 1] += b * c;
    }
  }
}

const BigInt& StateCount::at(int n, int leaves) const {
  static const BigInt zero(0);
  if (n < 1 || n > n_max()) return zero;
  if (leaves < 1 || leaves > (n + 1) / 2) return zero;
  return levels_[n][leaves];
}

const BigInt& StateCount::count(int n, int leaves, int unary) const {
  static const BigInt zero(0);
  if (unary < 0 || unary != n + 1 - 2 * leaves) return zero;
  return at(n, leaves);
}

const BigInt& StateCount::size_k_count(int n, int k) const {
  // k outdegree-two nodes force k+1 leaves.
  return at(n, k + 1);
}

BigInt StateCount::level_total(int n) const {
  BigInt s(0);
  if (n >= 1 && n <= n_max())
    for (const auto& c : levels_[n]) s += c;
  return s;
}

namespace {

void enumerate_rec(int next_label, int N, std::vector<int>& parent, std::vector<int>& outdeg,
                   const std::function<void(const treecore::LemnTree&)>& visit) {
  if (next_label > N) {
    visit(treecore::LemnTree(N, parent));
    return;
  }
  for (int v = 1; v < next_label; ++v) {
    if (outdeg[v] >= 2) continue;
    parent[next_label - 2] = v;
    ++outdeg[v];
    enumerate_rec(next_label + 1, N, parent, outdeg, visit);
    --outdeg[v];
  }
}

}  // namespace

void enumerate_trees_visit(int N, const std::function<void(const treecore::LemnTree&)>& visit) {
  if (N < 1) throw std::invalid_argument("enumerate_trees: N must be positive");
  if (N > 12) throw std::invalid_argument("enumerate_trees: N > 12 refused (combinatorial explosion)");
  std::vector<int> parent(N > 1 ? N - 1 : 0, 0);
  std::vector<int> outdeg(N + 1, 0);
  enumerate_rec(2, N, parent, outdeg, visit);
}

std::vector<std::string> enumerate_trees(int N) {
  std::vector<std::string> out;
  enumerate_trees_visit(N, [&](const treecore::LemnTree& t) { out.push_back(treecore::canonical_encode(t)); });
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::logic_error("enumerate_trees: duplicate tree generated");
  return out;
}

UPolynomial exact_pgf(const CoefficientTable& table, int N) {
  if (N < 1) throw std::invalid_argument("exact_pgf: N must be positive");
  if (N - 1 > table.n_max()) throw std::out_of_range("exact_pgf: table too small for size N");
  const auto& row = table.row(N - 1);
  BigInt total = table.row_sum(N - 1);
  std::vector<Rational> coeffs;
  coeffs.reserve(row.size());
  for (const auto& a : row) coeffs.push_back(make_rational(a, total));
  return UPolynomial(std::move(coeffs));
}

ExactMoments exact_moments(const CoefficientTable& table, int N) {
  UPolynomial p = exact_pgf(table, N);
  Rational mean(0), second_factorial(0);
  for (int k = 1; k <= p.degree(); ++k) {
    mean += p.coefficient(k) * k;
    if (k >= 2) second_factorial += p.coefficient(k) * k * (k - 1);
  }
  Rational variance = second_factorial + mean - mean * mean;
  return {mean, variance};
}

UPolynomial exact_pgf(int N) {
  if (N < 1) throw std::invalid_argument("exact_pgf: N must be positive");
  return exact_pgf(CoefficientTable::from_state_counts(N - 1), N);
}

ExactMoments exact_moments(int N) {
  if (N < 1) throw std::invalid_argument("exact_moments: N must be positive");
  return exact_moments(CoefficientTable::from_state_counts(N - 1), N);
}

BigInt random_below(const BigInt& bound, rng::Stream& stream) {
  if (bound <= 0) throw std::invalid_argument("random_below: bound must be positive");
  if (bound == 1) return BigInt(0);
  std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  std::size_t n_words = (bits + 63) / 64;
  unsigned top_bits = static_cast<unsigned>(bits % 64);
  std::uint64_t top_mask = top_bits ? ((std::uint64_t{1} << top_bits) - 1) : ~std::uint64_t{0};
  std::vector<std::uint64_t> words(n_words);
  BigInt value;
  for (;;) {
    for (auto& w : words) w = stream.next_u64();
    words.back() &= top_mask;
    mpz_import(value.get_mpz_t(), n_words, -1, sizeof(std::uint64_t), 0, 0, words.data());
    if (value < bound) return value;
  }
}

UniformSampler::UniformSampler(int size) : size_(size), exact_(size <= kExactLimit) {
  if (size < 1) throw std::invalid_argument("UniformSampler: size must be positive");
  auto max_leaves = [](int n) { return (n + 1) / 2; };
  if (exact_) {
    w_.resize(size + 1);
    w_[size].assign(max_leaves(size) + 1, BigInt(1));
    for (int n = size - 1; n >= 1; --n) {
      w_[n].assign(max_leaves(n) + 1, BigInt(0));
      for (int a = 1; a <= max_leaves(n); ++a) {
        int b = n + 1 - 2 * a;
        BigInt w = a * w_[n + 1][a];
        if (b >= 1) w += b * w_[n + 1][a + 1];
        w_[n][a] = std::move(w);
      }
    }
  } else {
    // Per-level normalized doubles; only within-level ratios are ever used.
    w_float_.resize(size + 1);
    w_float_[size].assign(max_leaves(size) + 1, 1.0);
    for (int n = size - 1; n >= 1; --n) {
      w_float_[n].assign(max_leaves(n) + 1, 0.0);
      double level_max = 0.0;
      for (int a = 1; a <= max_leaves(n); ++a) {
        int b = n + 1 - 2 * a;
        double w = a * w_float_[n + 1][a];
        if (b >= 1) w += b * w_float_[n + 1][a + 1];
        w_float_[n][a] = w;
        level_max = std::max(level_max, w);
      }
      for (auto& w : w_float_[n]) w /= level_max;
    }
  }
}

const BigInt& UniformSampler::total_trees() const {
  if (!exact_) throw std::logic_error("total_trees: float-mode sampler has no exact count");
  return w_[1][1];
}

treecore::LemnTree UniformSampler::sample(rng::Stream& stream) const {
  std::vector<int> parent(size_ > 1 ? size_ - 1 : 0, 0);
  std::vector<int> leaves{1};
  std::vector<int> unaries;
  for (int label = 2; label <= size_; ++label) {
    const int n = label - 1;  // current size
    const auto a = static_cast<std::uint64_t>(leaves.size());
    const auto b = static_cast<std::uint64_t>(unaries.size());
    bool attach_to_leaf;
    if (exact_) {
      BigInt t_leaf = BigInt(static_cast<unsigned long>(a)) * w_[n + 1][leaves.size()];
      BigInt total = t_leaf;
      if (b >= 1) total += BigInt(static_cast<unsigned long>(b)) * w_[n + 1][leaves.size() + 1];
      attach_to_leaf = random_below(total, stream) < t_leaf;
    } else {
      double t_leaf = static_cast<double>(a) * w_float_[n + 1][leaves.size()];
      double t_unary = b ? static_cast<double>(b) * w_float_[n + 1][leaves.size() + 1] : 0.0;
      attach_to_leaf = stream.next_double() * (t_leaf + t_unary) < t_leaf;
    }
    if (attach_to_leaf) {
      auto idx = static_cast<std::size_t>(stream.next_below(a));
      int node = leaves[idx];
      leaves[idx] = label;  // new node is a leaf; the old leaf became unary
      unaries.push_back(node);
      parent[label - 2] = node;
    } else {
      auto idx = static_cast<std::size_t>(stream.next_below(b));
      int node = unaries[idx];
      unaries[idx] = unaries.back();
      unaries.pop_back();
      leaves.push_back(label);
      parent[label - 2] = node;
    }
  }
  return treecore::LemnTree(size_, std::move(parent));
}

treecore::LemnTree uniform_sample(int N, rng::Stream& stream) {
  return UniformSampler(N).sample(stream);
}

std::complex<double> rho(std::complex<double> u) {
  std::complex<double> s = std::sqrt(std::complex<double>(1.0, 0.0) - 2.0 * u);
  return std::log((1.0 + s) / (1.0 - s)) / s;
}

AsymptoticConstants asymptotic_constants() {
  const double rho1 = rho(std::complex<double>(1.0, 0.0)).real();
  auto beta = [rho1](double u) { return (rho1 / rho(std::complex<double>(u, 0.0))).real(); };

  const double h = 1e-4;
  double fm3 = beta(1.0 - 3 * h), fm2 = beta(1.0 - 2 * h), fm1 = beta(1.0 - h);
  double f0 = beta(1.0);
  double fp1 = beta(1.0 + h), fp2 = beta(1.0 + 2 * h), fp3 = beta(1.0 + 3 * h);

  // Order-6 central difference stencils.
  double d1 = (-fm3 + 9 * fm2 - 45 * fm1 + 45 * fp1 - 9 * fp2 + fp3) / (60 * h);
  double d2 = (2 * fm3 - 27 * fm2 + 270 * fm1 - 490 * f0 + 270 * fp1 - 27 * fp2 + 2 * fp3) /
              (180 * h * h);

  double mean_slope = d1 / f0;
  double var_slope = d2 / f0 + mean_slope - mean_slope * mean_slope;
  return {rho1, mean_slope, var_slope};
}

std::string rational_to_json(const Rational& q) {
  nlohmann::ordered_json j;
  j["num"] = q.get_num().get_str();
  j["den"] = q.get_den().get_str();
  j["float"] = q.get_d();
  return j.dump();
}

}  // namespace lemtree::exactcomb
