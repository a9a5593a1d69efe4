#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lemtree/polymodels.hpp"
#include "lemtree/rng.hpp"

using namespace lemtree;
using polymodels::ChebSeries;
using polymodels::ModelKind;
using polymodels::ModelSpec;

TEST_CASE("model names round trip") {
  for (auto kind : {ModelKind::iid_uniform_disk, ModelKind::iid_uniform_sphere,
                    ModelKind::iid_custom_density, ModelKind::kac, ModelKind::kostlan,
                    ModelKind::weyl, ModelKind::gaussian_chebyshev, ModelKind::perturbed_chebyshev})
    CHECK(polymodels::model_kind_from_name(polymodels::model_kind_name(kind)) == kind);
  CHECK_THROWS_AS(polymodels::model_kind_from_name("nope"), std::invalid_argument);
}

TEST_CASE("uniform disk zeros: support and second moment") {
  ModelSpec model{ModelKind::iid_uniform_disk, 100};
  rng::Stream stream(1, 0);
  double sum_sq = 0;
  const int draws = 1000;  // 1000 x 100 zeros = 1e5
  for (int i = 0; i < draws; ++i) {
    auto p = polymodels::sample_zeros(model, stream);
    for (const auto& zero : p.zeros()) {
      CHECK(std::abs(zero) <= 1.0);
      sum_sq += std::norm(zero);
    }
  }
  double n = draws * 100.0;
  double stderr_mean = std::sqrt((1.0 / 12.0) / n);  // Var(|z|^2) = Var(U) = 1/12
  CHECK(std::abs(sum_sq / n - 0.5) < 3 * stderr_mean);
}

TEST_CASE("uniform sphere zeros: median modulus near 1") {
  ModelSpec model{ModelKind::iid_uniform_sphere, 100};
  rng::Stream stream(2, 0);
  std::vector<double> moduli;
  for (int i = 0; i < 1000; ++i) {
    auto p = polymodels::sample_zeros(model, stream);
    for (const auto& zero : p.zeros()) moduli.push_back(std::abs(zero));
  }
  std::nth_element(moduli.begin(), moduli.begin() + moduli.size() / 2, moduli.end());
  CHECK(std::abs(moduli[moduli.size() / 2] - 1.0) < 0.02);
}

TEST_CASE("custom density: rejection sampling against the declared bound") {
  polymodels::CustomDensity density;
  density.density = [](std::complex<double> z) {
    return std::abs(z) <= 2.0 ? 1.0 / (4 * std::numbers::pi) : 0.0;
  };
  density.bound = 1.0 / (4 * std::numbers::pi);
  density.support_radius = 2.0;
  ModelSpec model{ModelKind::iid_custom_density, 50, density};
  rng::Stream stream(3, 0);
  auto p = polymodels::sample_zeros(model, stream);
  for (const auto& zero : p.zeros()) CHECK(std::abs(zero) <= 2.0);

  ModelSpec bad{ModelKind::iid_custom_density, 10, polymodels::CustomDensity{}};
  CHECK_THROWS_AS(polymodels::sample_zeros(bad, stream), std::invalid_argument);
}

TEST_CASE("kac coefficients: standard complex gaussians") {
  ModelSpec model{ModelKind::kac, 3};
  rng::Stream stream(4, 0);
  double sum = 0, sum_sq = 0;
  const int draws = 25000;  // x4 coefficients
  for (int i = 0; i < draws; ++i) {
    auto p = polymodels::sample_coeffs(model, stream);
    for (const auto& c : p.coeffs()) {
      sum += c.real();
      sum_sq += c.real() * c.real();
    }
  }
  double n = draws * 4.0;
  double var = sum_sq / n - (sum / n) * (sum / n);
  CHECK(std::abs(var - 0.5) < 3 * 0.5 * std::sqrt(2.0 / n));
}

TEST_CASE("kostlan and weyl variance ladders; real-gaussian flag") {
  rng::Stream stream(5, 0);
  double e0 = 0, e1 = 0;
  for (int i = 0; i < 20000; ++i) {
    auto p = polymodels::sample_coeffs(ModelSpec{ModelKind::kostlan, 2}, stream);
    e0 += std::norm(p.coeffs()[0]);
    e1 += std::norm(p.coeffs()[1]);
  }
  CHECK(std::abs(e1 / e0 - 2.0) < 0.1);  // binom(2,1) = 2

  double w0 = 0, w3 = 0;
  for (int i = 0; i < 20000; ++i) {
    auto p = polymodels::sample_coeffs(ModelSpec{ModelKind::weyl, 3}, stream);
    w0 += std::norm(p.coeffs()[0]);
    w3 += std::norm(p.coeffs()[3]);
  }
  CHECK(std::abs(w3 / w0 - 1.0 / 6.0) < 0.02);  // 1/3!

  rng::Stream rstream(6, 0);
  ModelSpec real_model{ModelKind::kac, 2};
  real_model.real_gaussians = true;
  auto p = polymodels::sample_coeffs(real_model, rstream);
  for (const auto& c : p.coeffs()) CHECK(c.imag() == 0.0);
}

TEST_CASE("gaussian chebyshev draws a real series") {
  ModelSpec model{ModelKind::gaussian_chebyshev, 20};
  rng::Stream stream(7, 0);
  auto p = polymodels::sample_coeffs(model, stream);
  CHECK(p.has_chebyshev());
  CHECK(p.degree() == 20);
}

TEST_CASE("perturbed chebyshev: exact coefficient structure") {
  rng::Stream stream(8, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = polymodels::perturbed_chebyshev(10, stream);
    const auto& b = s.coefficients();
    REQUIRE(b.size() == 11);
    CHECK(b[10] == 1.0);
    for (int k = 0; k < 10; ++k) CHECK(std::abs(b[k]) == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("perturbed chebyshev n = 2: both roots real for every sign pattern") {
  for (double b0 : {-1.0, 1.0}) {
    for (double b1 : {-1.0, 1.0}) {
      // T_2 + (b0 + b1 T_1)/2 = 2x^2 + (b1/2) x + (b0/2 - 1)
      double disc = (b1 / 2) * (b1 / 2) - 4 * 2 * (b0 / 2 - 1);
      CHECK(disc > 0);
      ChebSeries s({b0 / 2, b1 / 2, 1.0});
      auto roots = polymodels::real_roots(s, -1.05, 1.05);
      CHECK(roots.size() == 2);
    }
  }
}

TEST_CASE("clenshaw evaluation identities") {
  ChebSeries t0({1.0});
  CHECK(polymodels::cheb_eval(t0, 0.3) == 1.0);
  CHECK(polymodels::cheb_eval(t0, -0.9) == 1.0);

  ChebSeries t3({0, 0, 0, 1.0});
  CHECK(polymodels::cheb_eval(t3, 0.5) == doctest::Approx(-1.0).epsilon(1e-14));  // 4x^3 - 3x at 1/2

  // Clenshaw vs the trigonometric form at 100 points
  rng::Stream stream(9, 0);
  std::vector<double> coeffs(13);
  for (auto& c : coeffs) c = 2.0 * stream.next_double() - 1.0;
  ChebSeries s(coeffs);
  for (int i = 0; i < 100; ++i) {
    double x = -1.0 + 2.0 * (i + 0.5) / 100;
    double naive = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) naive += coeffs[k] * std::cos(k * std::acos(x));
    CHECK(polymodels::cheb_eval(s, x) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("chebyshev derivative recurrence") {
  ChebSeries t1({0, 1.0});
  auto d1 = polymodels::cheb_derivative(t1);
  REQUIRE(d1.coefficients().size() == 1);
  CHECK(d1.coefficients()[0] == 1.0);

  ChebSeries t2({0, 0, 1.0});
  auto d2 = polymodels::cheb_derivative(t2);
  REQUIRE(d2.coefficients().size() == 2);
  CHECK(d2.coefficients()[0] == 0.0);
  CHECK(d2.coefficients()[1] == 4.0);  // d/dx T_2 = 4 T_1

  rng::Stream stream(10, 0);
  std::vector<double> coeffs(13);
  for (auto& c : coeffs) c = 2.0 * stream.next_double() - 1.0;
  ChebSeries s(coeffs);
  auto ds = polymodels::cheb_derivative(s);
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    double x = -0.95 + 1.9 * (i + 0.5) / 50;
    double fd = (polymodels::cheb_eval(s, x + h) - polymodels::cheb_eval(s, x - h)) / (2 * h);
    CHECK(polymodels::cheb_eval(ds, x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("real roots of T_4 to machine accuracy") {
  ChebSeries t4({0, 0, 0, 0, 1.0});
  auto roots = polymodels::real_roots(t4, -1.0, 1.0, 4);
  REQUIRE(roots.size() == 4);
  const double expected[] = {std::cos(7 * std::numbers::pi / 8), std::cos(5 * std::numbers::pi / 8),
                             std::cos(3 * std::numbers::pi / 8), std::cos(1 * std::numbers::pi / 8)};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(roots[i] - expected[i]) <= 1e-12);
}

TEST_CASE("real roots: no sign change yields the empty list") {
  ChebSeries s({3.0, 0, 1.0});  // 2x^2 + 2 > 0
  CHECK(polymodels::real_roots(s, -1.0, 1.0).empty());
  CHECK_THROWS_AS(polymodels::real_roots(s, -1.0, 1.0, 2), polymodels::RootCountMismatch);
  CHECK_THROWS_AS(polymodels::real_roots(s, -2.0, 1.0), std::invalid_argument);
}

TEST_CASE("perturbed chebyshev census: real roots, critical points, interlacing, residuals") {
  rng::Stream stream(11, 0);
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto s = polymodels::perturbed_chebyshev(10, stream);
    auto roots = polymodels::real_roots(s, -1.05, 1.05);
    auto crits = polymodels::real_roots(polymodels::cheb_derivative(s), -1.05, 1.05);
    if (roots.size() != 10 || crits.size() != 9) continue;
    ++ok;

    double max_coeff = 0;
    for (double c : s.coefficients()) max_coeff = std::max(max_coeff, std::abs(c));
    for (double root : roots) CHECK(std::abs(polymodels::cheb_eval(s, root)) <= 1e-10 * max_coeff);
    for (int i = 0; i < 9; ++i) {
      CHECK(roots[i] < crits[i]);
      CHECK(crits[i] < roots[i + 1]);
    }
  }
  CHECK(ok >= 990);  // the all-real property should hold essentially always
}

TEST_CASE("chebyshev to monomial conversion agrees with clenshaw below degree 30") {
  rng::Stream stream(12, 0);
  std::vector<double> coeffs(29);
  for (auto& c : coeffs) c = 2.0 * stream.next_double() - 1.0;
  ChebSeries s(coeffs);
  auto mono = polymodels::cheb_to_monomial(s);
  for (int i = 0; i < 16; ++i) {
    double x = -1.0 + 2.0 * (i + 0.5) / 16;
    std::complex<double> horner(0.0);
    for (auto it = mono.rbegin(); it != mono.rend(); ++it) horner = horner * x + *it;
    double reference = polymodels::cheb_eval(s, x);
    CHECK(std::abs(horner.real() - reference) <= 1e-8 * std::max(1.0, std::abs(reference)));
  }
  std::vector<double> big(32, 0.0);
  big[31] = 1.0;
  CHECK_THROWS_AS(polymodels::cheb_to_monomial(ChebSeries(big)), std::invalid_argument);
}
