#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "lemtree/lemgeo.hpp"
#include "lemtree/polymodels.hpp"
#include "lemtree/rng.hpp"
#include "lemtree/treecore.hpp"

using namespace lemtree;
using lemgeo::cplx;
using lemgeo::PolynomialRep;

namespace {

PolynomialRep disk_polynomial(int degree, std::uint64_t seed, std::uint64_t stream_id = 0) {
  polymodels::ModelSpec model{polymodels::ModelKind::iid_uniform_disk, degree};
  rng::Stream stream(seed, stream_id);
  return polymodels::sample_zeros(model, stream);
}

}  // namespace

TEST_CASE("representations agree after conversion") {
  rng::Stream stream(100, 0);
  std::vector<cplx> zeros(12);
  for (auto& zero : zeros)
    zero = cplx(2 * stream.next_double() - 1, 2 * stream.next_double() - 1);
  auto p = PolynomialRep::from_zeros(zeros);
  p.ensure_coeffs();
  CHECK(p.degree() == 12);
  CHECK(static_cast<int>(p.coeffs().size()) == 13);

  // zero form and monomial form at 16 random points, relative 1e-8
  for (int i = 0; i < 16; ++i) {
    cplx z(2 * stream.next_double() - 1, 2 * stream.next_double() - 1);
    cplx prod(1.0);
    for (const auto& zero : zeros) prod *= z - zero;
    cplx horner(0.0);
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) horner = horner * z + *it;
    CHECK(std::abs(prod - horner) <= 1e-8 * std::max(1.0, std::abs(prod)));
    CHECK(std::abs(p.eval(z) - prod) <= 1e-8 * std::max(1.0, std::abs(prod)));
  }

  // monomial -> zeros (root finding) round trip
  auto q = PolynomialRep::from_coeffs(p.coeffs());
  q.ensure_zeros();
  auto found = q.zeros();
  std::vector<bool> used(found.size(), false);
  for (const auto& zero : zeros) {
    double best = 1e9;
    std::size_t best_idx = 0;
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(found[j] - zero) < best) {
        best = std::abs(found[j] - zero);
        best_idx = j;
      }
    }
    used[best_idx] = true;
    CHECK(best < 1e-7);
  }
}

TEST_CASE("polynomial json parsing") {
  auto p = PolynomialRep::from_json(R"({"zeros": [[1.0, 0.0], [-1.0, 0.0]]})");
  CHECK(p.degree() == 2);
  CHECK(p.has_zeros());
  auto q = PolynomialRep::from_json(R"({"coeffs": [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]})");
  CHECK(q.degree() == 2);
  auto c = PolynomialRep::from_json(R"({"basis": "chebyshev-T", "coeffs": [0.0, 0.0, 1.0]})");
  CHECK(c.degree() == 2);
  CHECK(c.has_chebyshev());
  CHECK_THROWS_AS(PolynomialRep::from_json(R"({"what": 1})"), std::invalid_argument);
}

TEST_CASE("log derivative field") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});
  CHECK(std::abs(lemgeo::log_derivative_field(p, cplx(0, 0))) == 0.0);  // symmetry
  auto linear = PolynomialRep::from_coeffs({cplx(-1, 0), cplx(1, 0)});
  CHECK(std::abs(lemgeo::log_derivative_field(linear, cplx(2, 0)) - cplx(1, 0)) < 1e-14);
  CHECK_THROWS_AS(lemgeo::log_derivative_field(p, cplx(1, 0)), lemgeo::EvaluationAtZero);

  // dual-representation agreement on a random degree-30 input
  rng::Stream stream(101, 0);
  std::vector<cplx> zeros(30);
  for (auto& zero : zeros)
    zero = cplx(2 * stream.next_double() - 1, 2 * stream.next_double() - 1);
  auto zp = PolynomialRep::from_zeros(zeros);
  auto cp = zp;
  cp.ensure_coeffs();
  auto coeff_only = PolynomialRep::from_coeffs(cp.coeffs());
  for (int i = 0; i < 20; ++i) {
    cplx w(3 * stream.next_double() - 1.5, 3 * stream.next_double() - 1.5);
    cplx a = zp.log_derivative(w);
    cplx b = coeff_only.log_derivative(w);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("critical points of explicit polynomials") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});  // z^2 - 1
  auto crit = lemgeo::critical_points(p);
  REQUIRE(crit.points.size() == 1);
  CHECK(std::abs(crit.points[0]) < 1e-12);
  CHECK(crit.converged);

  auto q = PolynomialRep::from_coeffs({cplx(0, 0), cplx(-3, 0), cplx(0, 0), cplx(1, 0)});  // z^3-3z
  auto qcrit = lemgeo::critical_points(q);
  REQUIRE(qcrit.points.size() == 2);
  std::vector<double> xs{qcrit.points[0].real(), qcrit.points[1].real()};
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(xs[1] == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(lemgeo::critical_points(PolynomialRep::from_coeffs({cplx(1, 0), cplx(1, 0)})),
                  std::invalid_argument);
}

TEST_CASE("critical points: residual contract and the derivative coefficient identity") {
  auto p = disk_polynomial(10, 102);
  auto crit = lemgeo::critical_points(p);
  REQUIRE(crit.points.size() == 9);
  CHECK(crit.converged);
  for (double r : crit.residuals) CHECK(r <= 1e-10);

  cplx zero_sum(0.0);
  for (const auto& zero : p.zeros()) zero_sum += zero;
  cplx crit_sum(0.0);
  for (const auto& w : crit.points) crit_sum += w;
  CHECK(std::abs(crit_sum - zero_sum * (9.0 / 10.0)) < 1e-8);
}

TEST_CASE("genericity verdicts") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});
  auto crit = lemgeo::critical_points(p);
  CHECK(lemgeo::genericity_check(p, crit).generic);

  // z^8 - 1: all seven nontrivial critical points coincide at the origin
  std::vector<cplx> coeffs(9, cplx(0, 0));
  coeffs[0] = cplx(-1, 0);
  coeffs[8] = cplx(1, 0);
  auto erdos = PolynomialRep::from_coeffs(coeffs);
  erdos.ensure_zeros();
  auto ecrit = lemgeo::critical_points(erdos);
  auto report = lemgeo::genericity_check(erdos, ecrit);
  CHECK(!report.generic);
  CHECK(report.min_critical_separation <= lemgeo::kTauSep * erdos.geometry_scale());

  // random Chebyshev-basis gaussian combinations: conjugate critical pairs
  // share |p|, so the value gap collapses
  int non_generic = 0;
  for (int t = 0; t < 5; ++t) {
    rng::Stream stream(103, t);
    auto g = polymodels::sample_coeffs(
        polymodels::ModelSpec{polymodels::ModelKind::gaussian_chebyshev, 20}, stream);
    g.ensure_zeros();
    auto gcrit = lemgeo::critical_points(g);
    if (!lemgeo::genericity_check(g, gcrit).generic) ++non_generic;
  }
  CHECK(non_generic >= 4);
}

TEST_CASE("tracing the bernoulli lemniscate: symmetry, level, membership") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});
  auto petals = lemgeo::trace_singular_component(p, cplx(0, 0), 1.0);

  for (auto& petal : petals) {
    CHECK(petal.vertices.size() >= 10);
    CHECK(petal.vertices.front() == petal.vertices.back());
    for (const auto& v : petal.vertices)
      CHECK(std::abs(std::abs(p.eval(v)) - 1.0) <= 2e-6);
    auto inside = lemgeo::zeros_in_petal(p, petal);
    CHECK(inside.size() == 1);
    CHECK(petal.winding_count == 1);
  }
  // one petal holds +1, the other -1
  CHECK(petals[0].enclosed_zeros != petals[1].enclosed_zeros);

  // mirror symmetry about the imaginary axis: petal extents match
  auto max_abs_re = [](const lemgeo::PetalCurve& petal) {
    double m = 0;
    for (const auto& v : petal.vertices) m = std::max(m, std::abs(v.real()));
    return m;
  };
  CHECK(max_abs_re(petals[0]) == doctest::Approx(max_abs_re(petals[1])).epsilon(1e-3));
}

TEST_CASE("cubic with zeros 0, 3, 10: top split and the full tree") {
  auto p = PolynomialRep::from_zeros({cplx(0, 0), cplx(3, 0), cplx(10, 0)});
  auto crit = lemgeo::critical_points(p);
  REQUIRE(crit.points.size() == 2);
  int top = crit.order[0];
  auto petals = lemgeo::trace_singular_component_log(p, crit.points[top], crit.log_values[top]);
  auto z1 = lemgeo::zeros_in_petal(p, petals[0]);
  auto z2 = lemgeo::zeros_in_petal(p, petals[1]);
  std::vector<std::vector<int>> split{z1, z2};
  std::sort(split.begin(), split.end(), [](auto& a, auto& b) { return a.size() < b.size(); });
  CHECK(split[0] == std::vector<int>{2});     // {10}
  CHECK(split[1] == std::vector<int>{0, 1});  // {0, 3}

  auto tree = lemgeo::build_lemniscate_tree(p);
  CHECK(tree.size() == 2);
  CHECK(tree.parent(2) == 1);
}

TEST_CASE("single-zero petals contain no critical points") {
  int single_petals = 0;
  for (int t = 0; t < 20; ++t) {
    auto p = disk_polynomial(20, 104, t);
    auto crit = lemgeo::critical_points(p);
    if (!crit.converged || !lemgeo::genericity_check(p, crit).generic) continue;
    for (std::size_t j = 0; j < crit.points.size(); ++j) {
      std::array<lemgeo::PetalCurve, 2> petals;
      try {
        petals = lemgeo::trace_singular_component_log(p, crit.points[j], crit.log_values[j]);
      } catch (const lemgeo::NumericError&) {
        continue;
      }
      for (auto& petal : petals) {
        auto inside = lemgeo::zeros_in_petal(p, petal);
        if (inside.size() != 1) continue;
        ++single_petals;
        // even-odd membership of every other critical point against the petal
        for (std::size_t k = 0; k < crit.points.size(); ++k) {
          if (k == j) continue;
          const auto& v = petal.vertices;
          bool in = false;
          double x = crit.points[k].real(), y = crit.points[k].imag();
          for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            double y1 = v[i].imag(), y2 = v[i + 1].imag();
            if ((y1 > y) == (y2 > y)) continue;
            double x_cross = v[i].real() + (y - y1) / (y2 - y1) * (v[i + 1].real() - v[i].real());
            if (x_cross > x) in = !in;
          }
          CHECK(!in);
        }
      }
    }
  }
  CHECK(single_petals > 100);  // the census must actually have run
}

TEST_CASE("build_lemniscate_tree on the simplest polynomials") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});
  auto tree = lemgeo::build_lemniscate_tree(p);
  CHECK(tree.size() == 1);

  // degenerate: a double zero is never generic
  auto degenerate = PolynomialRep::from_zeros({cplx(0, 0), cplx(0, 0), cplx(1, 0)});
  CHECK_THROWS_AS(lemgeo::build_lemniscate_tree(degenerate), lemgeo::NonGenericPolynomial);
}

TEST_CASE("petal census matches the tree: outdegree = petals with 2+ zeros") {
  for (int t = 0; t < 5; ++t) {
    auto p = disk_polynomial(15, 105, t);
    treecore::LemnTree tree = treecore::LemnTree::single();
    try {
      tree = lemgeo::build_lemniscate_tree(p);
    } catch (const lemgeo::NumericError&) {
      continue;
    }
    auto crit = lemgeo::critical_points(p);
    auto children = tree.children_lists();
    for (int r = 0; r < static_cast<int>(crit.points.size()); ++r) {
      int idx = crit.order[r];
      auto petals = lemgeo::trace_singular_component_log(p, crit.points[idx], crit.log_values[idx]);
      int fat = 0;
      long zero_total = 0;
      for (auto& petal : petals) {
        auto inside = lemgeo::zeros_in_petal(p, petal);
        if (inside.size() >= 2) ++fat;
        zero_total += static_cast<long>(inside.size());
      }
      CHECK(fat == static_cast<int>(children[r + 1].size()));
      if (r == 0) CHECK(zero_total == p.degree());  // root petals hold every zero
    }
  }
}

TEST_CASE("real-rooted pipeline basics") {
  auto two = PolynomialRep::from_zeros({cplx(0.3, 0), cplx(-0.5, 0)});
  CHECK(lemgeo::real_rooted_tree(two).size() == 1);

  // z^3 - 3z has tied critical values |p(1)| = |p(-1)| = 2
  auto tied = PolynomialRep::from_coeffs({cplx(0, 0), cplx(-3, 0), cplx(0, 0), cplx(1, 0)});
  CHECK_THROWS_AS(lemgeo::real_rooted_tree(tied), lemgeo::NonGenericPolynomial);

  // complex zeros are rejected by the real pipeline
  auto complex_p = PolynomialRep::from_zeros({cplx(0, 1), cplx(0, -1), cplx(1, 0)});
  CHECK_THROWS_AS(lemgeo::real_rooted_tree(complex_p), lemgeo::NonRealCritical);

  // perturbed Chebyshev degree 10: 9-node tree with branching = valley count
  rng::Stream stream(106, 0);
  auto series = polymodels::perturbed_chebyshev(10, stream);
  auto rep = PolynomialRep::from_chebyshev(series);
  auto perm = lemgeo::real_rooted_permutation(rep);
  auto tree = lemgeo::real_rooted_tree(rep);
  CHECK(tree.size() == 9);
  CHECK(treecore::outdegree_profile(tree).n2 == treecore::count_valleys(perm));
}

TEST_CASE("cross-pipeline agreement on real-rooted polynomials") {
  int accepted = 0, agreed = 0;
  for (int t = 0; t < 40; ++t) {
    rng::Stream stream(107, t);
    int degree = 5 + static_cast<int>(stream.next_below(16));  // 5..20
    std::vector<cplx> zeros(degree);
    for (auto& zero : zeros) zero = cplx(2 * stream.next_double() - 1, 0.0);
    auto p = PolynomialRep::from_zeros(zeros);
    try {
      auto geometric = lemgeo::build_lemniscate_tree(p);
      auto combinatorial = lemgeo::real_rooted_tree(p);
      ++accepted;
      if (treecore::canonical_encode(geometric) == treecore::canonical_encode(combinatorial))
        ++agreed;
    } catch (const lemgeo::NumericError&) {
      continue;
    }
  }
  CHECK(accepted >= 30);
  CHECK(agreed == accepted);
}

TEST_CASE("pairing stats on the bernoulli lemniscate") {
  auto p = PolynomialRep::from_zeros({cplx(1, 0), cplx(-1, 0)});
  auto stats = lemgeo::pairing_stats(p, 11.0);
  CHECK(stats.paired_fraction == 1.0);
  CHECK(stats.small_petal_fraction == 1.0);
  CHECK(stats.eligible_zeros == 2);
}

TEST_CASE("pairing stats: census lower bound from the tree profile") {
  for (int t = 0; t < 3; ++t) {
    auto p = disk_polynomial(50, 108, t);
    treecore::LemnTree tree = treecore::LemnTree::single();
    try {
      tree = lemgeo::build_lemniscate_tree(p);
    } catch (const lemgeo::NumericError&) {
      continue;
    }
    auto profile = treecore::outdegree_profile(tree);
    auto stats = lemgeo::pairing_stats(p, 11.0);
    CHECK(stats.traced_components == 49);
    CHECK(stats.small_petal_fraction >= 1.0 - 2.0 * profile.n2 / 50.0);
    CHECK(stats.paired_fraction >= 0.0);
    CHECK(stats.paired_fraction <= 1.0);
  }
}
