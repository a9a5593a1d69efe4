#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lemtree/exactcomb.hpp"
#include "lemtree/exprunner.hpp"
#include "lemtree/lemgeo.hpp"
#include "lemtree/polymodels.hpp"
#include "lemtree/rng.hpp"
#include "lemtree/treecore.hpp"

namespace py = pybind11;
using namespace lemtree;

namespace {

py::object bigint_to_py(const exactcomb::BigInt& v) {
  // route through the decimal string; exact for any size
  return py::int_(py::str(v.get_str()));
}

py::dict moments_dict(const exactcomb::ExactMoments& m) {
  py::dict d;
  d["mean"] = m.mean.get_d();
  d["variance"] = m.variance.get_d();
  d["mean_num"] = bigint_to_py(exactcomb::BigInt(m.mean.get_num()));
  d["mean_den"] = bigint_to_py(exactcomb::BigInt(m.mean.get_den()));
  d["variance_num"] = bigint_to_py(exactcomb::BigInt(m.variance.get_num()));
  d["variance_den"] = bigint_to_py(exactcomb::BigInt(m.variance.get_den()));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "lemniscate trees: exact enumeration, uniform sampling, and numerical extraction "
            "from polynomials";

  py::class_<treecore::LemnTree>(m, "Tree")
      .def(py::init<int, std::vector<int>>(), py::arg("size"), py::arg("parent"))
      .def_property_readonly("size", &treecore::LemnTree::size)
      .def_property_readonly("parent", &treecore::LemnTree::parent_array)
      .def("encode", &treecore::canonical_encode)
      .def("profile",
           [](const treecore::LemnTree& t) {
             auto p = treecore::outdegree_profile(t);
             return py::make_tuple(p.n0, p.n1, p.n2);
           })
      .def("to_json", &treecore::tree_to_json)
      .def("__repr__", [](const treecore::LemnTree& t) { return treecore::canonical_encode(t); });

  m.def("tree_from_permutation", [](const std::vector<int>& values) {
    return treecore::tree_from_permutation(treecore::Permutation(values));
  });
  m.def("count_valleys", [](const std::vector<int>& values) {
    return treecore::count_valleys(treecore::Permutation(values));
  });
  m.def("enumerate_trees", &exactcomb::enumerate_trees, py::arg("size"));
  m.def("tree_count", [](int size) {
    return bigint_to_py(exactcomb::StateCount(size).level_total(size));
  });

  m.def(
      "coefficient_rows",
      [](int n_max) {
        auto table = exactcomb::CoefficientTable::expand_f(n_max);
        std::vector<std::vector<py::object>> rows;
        for (int n = 0; n <= table.n_max(); ++n) {
          std::vector<py::object> row;
          for (const auto& a : table.row(n)) row.push_back(bigint_to_py(a));
          rows.push_back(std::move(row));
        }
        return rows;
      },
      py::arg("n_max"));

  m.def("exact_moments", [](int size) { return moments_dict(exactcomb::exact_moments(size)); });
  m.def("exact_pgf", [](int size) {
    auto p = exactcomb::exact_pgf(size);
    std::vector<std::pair<py::object, py::object>> out;
    for (const auto& c : p.coefficients())
      out.emplace_back(bigint_to_py(exactcomb::BigInt(c.get_num())),
                       bigint_to_py(exactcomb::BigInt(c.get_den())));
    return out;
  });

  m.def(
      "sample_trees",
      [](int size, int count, std::uint64_t seed) {
        exactcomb::UniformSampler sampler(size);
        std::vector<treecore::LemnTree> out;
        out.reserve(count);
        for (int i = 0; i < count; ++i) {
          rng::Stream stream(seed, static_cast<std::uint64_t>(i));
          out.push_back(sampler.sample(stream));
        }
        return out;
      },
      py::arg("size"), py::arg("count"), py::arg("seed"));

  m.def("asymptotic_constants", [] {
    auto c = exactcomb::asymptotic_constants();
    py::dict d;
    d["rho1"] = c.rho1;
    d["mean_slope"] = c.mean_slope;
    d["var_slope"] = c.var_slope;
    return d;
  });

  m.def("critical_points", [](const std::vector<std::complex<double>>& zeros) {
    auto crit = lemgeo::critical_points(lemgeo::PolynomialRep::from_zeros(zeros));
    return crit.points;
  });
  m.def("tree_from_zeros", [](const std::vector<std::complex<double>>& zeros) {
    return lemgeo::build_lemniscate_tree(lemgeo::PolynomialRep::from_zeros(zeros));
  });
  m.def(
      "pairing_fractions",
      [](const std::vector<std::complex<double>>& zeros, double r, bool trace_petals) {
        auto stats = lemgeo::pairing_stats(lemgeo::PolynomialRep::from_zeros(zeros), r, trace_petals);
        return py::make_tuple(stats.paired_fraction, stats.small_petal_fraction);
      },
      py::arg("zeros"), py::arg("r") = 11.0, py::arg("trace_petals") = true);

  m.def(
      "perturbed_chebyshev",
      [](int n, std::uint64_t seed) {
        rng::Stream stream(seed, 0);
        return polymodels::perturbed_chebyshev(n, stream).coefficients();
      },
      py::arg("n"), py::arg("seed"));
  m.def("chebyshev_tree_valleys", [](const std::vector<double>& coeffs) {
    auto rep = lemgeo::PolynomialRep::from_chebyshev(polymodels::ChebSeries(coeffs));
    return treecore::count_valleys(lemgeo::real_rooted_permutation(rep));
  });

  m.def(
      "singular_components",
      [](const std::vector<std::complex<double>>& zeros) {
        auto rep = lemgeo::PolynomialRep::from_zeros(zeros);
        rep.ensure_zeros();
        auto crit = lemgeo::critical_points(rep);
        py::list comps;
        for (std::size_t r = 0; r < crit.points.size(); ++r) {
          int idx = crit.order[r];
          auto petals = lemgeo::trace_singular_component_log(rep, crit.points[idx], crit.log_values[idx]);
          py::dict comp;
          comp["critical_point"] = crit.points[idx];
          comp["log_level"] = crit.log_values[idx];
          py::list petal_list, enclosed;
          for (auto& petal : petals) {
            auto zs = lemgeo::zeros_in_petal(rep, petal);
            petal_list.append(petal.vertices);
            enclosed.append(zs);
          }
          comp["petals"] = petal_list;
          comp["enclosed"] = enclosed;
          comps.append(comp);
        }
        return comps;
      },
      py::arg("zeros"));
}
