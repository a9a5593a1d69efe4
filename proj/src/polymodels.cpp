#include "lemtree/polymodels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lemtree::polymodels {

using cplx = std::complex<double>;

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "iid_uniform_disk") return ModelKind::iid_uniform_disk;
  if (name == "iid_uniform_sphere") return ModelKind::iid_uniform_sphere;
  if (name == "iid_custom_density") return ModelKind::iid_custom_density;
  if (name == "kac") return ModelKind::kac;
  if (name == "kostlan") return ModelKind::kostlan;
  if (name == "weyl") return ModelKind::weyl;
  if (name == "gaussian_chebyshev") return ModelKind::gaussian_chebyshev;
  if (name == "perturbed_chebyshev") return ModelKind::perturbed_chebyshev;
  throw std::invalid_argument("unknown model: " + name);
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::iid_uniform_disk: return "iid_uniform_disk";
    case ModelKind::iid_uniform_sphere: return "iid_uniform_sphere";
    case ModelKind::iid_custom_density: return "iid_custom_density";
    case ModelKind::kac: return "kac";
    case ModelKind::kostlan: return "kostlan";
    case ModelKind::weyl: return "weyl";
    case ModelKind::gaussian_chebyshev: return "gaussian_chebyshev";
    case ModelKind::perturbed_chebyshev: return "perturbed_chebyshev";
  }
  throw std::logic_error("model_kind_name: bad enum");
}

bool is_iid_zero_model(ModelKind kind) {
  return kind == ModelKind::iid_uniform_disk || kind == ModelKind::iid_uniform_sphere ||
         kind == ModelKind::iid_custom_density;
}

namespace {

cplx draw_uniform_disk(rng::Stream& stream) {
  double radius = std::sqrt(stream.next_double());
  double angle = 2 * std::numbers::pi * stream.next_double();
  return std::polar(radius, angle);
}

cplx draw_uniform_sphere(rng::Stream& stream) {
  for (;;) {
    double z = 1.0 - 2.0 * stream.next_double();  // uniform cos(theta)
    double phi = 2 * std::numbers::pi * stream.next_double();
    if (z >= 1.0) continue;  // projection pole
    double s = std::sqrt(1.0 - z * z);
    // Stereographic projection from the north pole onto the equatorial plane.
    return cplx(s * std::cos(phi), s * std::sin(phi)) / (1.0 - z);
  }
}

cplx draw_custom(const CustomDensity& density, rng::Stream& stream) {
  if (!density.density || !(density.bound > 0.0) || !(density.support_radius > 0.0))
    throw std::invalid_argument("iid_custom_density: density, bound and support_radius required");
  for (;;) {
    double x = density.support_radius * (2.0 * stream.next_double() - 1.0);
    double y = density.support_radius * (2.0 * stream.next_double() - 1.0);
    cplx z(x, y);
    double d = density.density(z);
    if (d < 0.0 || d > density.bound)
      throw std::invalid_argument("iid_custom_density: density exceeds its declared bound");
    if (stream.next_double() * density.bound < d) return z;
  }
}

cplx draw_gaussian(bool real_only, rng::Stream& stream) {
  if (real_only) return cplx(stream.next_gaussian(), 0.0);
  constexpr double half = std::numbers::sqrt2 / 2.0;  // N(0, 1/2) components
  double re = stream.next_gaussian() * half;
  double im = stream.next_gaussian() * half;
  return cplx(re, im);
}

}  // namespace

lemgeo::PolynomialRep sample_zeros(const ModelSpec& model, rng::Stream& stream) {
  if (!is_iid_zero_model(model.kind))
    throw std::invalid_argument("sample_zeros: model is not an iid zero model");
  if (model.degree < 2) throw std::invalid_argument("sample_zeros: degree must be >= 2");
  std::vector<cplx> zeros(model.degree);
  for (auto& zero : zeros) {
    switch (model.kind) {
      case ModelKind::iid_uniform_disk: zero = draw_uniform_disk(stream); break;
      case ModelKind::iid_uniform_sphere: zero = draw_uniform_sphere(stream); break;
      default: zero = draw_custom(*model.custom, stream); break;
    }
  }
  return lemgeo::PolynomialRep::from_zeros(std::move(zeros));
}

lemgeo::PolynomialRep sample_coeffs(const ModelSpec& model, rng::Stream& stream) {
  if (model.degree < 2) throw std::invalid_argument("sample_coeffs: degree must be >= 2");
  const int n = model.degree;
  switch (model.kind) {
    case ModelKind::kac:
    case ModelKind::kostlan:
    case ModelKind::weyl: {
      std::vector<cplx> coeffs(n + 1);
      for (int k = 0; k <= n; ++k) {
        double sigma = 1.0;
        if (model.kind == ModelKind::kostlan) {
          double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
          sigma = std::exp(0.5 * log_binom);
        } else if (model.kind == ModelKind::weyl) {
          sigma = std::exp(-0.5 * std::lgamma(k + 1.0));
        }
        coeffs[k] = sigma * draw_gaussian(model.real_gaussians, stream);
      }
      if (coeffs[n] == cplx(0.0)) coeffs[n] = cplx(1e-300, 0.0);  // degree must not collapse
      return lemgeo::PolynomialRep::from_coeffs(std::move(coeffs));
    }
    case ModelKind::gaussian_chebyshev: {
      std::vector<double> b(n + 1);
      for (auto& c : b) c = stream.next_gaussian();
      if (b[n] == 0.0) b[n] = 1e-300;
      return lemgeo::PolynomialRep::from_chebyshev(ChebSeries(std::move(b)));
    }
    default:
      throw std::invalid_argument("sample_coeffs: not a coefficient model");
  }
}

ChebSeries perturbed_chebyshev(int n, rng::Stream& stream) {
  if (n < 2) throw std::invalid_argument("perturbed_chebyshev: n must be >= 2");
  std::vector<double> b(n + 1, 0.0);
  for (int k = 0; k < n; ++k) b[k] = (stream.next_below(2) == 0 ? 1.0 : -1.0) / n;
  b[n] = 1.0;
  return ChebSeries(std::move(b));
}

lemgeo::PolynomialRep sample_polynomial(const ModelSpec& model, rng::Stream& stream) {
  if (is_iid_zero_model(model.kind)) return sample_zeros(model, stream);
  if (model.kind == ModelKind::perturbed_chebyshev)
    return lemgeo::PolynomialRep::from_chebyshev(perturbed_chebyshev(model.degree, stream));
  return sample_coeffs(model, stream);
}

}  // namespace lemtree::polymodels
