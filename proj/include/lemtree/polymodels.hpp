#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "lemtree/chebyshev.hpp"
#include "lemtree/lemgeo.hpp"
#include "lemtree/rng.hpp"

namespace lemtree::polymodels {

enum class ModelKind {
  iid_uniform_disk,
  iid_uniform_sphere,
  iid_custom_density,
  kac,
  kostlan,
  weyl,
  gaussian_chebyshev,
  perturbed_chebyshev,
};

ModelKind model_kind_from_name(const std::string& name);  // throws std::invalid_argument
std::string model_kind_name(ModelKind kind);
bool is_iid_zero_model(ModelKind kind);

/// Density on the plane for rejection sampling: density(z) <= bound on the
/// disk |z| <= support_radius and 0 outside it.
struct CustomDensity {
  std::function<double(std::complex<double>)> density;
  double bound = 0;
  double support_radius = 0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::iid_uniform_disk;
  int degree = 2;
  std::optional<CustomDensity> custom;
  /// Coefficient models draw complex Gaussians by default (Re and Im
  /// independent N(0,1/2), so E|g|^2 = 1); set true for real N(0,1) instead.
  bool real_gaussians = false;
};

/// degree i.i.d. zeros. uniform_disk: angle uniform, radius sqrt(U).
/// uniform_sphere: uniform on the unit sphere pushed through stereographic
/// projection from the north pole (plane density 1/(pi (1+|z|^2)^2)).
/// custom: rejection against the declared bound.
lemgeo::PolynomialRep sample_zeros(const ModelSpec& model, rng::Stream& stream);

/// Random-coefficient models: c_k = g_k sigma_k with sigma_k = 1 (kac),
/// sqrt(binom(N,k)) (kostlan), 1/sqrt(k!) (weyl). gaussian_chebyshev draws
/// real standard Gaussian coefficients in the Chebyshev-T basis.
lemgeo::PolynomialRep sample_coeffs(const ModelSpec& model, rng::Stream& stream);

/// T_n + (1/n) sum_{k<n} b_k T_k with b_k independent uniform on {-1,+1}.
ChebSeries perturbed_chebyshev(int n, rng::Stream& stream);

/// Dispatch on model kind (perturbed_chebyshev included).
lemgeo::PolynomialRep sample_polynomial(const ModelSpec& model, rng::Stream& stream);

}  // namespace lemtree::polymodels
