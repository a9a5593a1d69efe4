#include "lemtree/lemgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace lemtree::lemgeo {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolynomialRep

PolynomialRep PolynomialRep::from_zeros(std::vector<cplx> zeros, cplx leading) {
  if (zeros.empty()) throw std::invalid_argument("PolynomialRep: empty zero list");
  if (leading == cplx(0.0)) throw std::invalid_argument("PolynomialRep: zero leading coefficient");
  PolynomialRep p;
  p.degree_ = static_cast<int>(zeros.size());
  p.leading_ = leading;
  p.zeros_ = std::move(zeros);
  return p;
}

PolynomialRep PolynomialRep::from_coeffs(std::vector<cplx> coeffs) {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  if (coeffs.size() < 2) throw std::invalid_argument("PolynomialRep: degree must be >= 1");
  PolynomialRep p;
  p.degree_ = static_cast<int>(coeffs.size()) - 1;
  p.leading_ = coeffs.back();
  p.coeffs_ = std::move(coeffs);
  return p;
}

PolynomialRep PolynomialRep::from_chebyshev(polymodels::ChebSeries series) {
  if (series.degree() < 1) throw std::invalid_argument("PolynomialRep: degree must be >= 1");
  PolynomialRep p;
  p.degree_ = series.degree();
  p.leading_ = series.coefficients().back() * std::pow(2.0, series.degree() - 1);
  p.cheb_ = std::move(series);
  return p;
}

const std::vector<cplx>& PolynomialRep::zeros() const {
  if (!zeros_) throw std::logic_error("PolynomialRep: zeros not present (call ensure_zeros)");
  return *zeros_;
}

const std::vector<cplx>& PolynomialRep::coeffs() const {
  if (!coeffs_) throw std::logic_error("PolynomialRep: coeffs not present (call ensure_coeffs)");
  return *coeffs_;
}

const polymodels::ChebSeries& PolynomialRep::chebyshev() const {
  if (!cheb_) throw std::logic_error("PolynomialRep: no Chebyshev series present");
  return *cheb_;
}

void PolynomialRep::ensure_coeffs() {
  if (coeffs_) return;
  if (zeros_) {
    std::vector<cplx> c{leading_};
    for (const cplx& zero : *zeros_) {
      c.push_back(c.back());
      for (std::size_t i = c.size() - 2; i >= 1; --i) c[i] = c[i - 1] - zero * c[i];
      c[0] = -zero * c[0];
    }
    coeffs_ = std::move(c);
  } else {
    coeffs_ = polymodels::cheb_to_monomial(*cheb_);
  }
}

namespace {
std::vector<cplx> aberth_roots(std::vector<cplx> coeffs, std::vector<double>* residuals_out);
}

void PolynomialRep::ensure_zeros() {
  if (zeros_) return;
  ensure_coeffs();
  zeros_ = aberth_roots(*coeffs_, nullptr);
}

cplx PolynomialRep::eval(cplx z) const {
  if (coeffs_) {
    cplx acc(0.0);
    for (auto it = coeffs_->rbegin(); it != coeffs_->rend(); ++it) acc = acc * z + *it;
    return acc;
  }
  if (cheb_) return polymodels::cheb_eval(*cheb_, z);
  cplx acc = leading_;
  for (const cplx& zero : *zeros_) acc *= z - zero;
  return acc;
}

cplx PolynomialRep::deriv(cplx z) const {
  if (coeffs_) {
    cplx acc(0.0);
    for (int k = degree_; k >= 1; --k) acc = acc * z + (*coeffs_)[k] * static_cast<double>(k);
    return acc;
  }
  if (cheb_) return polymodels::cheb_eval(polymodels::cheb_derivative(*cheb_), z);
  // prefix/suffix products over (z - zero_i)
  const auto& zs = *zeros_;
  std::size_t n = zs.size();
  std::vector<cplx> suffix(n + 1, cplx(1.0));
  for (std::size_t i = n; i >= 1; --i) suffix[i - 1] = suffix[i] * (z - zs[i - 1]);
  cplx prefix(1.0), acc(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    acc += prefix * suffix[j + 1];
    prefix *= z - zs[j];
  }
  return leading_ * acc;
}

double PolynomialRep::log_abs(cplx z) const {
  if (zeros_) {
    // Exponent-tracked product of squared distances: no over/underflow at any
    // degree this library supports.
    double mant = 1.0;
    long exp2 = 0;
    for (const cplx& zero : *zeros_) {
      mant *= std::norm(z - zero);
      if (mant > 1e150 || (mant < 1e-150 && mant > 0.0)) {
        int e;
        mant = std::frexp(mant, &e);
        exp2 += e;
      }
    }
    if (mant == 0.0) return -std::numeric_limits<double>::infinity();
    return 0.5 * (std::log(mant) + static_cast<double>(exp2) * std::numbers::ln2) +
           std::log(std::abs(leading_));
  }
  return std::log(std::abs(eval(z)));
}

cplx PolynomialRep::log_derivative(cplx z) const {
  if (zeros_) {
    cplx acc(0.0);
    for (const cplx& zero : *zeros_) {
      cplx d = z - zero;
      double n2 = std::norm(d);
      if (n2 == 0.0) throw EvaluationAtZero("log_derivative at a zero of p");
      acc += std::conj(d) / n2;  // 1/(z - zero)
    }
    return acc;
  }
  cplx p = eval(z);
  if (p == cplx(0.0)) throw EvaluationAtZero("log_derivative at a zero of p");
  return deriv(z) / p;
}

cplx PolynomialRep::second_over_p(cplx z) const {
  if (zeros_) {
    // p''/p = R^2 + R' with R = sum 1/(z-zero), R' = -sum 1/(z-zero)^2.
    cplx r(0.0), rp(0.0);
    for (const cplx& zero : *zeros_) {
      cplx d = z - zero;
      double n2 = std::norm(d);
      if (n2 == 0.0) throw EvaluationAtZero("second_over_p at a zero of p");
      cplx inv = std::conj(d) / n2;
      r += inv;
      rp -= inv * inv;
    }
    return r * r + rp;
  }
  if (cheb_) {
    auto d1 = polymodels::cheb_derivative(*cheb_);
    auto d2 = polymodels::cheb_derivative(d1);
    cplx p = polymodels::cheb_eval(*cheb_, z);
    if (p == cplx(0.0)) throw EvaluationAtZero("second_over_p at a zero of p");
    return polymodels::cheb_eval(d2, z) / p;
  }
  cplx p = eval(z);
  if (p == cplx(0.0)) throw EvaluationAtZero("second_over_p at a zero of p");
  cplx acc(0.0);
  for (int k = degree_; k >= 2; --k)
    acc = acc * z + (*coeffs_)[k] * static_cast<double>(k) * static_cast<double>(k - 1);
  return acc / p;
}

double PolynomialRep::geometry_scale() const {
  const auto& zs = zeros();
  double best = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i)
    for (std::size_t j = i + 1; j < zs.size(); ++j) best = std::max(best, std::abs(zs[i] - zs[j]));
  return best;
}

PolynomialRep PolynomialRep::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  auto as_cplx_list = [](const nlohmann::json& arr) {
    std::vector<cplx> out;
    for (const auto& e : arr) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return out;
  };
  if (j.contains("zeros")) return from_zeros(as_cplx_list(j.at("zeros")));
  if (j.contains("basis")) {
    if (j.at("basis").get<std::string>() != "chebyshev-T")
      throw std::invalid_argument("polynomial JSON: unknown basis");
    return from_chebyshev(polymodels::ChebSeries(j.at("coeffs").get<std::vector<double>>()));
  }
  if (j.contains("coeffs")) return from_coeffs(as_cplx_list(j.at("coeffs")));
  throw std::invalid_argument("polynomial JSON: expected zeros, coeffs, or a chebyshev-T series");
}

cplx log_derivative_field(const PolynomialRep& p, cplx w) { return p.log_derivative(w); }

// ---------------------------------------------------------------------------
// Critical points

namespace {

// Simultaneous Aberth-Ehrlich iteration with perturbed-ring initial guesses,
// on monomial coefficients (low to high, leading nonzero). Returns all roots;
// residuals (if requested) are |p| at the returned points with coefficients
// normalized to max |c| = 1.
std::vector<cplx> aberth_roots(std::vector<cplx> coeffs, std::vector<double>* residuals_out) {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  if (coeffs.size() < 2) throw std::invalid_argument("aberth_roots: degree must be >= 1");
  const int m = static_cast<int>(coeffs.size()) - 1;

  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (!(cmax > 0.0) || !std::isfinite(cmax))
    throw NumericError("aberth_roots: coefficients not finite");
  for (auto& c : coeffs) c /= cmax;

  std::vector<cplx> dcoeffs(m);
  for (int k = 1; k <= m; ++k) dcoeffs[k - 1] = coeffs[k] * static_cast<double>(k);

  auto horner = [](const std::vector<cplx>& c, cplx z) {
    cplx acc(0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  };

  // Fujiwara-style root bound for the initial ring.
  double lead = std::abs(coeffs[m]);
  double bound = 0.0;
  for (int k = 0; k < m; ++k) {
    double t = std::pow(std::abs(coeffs[k]) / lead, 1.0 / (m - k));
    bound = std::max(bound, t);
  }
  double r0 = std::clamp(bound, 1e-3, 1e3);
  cplx center = -coeffs[m - 1] / (coeffs[m] * static_cast<double>(m));
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag())) center = cplx(0.0);

  std::vector<cplx> z(m);
  for (int j = 0; j < m; ++j) {
    double theta = 2 * kPi * j / m + 0.4 / m + 0.53;  // perturbed to break symmetry
    z[j] = center + r0 * cplx(std::cos(theta), std::sin(theta));
  }

  const int max_sweeps = 600;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0.0;
    for (int j = 0; j < m; ++j) {
      cplx pv = horner(coeffs, z[j]);
      if (pv == cplx(0.0)) continue;
      cplx dv = horner(dcoeffs, z[j]);
      if (dv == cplx(0.0)) {
        z[j] += cplx(1e-8 * (1.0 + std::abs(z[j])), 1e-8);
        worst = 1.0;
        continue;
      }
      cplx newton = pv / dv;
      cplx repulsion(0.0);
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        cplx d = z[j] - z[k];
        double n2 = std::norm(d);
        if (n2 == 0.0) {
          d = cplx(1e-12, 1e-12);
          n2 = std::norm(d);
        }
        repulsion += std::conj(d) / n2;
      }
      cplx denom = cplx(1.0) - newton * repulsion;
      cplx step = (denom == cplx(0.0)) ? newton : newton / denom;
      // Near-zero denominators (clustered iterates) can fling a point far
      // away; bound the move instead.
      double cap = 2.0 * (1.0 + std::abs(z[j]));
      double mag = std::abs(step);
      if (!(mag <= cap) || !std::isfinite(mag)) step *= cap / (mag > 0 ? mag : 1.0);
      z[j] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[j])));
    }
    if (worst < 1e-14) break;
  }

  // Newton polish.
  for (int j = 0; j < m; ++j) {
    for (int it = 0; it < 3; ++it) {
      cplx pv = horner(coeffs, z[j]);
      cplx dv = horner(dcoeffs, z[j]);
      if (dv == cplx(0.0)) break;
      cplx step = pv / dv;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z[j] -= step;
    }
  }

  if (residuals_out) {
    residuals_out->resize(m);
    for (int j = 0; j < m; ++j) (*residuals_out)[j] = std::abs(horner(coeffs, z[j]));
  }
  return z;
}

// Monomial coefficients without mutating the rep.
std::vector<cplx> monomial_coeffs_of(const PolynomialRep& p) {
  if (p.has_coeffs()) return p.coeffs();
  PolynomialRep copy = p;
  copy.ensure_coeffs();
  return copy.coeffs();
}

}  // namespace

CriticalData critical_points(const PolynomialRep& p) {
  if (p.degree() < 2) throw std::invalid_argument("critical_points: degree must be >= 2");
  std::vector<cplx> pc = monomial_coeffs_of(p);

  // Rescale z so the critical points land near the unit disk; this keeps the
  // Horner evaluations (and the residual contract) well conditioned even when
  // zeros are spread out.
  double scale = 1.0;
  if (p.has_zeros())
    for (const cplx& zero : p.zeros()) scale = std::max(scale, std::abs(zero));
  else {
    double lead = std::abs(pc.back());
    for (std::size_t k = 0; k + 1 < pc.size(); ++k)
      scale = std::max(scale, std::pow(std::abs(pc[k]) / lead, 1.0 / (pc.size() - 1 - k)));
    scale = std::clamp(scale, 1.0, 1e6);
  }

  std::vector<cplx> dq(pc.size() - 1);  // derivative of p(scale * x)
  double s_pow = 1.0;
  for (std::size_t k = 1; k < pc.size(); ++k) {
    s_pow *= scale;
    dq[k - 1] = pc[k] * static_cast<double>(k) * s_pow;
  }

  CriticalData crit;
  crit.points = aberth_roots(dq, &crit.residuals);
  crit.residual_tolerance = 1e-10;
  for (auto& w : crit.points) w *= scale;

  // When the zeros are known, polish on the reciprocal-sum field: the root
  // condition sum 1/(w - zero) = 0 is far better conditioned than the
  // coefficient form for clustered configurations.
  if (p.has_zeros()) {
    for (auto& w : crit.points) {
      for (int it = 0; it < 3; ++it) {
        cplx r(0.0), rp(0.0);
        bool hit_zero = false;
        for (const cplx& zero : p.zeros()) {
          cplx d = w - zero;
          double n2 = std::norm(d);
          if (n2 == 0.0) {
            hit_zero = true;
            break;
          }
          cplx inv = std::conj(d) / n2;
          r += inv;
          rp -= inv * inv;
        }
        if (hit_zero || rp == cplx(0.0)) break;
        cplx step = r / rp;  // Newton on R(w) = 0
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        w -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(w))) break;
      }
    }
    // Residuals re-measured in the scaled coefficient frame.
    double dmax = 0.0;
    for (const auto& c : dq) dmax = std::max(dmax, std::abs(c));
    for (std::size_t j = 0; j < crit.points.size(); ++j) {
      cplx x = crit.points[j] / scale;
      cplx acc(0.0);
      for (auto it = dq.rbegin(); it != dq.rend(); ++it) acc = acc * x + *it;
      crit.residuals[j] = std::abs(acc) / dmax;
    }
  }

  crit.converged = true;
  for (double r : crit.residuals)
    if (!(r <= crit.residual_tolerance)) crit.converged = false;

  const int m = p.degree() - 1;
  crit.values.resize(m);
  crit.log_values.resize(m);
  for (int j = 0; j < m; ++j) {
    crit.log_values[j] = p.log_abs(crit.points[j]);
    crit.values[j] = std::exp(crit.log_values[j]);
  }
  crit.order.resize(m);
  for (int j = 0; j < m; ++j) crit.order[j] = j;
  std::stable_sort(crit.order.begin(), crit.order.end(),
                   [&](int a, int b) { return crit.log_values[a] > crit.log_values[b]; });
  return crit;
}

GenericityReport genericity_check(const PolynomialRep& p, const CriticalData& crit) {
  GenericityReport rep;
  const auto& zs = p.zeros();
  const int m = static_cast<int>(crit.points.size());
  double zero_scale = p.geometry_scale();

  rep.min_critical_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      rep.min_critical_separation =
          std::min(rep.min_critical_separation, std::abs(crit.points[i] - crit.points[j]));

  rep.min_relative_value_gap = std::numeric_limits<double>::infinity();
  for (int r = 0; r + 1 < m; ++r) {
    double hi = crit.log_values[crit.order[r]];
    double lo = crit.log_values[crit.order[r + 1]];
    rep.min_relative_value_gap = std::min(rep.min_relative_value_gap, -std::expm1(lo - hi));
  }

  rep.zero_on_critical_level = false;
  for (const auto& w : crit.points) {
    for (const auto& zero : zs) {
      if (std::abs(w - zero) <= kTauZero * zero_scale) {
        rep.zero_on_critical_level = true;
        break;
      }
    }
    if (rep.zero_on_critical_level) break;
  }
  for (double lv : crit.log_values)
    if (!std::isfinite(lv)) rep.zero_on_critical_level = true;

  rep.generic = rep.min_relative_value_gap > kTauGap &&
                rep.min_critical_separation > kTauSep * zero_scale && !rep.zero_on_critical_level;
  return rep;
}

// ---------------------------------------------------------------------------
// Level-curve tracing

namespace {

struct LoopResult {
  std::vector<cplx> vertices;
  int return_ray = -1;
};

// Gradient of log|p| as a complex vector.
cplx grad_log_abs(const PolynomialRep& p, cplx z) { return std::conj(p.log_derivative(z)); }

// Newton corrector onto {log|p| = log_t} along the gradient direction.
// Returns false when it fails to land within tolerance.
bool correct_onto_curve(const PolynomialRep& p, double log_t, cplx& z, double max_move) {
  double moved = 0.0;
  for (int it = 0; it < 12; ++it) {
    double f = p.log_abs(z) - log_t;
    if (std::abs(f) < 1e-9) return true;
    cplx g = grad_log_abs(p, z);
    double g2 = std::norm(g);
    if (!(g2 > 0.0) || !std::isfinite(g2)) return false;
    cplx step = -f * g / g2;
    moved += std::abs(step);
    if (moved > max_move) return false;
    z += step;
  }
  return std::abs(p.log_abs(z) - log_t) < 1e-7;
}

double nearest_zero_distance(const PolynomialRep& p, cplx z) {
  if (!p.has_zeros()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& zero : p.zeros()) best = std::min(best, std::abs(z - zero));
  return best;
}

LoopResult trace_loop(const PolynomialRep& p, cplx w, double log_t,
                      const std::array<double, 4>& rays, int start_ray, double d0,
                      const TraceOptions& opts) {
  LoopResult loop;
  cplx dir = std::polar(1.0, rays[start_ray]);
  cplx z = w + d0 * dir;
  if (!correct_onto_curve(p, log_t, z, 0.9 * d0))
    throw TracingFailure("trace: could not seed the curve at the saddle");

  loop.vertices.push_back(w);
  loop.vertices.push_back(z);

  double h = d0;
  const double h_min = 1e-12 * d0;
  const double bootstrap_radius = 10.0 * d0;
  bool escaped = false;

  for (long step_count = 0; step_count < opts.max_points; ++step_count) {
    cplx g = grad_log_abs(p, z);
    double gn = std::abs(g);
    if (!(gn > 0.0) || !std::isfinite(gn)) throw TracingFailure("trace: vanishing gradient");
    cplx tangent = cplx(0.0, 1.0) * g / gn;
    if (tangent.real() * dir.real() + tangent.imag() * dir.imag() < 0.0) tangent = -tangent;

    // Level-curve lobes around a zero have curvature radius on the order of
    // the distance to that zero; keeping the step below it stops a chord from
    // cutting across a lobe (or hopping onto a nearby smooth component of the
    // same level set).
    h = std::min(h, std::max(0.4 * nearest_zero_distance(p, z), 4.0 * h_min));
    // Near another critical point the curve pinches into a narrow neck whose
    // two sides the corrector can hop between (reversing the traversal).
    // |p'/p''| estimates the distance to the nearest critical point; throttle
    // only when it is commensurate with the step.
    {
      cplx s2 = p.second_over_p(z);
      double s2n = std::abs(s2);
      if (s2n > 0.0 && std::isfinite(s2n)) {
        double d_crit = gn / s2n;
        if (d_crit < 4.0 * h) h = std::min(h, std::max(0.4 * d_crit, 4.0 * h_min));
      }
    }
    // On the return approach the step must not jump across the saddle, or the
    // trace would continue onto the other branch and merge the two petals.
    if (escaped) h = std::min(h, std::max(0.25 * std::abs(z - w), 4.0 * h_min));

    cplx z_new;
    cplx chord_dir;
    for (;;) {
      z_new = z + h * tangent;
      bool ok = correct_onto_curve(p, log_t, z_new, 0.75 * h);
      if (ok) {
        cplx chord = z_new - z;
        double clen = std::abs(chord);
        if (clen > 0.0) {
          chord_dir = chord / clen;
          double turn = std::abs(
              wrap_angle(std::atan2(chord_dir.imag(), chord_dir.real()) -
                         std::atan2(dir.imag(), dir.real())));
          // The end tangent must agree with the chord as well; a chord that
          // bridges a sharp bend satisfies the turn test but lands with a
          // transverse tangent, which would wedge every later step.
          if (turn <= opts.max_chord_angle) {
            cplx g_end = grad_log_abs(p, z_new);
            double ge = std::abs(g_end);
            if (ge > 0.0 && std::isfinite(ge)) {
              cplx tan_end = cplx(0.0, 1.0) * g_end / ge;
              if (tan_end.real() * chord_dir.real() + tan_end.imag() * chord_dir.imag() < 0.0)
                tan_end = -tan_end;
              double end_turn = std::abs(
                  wrap_angle(std::atan2(tan_end.imag(), tan_end.real()) -
                             std::atan2(chord_dir.imag(), chord_dir.real())));
              if (end_turn <= opts.max_chord_angle) break;
            }
          }
        }
      }
      h *= 0.5;
      if (h < h_min) throw TracingFailure("trace: step underflow");
    }

    z = z_new;
    dir = chord_dir;
    loop.vertices.push_back(z);

    double dist_w = std::abs(z - w);
    if (!escaped && dist_w > bootstrap_radius) escaped = true;
    if (escaped && dist_w <= 3.0 * std::max(h, d0)) {
      // Loop closed: identify the ray we came back on.
      double back = std::atan2((z - w).imag(), (z - w).real());
      int best = 0;
      double best_err = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 4; ++k) {
        double err = std::abs(wrap_angle(back - rays[k]));
        if (err < best_err) {
          best_err = err;
          best = k;
        }
      }
      loop.return_ray = best;
      loop.vertices.push_back(w);
      return loop;
    }

    h = std::min(h * 1.3, std::max(3.0 * d0, 0.3 * dist_w));
  }
  throw TracingFailure("trace: point budget exceeded");
}

double signed_area(const std::vector<cplx>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    a += poly[i].real() * poly[i + 1].imag() - poly[i + 1].real() * poly[i].imag();
  return 0.5 * a;
}

}  // namespace

std::array<PetalCurve, 2> trace_singular_component_log(const PolynomialRep& p, cplx w,
                                                       double log_level,
                                                       const TraceOptions& opts) {
  cplx quad = p.second_over_p(w) * 0.5;  // coefficient of (z-w)^2 in log p near the saddle
  if (quad == cplx(0.0) || !std::isfinite(quad.real()) || !std::isfinite(quad.imag()))
    throw TracingFailure("trace: degenerate saddle (p'' vanishes)");

  // The four level directions solve Re(quad e^{2 i phi}) = 0.
  double phi0 = 0.5 * (kPi / 2 - std::arg(quad));
  std::array<double, 4> rays;
  for (int k = 0; k < 4; ++k) rays[k] = wrap_angle(phi0 + k * kPi / 2);

  double d0;
  if (p.has_zeros()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& zero : p.zeros()) nearest = std::min(nearest, std::abs(w - zero));
    if (!(nearest > 0.0)) throw TracingFailure("trace: saddle coincides with a zero");
    d0 = opts.initial_step_factor * nearest;
  } else {
    d0 = opts.initial_step_factor * (1.0 + std::abs(w));
  }

  LoopResult first = trace_loop(p, w, log_level, rays, 0, d0, opts);
  if (first.return_ray == 0 || first.return_ray == 2)
    throw TracingFailure("trace: loop returned on its own branch");

  std::array<bool, 4> used{};
  used[0] = true;
  used[first.return_ray] = true;
  int second_start = -1;
  for (int k = 0; k < 4; ++k)
    if (!used[k]) {
      second_start = k;
      break;
    }
  LoopResult second = trace_loop(p, w, log_level, rays, second_start, d0, opts);
  if (used[second.return_ray] || second.return_ray == second_start)
    throw TracingFailure("trace: petal rays do not pair up");

  std::array<PetalCurve, 2> petals;
  LoopResult* loops[2] = {&first, &second};
  for (int i = 0; i < 2; ++i) {
    petals[i].vertices = std::move(loops[i]->vertices);
    if (signed_area(petals[i].vertices) < 0.0)
      std::reverse(petals[i].vertices.begin(), petals[i].vertices.end());
    petals[i].log_level = log_level;
    petals[i].level = std::exp(log_level);
  }
  return petals;
}

std::array<PetalCurve, 2> trace_singular_component(const PolynomialRep& p, cplx w, double level,
                                                   const TraceOptions& opts) {
  if (!(level > 0.0)) throw std::invalid_argument("trace_singular_component: level must be positive");
  return trace_singular_component_log(p, w, std::log(level), opts);
}

// ---------------------------------------------------------------------------
// Zero membership

std::vector<int> zeros_in_petal(const PolynomialRep& p, PetalCurve& petal) {
  const auto& zs = p.zeros();
  const auto& v = petal.vertices;
  if (v.size() < 4 || v.front() != v.back())
    throw std::invalid_argument("zeros_in_petal: petal polyline not closed");

  // Even-odd point-in-polygon.
  std::vector<int> inside;
  for (int j = 0; j < static_cast<int>(zs.size()); ++j) {
    double x = zs[j].real(), y = zs[j].imag();
    bool in = false;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      double y1 = v[i].imag(), y2 = v[i + 1].imag();
      if ((y1 > y) == (y2 > y)) continue;
      double x_cross = v[i].real() + (y - y1) / (y2 - y1) * (v[i + 1].real() - v[i].real());
      if (x_cross > x) in = !in;
    }
    if (in) inside.push_back(j);
  }

  // Discrete argument principle: total change of arg p along the polyline.
  // With the zero form, the phase change per edge is the sum of the angles
  // the edge subtends at each zero; each term is principal-valued, so short
  // edges keep every term well inside (-pi, pi).
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    for (const auto& zero : zs) {
      cplx a = v[i] - zero;
      cplx b = v[i + 1] - zero;
      total += std::arg(b * std::conj(a));
    }
  }
  double winding = total / (2 * kPi);
  long rounded = std::lround(winding);
  if (std::abs(winding - static_cast<double>(rounded)) > 0.1)
    throw ArgumentMismatch("zeros_in_petal: winding integral not near an integer: " +
                           std::to_string(winding));
  if (rounded != static_cast<long>(inside.size()))
    throw ArgumentMismatch("zeros_in_petal: winding " + std::to_string(rounded) +
                           " != point-in-polygon count " + std::to_string(inside.size()));
  if (rounded < 1) throw ArgumentMismatch("zeros_in_petal: petal encloses no zero");

  petal.winding_count = static_cast<int>(rounded);
  petal.enclosed_zeros = inside;
  return inside;
}

// ---------------------------------------------------------------------------
// Tree assembly

treecore::LemnTree build_lemniscate_tree(const PolynomialRep& p, const TraceOptions& opts) {
  PolynomialRep rep = p;
  rep.ensure_zeros();
  CriticalData crit = critical_points(rep);
  if (!crit.converged) throw NumericError("build_lemniscate_tree: critical points did not converge");
  GenericityReport gen = genericity_check(rep, crit);
  if (!gen.generic) throw NonGenericPolynomial("build_lemniscate_tree: polynomial is not generic");

  const int node_count = rep.degree() - 1;
  struct Block {
    std::vector<int> zeros;  // sorted
    int pending_parent = 0;  // tree label waiting to adopt the block's top node
  };
  std::vector<Block> blocks;
  {
    Block all;
    all.zeros.resize(rep.degree());
    for (int j = 0; j < rep.degree(); ++j) all.zeros[j] = j;
    blocks.push_back(std::move(all));
  }

  std::vector<int> parent(node_count > 1 ? node_count - 1 : 0, 0);
  for (int r = 0; r < node_count; ++r) {
    const int label = r + 1;
    const int idx = crit.order[r];
    auto petals = trace_singular_component_log(rep, crit.points[idx], crit.log_values[idx], opts);
    std::vector<int> z1 = zeros_in_petal(rep, petals[0]);
    std::vector<int> z2 = zeros_in_petal(rep, petals[1]);

    std::vector<int> merged;
    std::merge(z1.begin(), z1.end(), z2.begin(), z2.end(), std::back_inserter(merged));
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
      throw PartitionInconsistency("build_lemniscate_tree: petals overlap");

    auto it = std::find_if(blocks.begin(), blocks.end(),
                           [&](const Block& b) { return b.zeros == merged; });
    if (it == blocks.end())
      throw PartitionInconsistency("build_lemniscate_tree: petal union is not a current block");

    int pending = it->pending_parent;
    if (label == 1) {
      if (pending != 0)
        throw PartitionInconsistency("build_lemniscate_tree: root block has a pending parent");
    } else {
      if (pending == 0)
        throw PartitionInconsistency("build_lemniscate_tree: non-root block lacks a parent");
      parent[label - 2] = pending;
    }

    blocks.erase(it);
    blocks.push_back({std::move(z1), label});
    blocks.push_back({std::move(z2), label});
  }
  return treecore::LemnTree(node_count, std::move(parent));
}

// ---------------------------------------------------------------------------
// Real-rooted pipeline

treecore::Permutation real_rooted_permutation(const PolynomialRep& p) {
  const int m = p.degree() - 1;
  if (m < 1) throw std::invalid_argument("real_rooted_permutation: degree must be >= 2");

  std::vector<double> xs;
  std::vector<double> log_values;

  if (p.has_chebyshev() && !p.has_zeros()) {
    auto ds = polymodels::cheb_derivative(p.chebyshev());
    xs = polymodels::real_roots(ds, -1.05, 1.05, m);  // throws RootCountMismatch
    for (double x : xs) log_values.push_back(std::log(std::abs(polymodels::cheb_eval(p.chebyshev(), x))));
  } else {
    CriticalData crit = critical_points(p);
    if (!crit.converged) throw NumericError("real_rooted_permutation: critical points did not converge");
    double scale = 1.0;
    for (const auto& w : crit.points) scale = std::max(scale, std::abs(w));
    for (const auto& w : crit.points)
      if (std::abs(w.imag()) > 1e-8 * scale)
        throw NonRealCritical("real_rooted_permutation: critical point off the real axis");
    xs.resize(m);
    for (int j = 0; j < m; ++j) xs[j] = crit.points[j].real();
    std::sort(xs.begin(), xs.end());
    for (double x : xs) log_values.push_back(p.log_abs(cplx(x, 0.0)));
  }

  // Rank by decreasing |p(w)|; a near-tie means the draw is not generic.
  std::vector<int> order(m);
  for (int j = 0; j < m; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return log_values[a] > log_values[b]; });
  for (int r = 0; r + 1 < m; ++r) {
    double gap = -std::expm1(log_values[order[r + 1]] - log_values[order[r]]);
    if (!(gap > kTauGap))
      throw NonGenericPolynomial("real_rooted_permutation: tied critical values");
  }

  std::vector<int> labels(m);
  for (int r = 0; r < m; ++r) labels[order[r]] = r + 1;
  return treecore::Permutation(std::move(labels));
}

treecore::LemnTree real_rooted_tree(const PolynomialRep& p) {
  return treecore::tree_from_permutation(real_rooted_permutation(p));
}

// ---------------------------------------------------------------------------
// Pairing diagnostics

PairingStats pairing_stats(const PolynomialRep& p, double r, bool trace_petals,
                           const TraceOptions& opts) {
  if (!(r > 0.0)) throw std::invalid_argument("pairing_stats: r must be positive");
  PolynomialRep rep = p;
  rep.ensure_zeros();
  const int n = rep.degree();
  CriticalData crit = critical_points(rep);
  if (!crit.converged) throw NumericError("pairing_stats: critical points did not converge");

  PairingStats stats;
  const double min_modulus = std::pow(static_cast<double>(n), -0.25);
  int paired = 0;
  for (const auto& zero : rep.zeros()) {
    double nearest = std::numeric_limits<double>::infinity();
    int within = 0;
    double radius = r * std::abs(zero) / n;
    for (const auto& w : crit.points) {
      double d = std::abs(zero - w);
      nearest = std::min(nearest, d);
      if (d < radius) ++within;
    }
    stats.nearest_critical_distance.push_back(nearest);
    if (std::abs(zero) >= min_modulus) {
      ++stats.eligible_zeros;
      if (within == 1) ++paired;
    }
  }
  stats.paired_fraction =
      stats.eligible_zeros > 0 ? static_cast<double>(paired) / stats.eligible_zeros : 0.0;

  if (trace_petals) {
    int single = 0;
    for (std::size_t j = 0; j < crit.points.size(); ++j) {
      try {
        auto petals =
            trace_singular_component_log(rep, crit.points[j], crit.log_values[j], opts);
        auto z1 = zeros_in_petal(rep, petals[0]);
        auto z2 = zeros_in_petal(rep, petals[1]);
        ++stats.traced_components;
        if (std::min(z1.size(), z2.size()) == 1) ++single;
      } catch (const NumericError&) {
        // untraceable component: excluded from the census
      }
    }
    stats.small_petal_fraction =
        stats.traced_components > 0 ? static_cast<double>(single) / stats.traced_components : 0.0;
  }
  return stats;
}

}  // namespace lemtree::lemgeo
