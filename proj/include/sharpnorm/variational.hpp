#ifndef SHARPNORM_VARIATIONAL_HPP
#define SHARPNORM_VARIATIONAL_HPP

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sharpnorm/kernels.hpp"
#include "sharpnorm/quadrature.hpp"

// Lower bounds on the operator norm from compactly supported test
// functions, and the scalar-channel stability form that the sharp constant
// controls.

namespace sharpnorm {

struct ZeroNorm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Test function with compact support [lo, hi].  The canonical family is
// chi_(1,delta)(x)/sqrt(x), whose squared norm is ln(delta) analytically
// (kept exact to avoid polluting the slow 1/ln delta convergence study).
struct TestFunctionSpec {
  std::function<double(double)> fn;
  double lo = 0.0, hi = 0.0;
  double norm_sq = -1.0;  // < 0: compute by quadrature
  std::string label;

  static TestFunctionSpec chi_over_sqrt(double delta) {
    if (!(delta > 1.0))
      throw std::invalid_argument("chi_over_sqrt: delta must be > 1");
    TestFunctionSpec t;
    t.fn = [](double x) { return 1.0 / std::sqrt(x); };
    t.lo = 1.0;
    t.hi = delta;
    t.norm_sq = std::log(delta);
    t.label = "chi_(1," + std::to_string(delta) + ")/sqrt(x)";
    return t;
  }

  static TestFunctionSpec custom(std::function<double(double)> f, double lo, double hi,
                                 std::string label = "custom") {
    if (!(lo < hi) || !(lo > 0.0))
      throw std::invalid_argument("custom test function: need 0 < lo < hi");
    TestFunctionSpec t;
    t.fn = std::move(f);
    t.lo = lo;
    t.hi = hi;
    t.label = std::move(label);
    return t;
  }
};

// (K phi, phi) / ||phi||^2 with diagonal-aware double quadrature over the
// support box.
inline double rayleigh_quotient(const KernelSpec& kernel, const TestFunctionSpec& phi,
                                const QuadSpec& spec) {
  double norm_sq = phi.norm_sq;
  if (norm_sq < 0.0) {
    norm_sq = integrate_interval([&](double x) { return phi.fn(x) * phi.fn(x); },
                                 phi.lo, phi.hi, spec)
                  .value;
  }
  if (!(norm_sq > 0.0)) throw ZeroNorm("rayleigh_quotient: test function has zero norm");
  auto f = [&](double x, double y) { return kernel(x, y) * phi.fn(x) * phi.fn(y); };
  const double num =
      double_integral_box(f, phi.lo, phi.hi, phi.lo, phi.hi, true, true, spec).value;
  return num / norm_sq;
}

struct DeficitFit {
  double limit = 0.0;  // extrapolated quotient as delta -> inf
  double c1 = 0.0;     // 1/ln delta coefficient
  double c2 = 0.0;     // 1/(ln delta)^2 coefficient
  double rms = 0.0;    // fit residual
};

struct RayleighScan {
  std::vector<std::pair<double, double>> points;  // (delta, quotient)
  DeficitFit fit;
};

namespace detail {

// Least squares q = L - c1/ln d - c2/(ln d)^2 via 3x3 normal equations.
inline DeficitFit fit_deficit(const std::vector<std::pair<double, double>>& pts) {
  double a[3][3] = {};
  double b[3] = {};
  for (const auto& [delta, q] : pts) {
    const double x = -1.0 / std::log(delta);
    const double row[3] = {1.0, x, x * x};
    for (int i = 0; i < 3; ++i) {
      b[i] += row[i] * q;
      for (int j = 0; j < 3; ++j) a[i][j] += row[i] * row[j];
    }
  }
  // Gaussian elimination with partial pivoting.
  int piv[3] = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int p = k;
    for (int i = k + 1; i < 3; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (int i = k + 1; i < 3; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < 3; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  double c[3];
  for (int i = 2; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * c[j];
    c[i] = s / a[i][i];
  }
  (void)piv;
  DeficitFit fit;
  fit.limit = c[0];
  fit.c1 = c[1];
  fit.c2 = c[2];
  double ss = 0.0;
  for (const auto& [delta, q] : pts) {
    const double x = -1.0 / std::log(delta);
    const double model = c[0] + c[1] * x + c[2] * x * x;
    ss += (q - model) * (q - model);
  }
  fit.rms = std::sqrt(ss / pts.size());
  return fit;
}

}  // namespace detail

// Quotients of f_delta across an increasing delta list, with a two-term
// 1/ln delta extrapolation of the limit.  The fit is reported, not
// asserted.
inline RayleighScan rayleigh_scan(const KernelSpec& kernel,
                                  const std::vector<double>& deltas,
                                  const QuadSpec& spec) {
  if (deltas.size() < 3)
    throw std::invalid_argument("rayleigh_scan: need at least three deltas for the fit");
  RayleighScan scan;
  for (double d : deltas) {
    if (!(d > 1.0)) throw std::invalid_argument("rayleigh_scan: deltas must be > 1");
    scan.points.emplace_back(
        d, rayleigh_quotient(kernel, TestFunctionSpec::chi_over_sqrt(d), spec));
  }
  scan.fit = detail::fit_deficit(scan.points);
  return scan;
}

// delta * t(delta, delta*u) / sqrt(u): dominated by (g0(u)+g1(u))/u and
// converging pointwise to half of it as delta -> inf.
inline double dominated_limit_integrand(double delta, double u) {
  if (!(delta > 1.0)) throw std::domain_error("dominated_limit_integrand: delta must be > 1");
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("dominated_limit_integrand: u must be in (0,1)");
  return delta * kernel_t(delta, delta * u) / std::sqrt(u);
}

// Radial momentum-space amplitude with compact support.
struct RadialChannelFunction {
  std::function<double(double)> a;
  double lo = 0.0, hi = 0.0;
  std::string label;
};

// Single-channel energy form:
//   int e(p) a(p)^2 dp - (alpha c Z / pi) int int a(p') k_{0,1/2}(p',p) a(p) dp dp'.
inline double stability_form(const RadialChannelFunction& a, double Z,
                             const PhysicalParams& params, const QuadSpec& spec) {
  if (!(Z >= 0.0)) throw std::domain_error("stability_form: Z must be >= 0");
  if (!(a.lo > 0.0 && a.lo < a.hi))
    throw std::invalid_argument("stability_form: support must satisfy 0 < lo < hi");
  const double kinetic =
      integrate_interval([&](double p) { return energy(p, params) * a.a(p) * a.a(p); },
                         a.lo, a.hi, spec)
          .value;
  if (Z == 0.0) return kinetic;
  const PartialWaveIndex lowest{0, 1, 1};
  auto f = [&](double pp, double p) {
    return a.a(pp) * kernel_k(lowest, pp, p, params) * a.a(p);
  };
  const double potential =
      double_integral_box(f, a.lo, a.hi, a.lo, a.hi, true, true, spec).value;
  return kinetic - params.alpha * params.c * Z / kPi * potential;
}

struct StabilityReport {
  double form_value = 0.0;
  double bound_value = 0.0;  // (1 - Z/Z_c) mc^2 ||a||^2
  double margin = 0.0;
};

// Margin of the lower bound B >= (1 - Z/Z_c) mc^2 on one channel.
inline StabilityReport stability_check(const RadialChannelFunction& a, double Z,
                                       const PhysicalParams& params,
                                       const QuadSpec& spec) {
  const double zc = critical_charge(params.alpha);
  if (Z > zc * (1.0 + 1e-12))
    throw std::domain_error("stability_check: Z must not exceed Z_c");
  const double norm_sq =
      integrate_interval([&](double p) { return a.a(p) * a.a(p); }, a.lo, a.hi, spec)
          .value;
  const double mc2 = params.m * params.c * params.c;
  StabilityReport rep;
  rep.form_value = stability_form(a, Z, params, spec);
  rep.bound_value = (1.0 - Z / zc) * mc2 * norm_sq;
  rep.margin = rep.form_value - rep.bound_value;
  return rep;
}

// ---------------------------------------------------------------------------
// Random smooth bumps for the randomized stability suite: cubic B-spline
// shape with log-uniform support inside [1e-2, 1e2].
// ---------------------------------------------------------------------------

namespace detail {

inline double cubic_bspline(double s) {
  // Support [0,4], C^2, peak at s = 2.
  if (s <= 0.0 || s >= 4.0) return 0.0;
  if (s < 1.0) return s * s * s / 6.0;
  if (s < 2.0) return (-3.0 * s * s * s + 12.0 * s * s - 12.0 * s + 4.0) / 6.0;
  if (s < 3.0) return (3.0 * s * s * s - 24.0 * s * s + 60.0 * s - 44.0) / 6.0;
  const double r = 4.0 - s;
  return r * r * r / 6.0;
}

}  // namespace detail

inline RadialChannelFunction cubic_bump(double lo, double hi, double amplitude = 1.0) {
  if (!(lo > 0.0 && lo < hi))
    throw std::invalid_argument("cubic_bump: need 0 < lo < hi");
  const double width = hi - lo;
  RadialChannelFunction b;
  b.a = [=](double p) { return amplitude * detail::cubic_bspline(4.0 * (p - lo) / width); };
  b.lo = lo;
  b.hi = hi;
  b.label = "bump[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  return b;
}

inline RadialChannelFunction random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> log_center(std::log(1e-2), std::log(1e2));
  std::uniform_real_distribution<double> log_halfwidth(std::log(1.2), std::log(8.0));
  std::uniform_real_distribution<double> amp(0.25, 4.0);
  const double center = std::exp(log_center(rng));
  const double ratio = std::exp(log_halfwidth(rng));
  double lo = center / ratio, hi = center * ratio;
  lo = std::max(lo, 1e-2 / 8.0);
  hi = std::min(hi, 1e2 * 8.0);
  return cubic_bump(lo, hi, amp(rng));
}

}  // namespace sharpnorm

#endif  // SHARPNORM_VARIATIONAL_HPP
