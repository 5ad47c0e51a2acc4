#ifndef SHARPNORM_KERNELS_HPP
#define SHARPNORM_KERNELS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

// Kernel functions, special functions and physical constants for the
// half-line integral operator whose norm this library studies, together
// with the partial-wave kernels they reduce from.

namespace sharpnorm {

inline constexpr double kSharpConstant = 3.467401100272339655;  // pi^2/4 + 1
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr int kLegendreLMax = 8;
inline constexpr double kFineStructure = 7.2973525693e-3;

struct PhysicalParams {
  double m = 1.0;      // electron mass (natural units)
  double c = 1.0;      // light speed
  double alpha = kFineStructure;
  double Z = 1.0;      // nuclear charge

  void validate() const {
    if (!(m > 0.0)) throw std::invalid_argument("PhysicalParams: m must be > 0");
    if (!(c > 0.0)) throw std::invalid_argument("PhysicalParams: c must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("PhysicalParams: alpha must be in (0,1)");
    if (!(Z >= 0.0)) throw std::invalid_argument("PhysicalParams: Z must be >= 0");
  }
};

// Partial-wave channel label (l, s, m).  s and m are stored doubled so the
// half-integers stay exact; m never enters a kernel value, it only shapes
// the admissible index set.
struct PartialWaveIndex {
  int l = 0;
  int two_s = 1;   // 2s, +1 or -1
  int two_m = 1;   // 2m, odd integer, informational

  void validate() const {
    if (l < 0) throw std::invalid_argument("PartialWaveIndex: l must be >= 0");
    if (two_s != 1 && two_s != -1)
      throw std::invalid_argument("PartialWaveIndex: s must be +-1/2");
    if (l + two_s < 0)
      throw std::invalid_argument("PartialWaveIndex: l + 2s must be >= 0");
    if (two_s == -1 && l < 1)
      throw std::invalid_argument("PartialWaveIndex: s = -1/2 requires l >= 1");
    if (std::abs(two_m) > 2 * l + 1)
      throw std::invalid_argument("PartialWaveIndex: |m| must be <= l + 1/2");
    if (two_s == -1 && std::abs(two_m) == 2 * l + 1)
      throw std::invalid_argument("PartialWaveIndex: |m| = l + 1/2 excluded for s = -1/2");
  }
};

// log|(u+1)/(u-1)|, evaluated through log1p so the value stays accurate
// arbitrarily close to the u = 1 singularity.  u = 1 itself gives +inf.
inline double g0(double u) {
  if (!(u > 0.0)) throw std::domain_error("g0: u must be > 0");
  if (u == 1.0) return std::numeric_limits<double>::infinity();
  if (u < 1.0) return std::log1p(2.0 * u / (1.0 - u));
  return std::log1p(2.0 / (u - 1.0));
}

namespace detail {

// g1 power series sum_{k>=1} 4k u^{2k} / (4k^2 - 1), for u well inside (0,1)
// where the closed form loses all digits to cancellation.
inline double g1_series(double u) {
  const double u2 = u * u;
  double term = u2;  // u^{2k}
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double add = 4.0 * k / (4.0 * double(k) * k - 1.0) * term;
    sum += add;
    if (add < sum * 1e-17) break;
    term *= u2;
  }
  return sum;
}

}  // namespace detail

// (1/2)(u + 1/u) log|(u+1)/(u-1)| - 1, with g1(1/u) = g1(u).
inline double g1(double u) {
  if (!(u > 0.0)) throw std::domain_error("g1: u must be > 0");
  if (u > 1.0) u = 1.0 / u;
  if (u < 0.5) return detail::g1_series(u);
  if (u == 1.0) return std::numeric_limits<double>::infinity();
  return 0.5 * (u + 1.0 / u) * g0(u) - 1.0;
}

namespace detail {

// Legendre polynomial P_l(z) by the three-term recurrence (stable upward
// for z >= 1).
inline double legendre_p(int l, double z) {
  if (l == 0) return 1.0;
  double pm1 = 1.0, p = z;
  for (int k = 1; k < l; ++k) {
    const double pn = ((2.0 * k + 1.0) * z * p - k * pm1) / (k + 1.0);
    pm1 = p;
    p = pn;
  }
  return p;
}

// Polynomial part W_{l-1}(z) = sum_{k=1}^{l} P_{k-1}(z) P_{l-k}(z) / k of
// the explicit representation Q_l = P_l Q_0 - W_{l-1}.  W_{-1} = 0.
inline double legendre_w(int l, double z) {
  double sum = 0.0;
  for (int k = 1; k <= l; ++k)
    sum += legendre_p(k - 1, z) * legendre_p(l - k, z) / double(k);
  return sum;
}

// The explicit form P_l*Q_0 - W_{l-1} cancels catastrophically once z moves
// away from 1 (the two terms grow like z^l while Q_l decays like z^{-l-1}),
// so beyond this point Q_l switches to its large-z series.
inline constexpr double kLegendreQSeriesSwitch = 1.05;

// Descending series Q_l(z) = sum_{k>=0} c_k z^{-(l+1+2k)}, c_0 = prod j/(2j+1),
// c_{k+1}/c_k = (l+2k+1)(l+2k+2) / [(2k+2)(2l+2k+3)].  All terms positive:
// no cancellation.  Kahan-compensated to keep the sum at working precision.
inline double legendre_q_series(int l, double z) {
  double c = 1.0;
  for (int j = 1; j <= l; ++j) c *= j / (2.0 * j + 1.0);
  const double r = 1.0 / (z * z);
  double term = c * std::pow(z, -(l + 1.0));
  double sum = 0.0, comp = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term < sum * 1e-17) break;
    term *= (l + 2.0 * k + 1.0) * (l + 2.0 * k + 2.0) /
            ((2.0 * k + 2.0) * (2.0 * l + 2.0 * k + 3.0)) * r;
  }
  return sum;
}

}  // namespace detail

// Legendre function of the second kind Q_l(z), z > 1, l <= kLegendreLMax.
// Near the z = 1 singularity the explicit P_l*Q_0 - W_{l-1} form is stable
// (and exact in the log factor); away from it the descending series avoids
// the P_l*Q_0 cancellation.  Forward recurrence is never used: it amplifies
// the dominant P_l solution.
inline double legendre_q(int l, double z) {
  if (l < 0 || l > kLegendreLMax)
    throw std::domain_error("legendre_q: l out of range [0, " +
                            std::to_string(kLegendreLMax) + "]");
  if (!(z > 1.0)) throw std::domain_error("legendre_q: z must be > 1");
  const double q0 = 0.5 * std::log1p(2.0 / (z - 1.0));
  if (l == 0) return q0;
  if (z >= detail::kLegendreQSeriesSwitch) return detail::legendre_q_series(l, z);
  return detail::legendre_p(l, z) * q0 - detail::legendre_w(l, z);
}

// g_l(u) = Q_l((u + 1/u)/2).  Since Q_0 at that argument equals g0(u)
// exactly, the log factor is taken from g0 and only the polynomial parts
// see the (u + 1/u)/2 substitution; this keeps full accuracy near u = 1.
inline double g_l(int l, double u) {
  if (l < 0 || l > kLegendreLMax)
    throw std::domain_error("g_l: l out of range");
  if (!(u > 0.0)) throw std::domain_error("g_l: u must be > 0");
  if (l == 0) return g0(u);
  if (l == 1) return g1(u);
  if (u == 1.0) return std::numeric_limits<double>::infinity();
  const double z = 0.5 * (u + 1.0 / u);
  if (z >= detail::kLegendreQSeriesSwitch) return detail::legendre_q_series(l, z);
  return detail::legendre_p(l, z) * g0(u) - detail::legendre_w(l, z);
}

// Relativistic dispersion e(p) = sqrt(c^2 p^2 + m^2 c^4); e(0) = mc^2.
inline double energy(double p, const PhysicalParams& params) {
  if (!(p >= 0.0)) throw std::domain_error("energy: p must be >= 0");
  return std::hypot(params.c * p, params.m * params.c * params.c);
}

namespace detail {

// The two weight functions of the reduced kernel:
//   w0(x) = sqrt((sqrt(x^2+1)+1)/(x^2+1)),  w1 with the minus sign.
// sqrt(x^2+1)-1 is computed as x^2/(sqrt(x^2+1)+1) to avoid cancellation
// at small x.
inline double weight0(double x) {
  const double e = std::hypot(x, 1.0);
  return std::sqrt(e + 1.0) / e;
}

inline double weight1(double x) {
  const double e = std::hypot(x, 1.0);
  return std::sqrt(x * x / (e + 1.0)) / e;
}

}  // namespace detail

// The reduced kernel t(x,y); symmetric, logarithmically divergent on the
// diagonal (x = y returns +inf so quadrature layers can split there).
inline double kernel_t(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw std::domain_error("kernel_t: arguments must be > 0");
  const double u = x / y;
  return 0.5 * (detail::weight0(x) * detail::weight0(y) * g0(u) +
                detail::weight1(x) * detail::weight1(y) * g1(u));
}

// Massless kernel t0(x,y) = (g0 + g1)(x/y) / (2 sqrt(xy)); homogeneous of
// degree -1.
inline double kernel_t0(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw std::domain_error("kernel_t0: arguments must be > 0");
  const double u = x / y;
  return (g0(u) + g1(u)) / (2.0 * std::sqrt(x * y));
}

// Partial-wave kernel k_{l,s}(p', p).  The Legendre argument is
// (p/p' + p'/p)/2, taken through the g_l path.  m and c enter through the
// dispersion only; the value is invariant under the joint rescaling built
// into t_from_k.
inline double kernel_k(const PartialWaveIndex& idx, double p_prime, double p,
                       const PhysicalParams& params) {
  idx.validate();
  params.validate();
  if (!(p > 0.0) || !(p_prime > 0.0))
    throw std::domain_error("kernel_k: momenta must be > 0");
  const double u = p_prime / p;
  const double e = energy(p, params);
  const double ep = energy(p_prime, params);
  const double e0 = energy(0.0, params);
  const double c2 = params.c * params.c;
  const double num = (ep + e0) * g_l(idx.l, u) * (e + e0) +
                     c2 * p_prime * g_l(idx.l + idx.two_s, u) * p;
  const double den = std::sqrt(2.0 * e * (e + e0)) * std::sqrt(2.0 * ep * (ep + e0));
  return num / den;
}

// Change-of-variables consistency oracle: maps the lowest channel
// k_{0,1/2} back to t through p = mcx, phi = sqrt(e(mcx)) a(mcx).  Agrees
// with kernel_t to machine precision.
inline double t_from_k(double x, double y, const PhysicalParams& params) {
  if (!(x > 0.0) || !(y > 0.0))
    throw std::domain_error("t_from_k: arguments must be > 0");
  const double mc = params.m * params.c;
  const PartialWaveIndex lowest{0, 1, 1};
  // Same argument order as kernel_t so both sides form the ratio x/y with
  // the identical floating-point division; near the diagonal the opposite
  // order would amplify the division's rounding by ~1/(1 - x/y) inside g0.
  const double k = kernel_k(lowest, mc * x, mc * y, params);
  return mc * k / std::sqrt(energy(mc * x, params) * energy(mc * y, params));
}

// Critical charge Z_c = 2 / [(pi/2 + 2/pi) alpha].
inline double critical_charge(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("critical_charge: alpha must be > 0");
  return 2.0 / ((kPi / 2.0 + 2.0 / kPi) * alpha);
}

// -------------------------------------------------------------------------
// KernelSpec: selects and parameterizes one of the kernel families.
//
// Every family splits exactly as
//   k(x,y) = log_coefficient(x,y) * log|(x+y)/(x-y)| + smooth_remainder(x,y)
// with both factors smooth across the diagonal (using g1 = z*g0 - 1 and
// Q_l = P_l*Q_0 - W_{l-1}, z = (u + 1/u)/2).  The Nystrom assembly relies
// on this split for its product-integration diagonal correction.
// -------------------------------------------------------------------------

enum class KernelFamily { MassiveT, MasslessT0, HomogeneousG, PartialWaveK };

class KernelSpec {
 public:
  static KernelSpec massive_t() { return KernelSpec(KernelFamily::MassiveT); }
  static KernelSpec massless_t0() { return KernelSpec(KernelFamily::MasslessT0); }
  static KernelSpec homogeneous_g(int l) {
    if (l < 0 || l > kLegendreLMax)
      throw std::invalid_argument("KernelSpec: HomogeneousG requires 0 <= l <= L_max");
    KernelSpec s(KernelFamily::HomogeneousG);
    s.l_ = l;
    return s;
  }
  static KernelSpec partial_wave(const PartialWaveIndex& idx, const PhysicalParams& params) {
    idx.validate();
    params.validate();
    KernelSpec s(KernelFamily::PartialWaveK);
    s.idx_ = idx;
    s.params_ = params;
    return s;
  }

  KernelFamily family() const { return family_; }
  const PhysicalParams& params() const { return params_; }

  double operator()(double x, double y) const {
    switch (family_) {
      case KernelFamily::MassiveT: return kernel_t(x, y);
      case KernelFamily::MasslessT0: return kernel_t0(x, y);
      case KernelFamily::HomogeneousG: return g_l(l_, x / y) / std::sqrt(x * y);
      case KernelFamily::PartialWaveK: return kernel_k(idx_, x, y, params_);
    }
    return 0.0;  // unreachable
  }

  // Coefficient of log|(x+y)/(x-y)| in the exact smooth-plus-log split.
  double log_coefficient(double x, double y) const {
    const double z = 0.5 * (x / y + y / x);
    switch (family_) {
      case KernelFamily::MassiveT:
        return 0.5 * (detail::weight0(x) * detail::weight0(y) +
                      detail::weight1(x) * detail::weight1(y) * z);
      case KernelFamily::MasslessT0:
        return (1.0 + z) / (2.0 * std::sqrt(x * y));
      case KernelFamily::HomogeneousG:
        return detail::legendre_p(l_, z) / std::sqrt(x * y);
      case KernelFamily::PartialWaveK: {
        const double e = energy(y, params_);
        const double ep = energy(x, params_);
        const double e0 = energy(0.0, params_);
        const double c2 = params_.c * params_.c;
        const double den =
            std::sqrt(2.0 * e * (e + e0)) * std::sqrt(2.0 * ep * (ep + e0));
        return ((ep + e0) * detail::legendre_p(idx_.l, z) * (e + e0) +
                c2 * x * detail::legendre_p(idx_.l + idx_.two_s, z) * y) / den;
      }
    }
    return 0.0;
  }

  // Remainder k - log_coefficient * log|(x+y)/(x-y)|; finite on the diagonal.
  double smooth_remainder(double x, double y) const {
    const double z = 0.5 * (x / y + y / x);
    switch (family_) {
      case KernelFamily::MassiveT:
        return -0.5 * detail::weight1(x) * detail::weight1(y);
      case KernelFamily::MasslessT0:
        return -1.0 / (2.0 * std::sqrt(x * y));
      case KernelFamily::HomogeneousG:
        return -detail::legendre_w(l_, z) / std::sqrt(x * y);
      case KernelFamily::PartialWaveK: {
        const double e = energy(y, params_);
        const double ep = energy(x, params_);
        const double e0 = energy(0.0, params_);
        const double c2 = params_.c * params_.c;
        const double den =
            std::sqrt(2.0 * e * (e + e0)) * std::sqrt(2.0 * ep * (ep + e0));
        return -((ep + e0) * detail::legendre_w(idx_.l, z) * (e + e0) +
                 c2 * x * detail::legendre_w(idx_.l + idx_.two_s, z) * y) / den;
      }
    }
    return 0.0;
  }

  std::string name() const {
    switch (family_) {
      case KernelFamily::MassiveT: return "t";
      case KernelFamily::MasslessT0: return "t0";
      case KernelFamily::HomogeneousG: return "g" + std::to_string(l_);
      case KernelFamily::PartialWaveK:
        return "k(l=" + std::to_string(idx_.l) +
               ",2s=" + std::to_string(idx_.two_s) + ")";
    }
    return "?";
  }

 private:
  explicit KernelSpec(KernelFamily f) : family_(f) {}

  KernelFamily family_;
  int l_ = 0;
  PartialWaveIndex idx_{};
  PhysicalParams params_{};
};

}  // namespace sharpnorm

#endif  // SHARPNORM_KERNELS_HPP
