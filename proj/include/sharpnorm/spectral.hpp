#ifndef SHARPNORM_SPECTRAL_HPP
#define SHARPNORM_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "sharpnorm/kernels.hpp"
#include "sharpnorm/quadrature.hpp"

// Singularity-aware Nystrom discretization of the half-line operators on a
// truncated domain, largest-eigenvalue extraction, and the nested-domain
// diagnostics behind the sharp-constant and no-extremal evidence.

namespace sharpnorm {

struct MeshTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NystromDiscretization {
  KernelSpec kernel;
  double eps = 0.0, R = 0.0;
  int n = 0;
  std::vector<double> edges;    // n+1 geometric cell boundaries
  std::vector<double> nodes;    // log-midpoints, strictly inside (eps, R)
  std::vector<double> weights;  // linear cell lengths
  std::vector<double> matrix;   // row-major n*n, symmetric

  double entry(int i, int j) const { return matrix[std::size_t(i) * n + j]; }

  // Entries in plain text, one row per line, comma separated.
  void to_csv(std::ostream& os) const {
    os.precision(17);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) os << (j ? "," : "") << entry(i, j);
      os << "\n";
    }
  }
};

namespace detail {

// int_a^b log|(x+y)/(x-y)| dy; the antiderivative is
// (y+x)log(y+x) - (y-x)log|y-x|, finite across y = x.
inline double log_factor_integral(double x, double a, double b) {
  auto G = [x](double y) {
    const double d = y - x;
    const double s = y + x;
    return s * std::log(s) - (d == 0.0 ? 0.0 : d * std::log(std::abs(d)));
  };
  return G(b) - G(a);
}

}  // namespace detail

// Log-graded Nystrom matrix on [eps, R]: off-diagonal entries by direct
// kernel evaluation, the diagonal band by product integration of the log
// factor against the smooth coefficient frozen at the nodes.  With
// ignore_diagonal the band simply evaluates the smooth remainder (diagonal
// log mass dropped) for cross-checking.
inline NystromDiscretization build_nystrom(const KernelSpec& kernel, double eps, double R,
                                           int n, const QuadSpec& spec,
                                           bool ignore_diagonal = false) {
  if (!(eps > 0.0 && eps < R)) throw std::invalid_argument("build_nystrom: need 0 < eps < R");
  if (n < 16) throw std::invalid_argument("build_nystrom: need n >= 16");
  (void)spec;

  NystromDiscretization d{kernel};
  d.eps = eps;
  d.R = R;
  d.n = n;
  d.edges.resize(n + 1);
  d.nodes.resize(n);
  d.weights.resize(n);
  const double lr = std::log(R / eps);
  for (int i = 0; i <= n; ++i) d.edges[i] = eps * std::exp(lr * i / n);
  for (int i = 0; i < n; ++i) {
    d.nodes[i] = std::sqrt(d.edges[i] * d.edges[i + 1]);
    d.weights[i] = d.edges[i + 1] - d.edges[i];
  }

  d.matrix.assign(std::size_t(n) * n, 0.0);
  double worst_correction = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = d.nodes[i];
    const double swi = std::sqrt(d.weights[i]);
    for (int j = i; j < n; ++j) {
      const double xj = d.nodes[j];
      const double swj = std::sqrt(d.weights[j]);
      double value;
      if (j - i <= 1) {
        // Cell average of the log-singular part, smooth factors frozen.
        const double corrected =
            ignore_diagonal && i == j
                ? kernel.smooth_remainder(xi, xj)
                : kernel.log_coefficient(xi, xj) *
                          detail::log_factor_integral(xi, d.edges[j], d.edges[j + 1]) /
                          d.weights[j] +
                      kernel.smooth_remainder(xi, xj);
        if (j == i + 1 && !ignore_diagonal) {
          const double naive = kernel(xi, xj);
          worst_correction =
              std::max(worst_correction, std::abs(naive - corrected) /
                                             std::max(std::abs(corrected), 1e-300));
        }
        value = corrected;
      } else {
        value = kernel(xi, xj);
      }
      d.matrix[std::size_t(i) * n + j] = swi * value * swj;
    }
  }
  if (worst_correction > 0.20)
    throw MeshTooCoarse("build_nystrom: near-diagonal correction exceeds 20% of entry");

  // Symmetrize: the band correction freezes smooth factors at (i,j) and
  // (j,i) slightly differently.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      d.matrix[std::size_t(i) * n + j] = d.matrix[std::size_t(j) * n + i];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s = 0.5 * (d.entry(i, j) + d.entry(j, i));
      d.matrix[std::size_t(i) * n + j] = s;
      d.matrix[std::size_t(j) * n + i] = s;
    }
  return d;
}

struct SpectralResult {
  double lambda_max = 0.0;
  std::vector<double> eigenvector;  // normalized
  double residual = 0.0;            // ||Mv - lambda v|| / |lambda|
  int iterations = 0;
};

// Largest eigenvalue by shifted power iteration.  The shift (row-sum bound)
// makes the spectrum nonnegative so the iteration cannot lock onto a large
// negative eigenvalue; the residual is certified on the unshifted matrix.
inline SpectralResult largest_eigenvalue(const NystromDiscretization& d, double tol,
                                         int max_iterations = 50000) {
  const int n = d.n;
  if (n < 1) throw std::invalid_argument("largest_eigenvalue: empty discretization");

  double shift = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::abs(d.entry(i, j));
    shift = std::max(shift, row);
  }

  std::vector<double> v(n, 1.0 / std::sqrt(double(n))), z(n);
  SpectralResult res;
  for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
    for (int i = 0; i < n; ++i) {
      double s = shift * v[i];
      const double* row = &d.matrix[std::size_t(i) * n];
      for (int j = 0; j < n; ++j) s += row[j] * v[j];
      z[i] = s;
    }
    double zn = 0.0;
    for (double t : z) zn += t * t;
    zn = std::sqrt(zn);
    for (int i = 0; i < n; ++i) z[i] /= zn;

    // Rayleigh quotient and residual on the unshifted matrix.
    double lambda = 0.0;
    std::vector<double> mz(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &d.matrix[std::size_t(i) * n];
      for (int j = 0; j < n; ++j) s += row[j] * z[j];
      mz[i] = s;
      lambda += z[i] * s;
    }
    double rn = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = mz[i] - lambda * z[i];
      rn += r * r;
    }
    res.lambda_max = lambda;
    res.residual = std::sqrt(rn) / std::abs(lambda);
    v = z;
    if (res.residual <= tol) {
      res.eigenvector = v;
      return res;
    }
  }
  res.eigenvector = v;
  throw NoConvergence("largest_eigenvalue: residual " + std::to_string(res.residual) +
                      " after " + std::to_string(max_iterations) + " iterations");
}

struct StudyRow {
  double eps = 0.0, R = 0.0;
  int n = 0;
  double lambda = 0.0;
  double residual = 0.0;
};

struct ConvergenceStudy {
  std::vector<StudyRow> rows;
  double extrapolated_limit = 0.0;  // linear fit lambda = L - c/ln(R/eps)
  double fit_rms = 0.0;
};

// lambda_max over nested domains / node counts, with a diagnostic
// extrapolation in 1/ln(R/eps).
inline ConvergenceStudy norm_convergence_study(const KernelSpec& kernel,
                                               const std::vector<std::pair<double, double>>& domains,
                                               const std::vector<int>& ns, double tol,
                                               const QuadSpec& spec = {}) {
  if (domains.size() != ns.size() || domains.empty())
    throw std::invalid_argument("norm_convergence_study: domains and ns must match");
  ConvergenceStudy study;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const auto [eps, R] = domains[i];
    NystromDiscretization d = build_nystrom(kernel, eps, R, ns[i], spec);
    SpectralResult r = largest_eigenvalue(d, tol);
    study.rows.push_back({eps, R, ns[i], r.lambda_max, r.residual});
  }
  // Least squares lambda = L - c * x, x = 1/ln(R/eps).
  double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  const double m = double(study.rows.size());
  for (const auto& row : study.rows) {
    const double x = 1.0 / std::log(row.R / row.eps);
    sx += x;
    sxx += x * x;
    sy += row.lambda;
    sxy += x * row.lambda;
  }
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  study.extrapolated_limit = (sy - slope * sx) / m;
  double ss = 0.0;
  for (const auto& row : study.rows) {
    const double x = 1.0 / std::log(row.R / row.eps);
    const double model = study.extrapolated_limit + slope * x;
    ss += (row.lambda - model) * (row.lambda - model);
  }
  study.fit_rms = std::sqrt(ss / m);
  return study;
}

struct EscapeReport {
  std::vector<double> mass_median_log10;  // per domain, median of |v|^2 in log10 x
  bool strictly_increasing = false;
};

// No-extremal evidence: on nested domains the eigenvector's mass median (in
// log x) must drift upward, mirroring the escape of maximizing sequences.
inline EscapeReport extremal_escape_diagnostic(
    std::span<const NystromDiscretization> discretizations,
    std::span<const SpectralResult> results) {
  if (discretizations.size() != results.size() || discretizations.size() < 3)
    throw InsufficientData("extremal_escape_diagnostic: need >= 3 nested-domain results");
  EscapeReport rep;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& d = discretizations[k];
    const auto& v = results[k].eigenvector;
    double total = 0.0;
    for (double c : v) total += c * c;
    double cum = 0.0;
    double median = std::log10(d.nodes.back());
    for (int i = 0; i < d.n; ++i) {
      cum += v[i] * v[i];
      if (cum >= 0.5 * total) {
        median = std::log10(d.nodes[i]);
        break;
      }
    }
    rep.mass_median_log10.push_back(median);
  }
  rep.strictly_increasing = true;
  for (std::size_t k = 1; k < rep.mass_median_log10.size(); ++k)
    if (!(rep.mass_median_log10[k] > rep.mass_median_log10[k - 1]))
      rep.strictly_increasing = false;
  return rep;
}

}  // namespace sharpnorm

#endif  // SHARPNORM_SPECTRAL_HPP
