#ifndef SHARPNORM_QUADRATURE_HPP
#define SHARPNORM_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

// Adaptive integration on bounded and semi-infinite domains with declared
// logarithmic singularities.  Panels carry high-order Gauss nodes, so a
// declared singular point placed on a panel boundary is never evaluated;
// refinement bisects toward it geometrically.

namespace sharpnorm {

enum class TailMap { Exponential, Rational };

struct QuadSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4096;
  std::vector<double> singular_points;  // sorted, distinct
  TailMap tail_map = TailMap::Exponential;

  QuadSpec with_singularities(std::vector<double> pts) const {
    QuadSpec s = *this;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    s.singular_points = std::move(pts);
    return s;
  }
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions_used = 0;
  bool converged = false;
};

struct NonConvergence : std::runtime_error {
  IntegralResult best;
  explicit NonConvergence(IntegralResult r)
      : std::runtime_error("quadrature did not converge within the subdivision budget"),
        best(r) {}
};

struct DivergentTail : std::runtime_error {
  DivergentTail() : std::runtime_error("semi-infinite tail estimate fails to contract") {}
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
// on the Legendre recurrence.
struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_rule(int n) {
  static GaussRule rule = [] {
    const int m = 15;
    GaussRule r;
    r.x.resize(m);
    r.w.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < m; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = m * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      r.x[i] = -z;
      r.x[m - 1 - i] = z;
      r.w[i] = r.w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
  }();
  (void)n;
  return rule;
}

constexpr int kGaussOrder = 15;

template <class F>
double gauss_panel(const F& f, double a, double b) {
  const GaussRule& r = gauss_rule(kGaussOrder);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kGaussOrder; ++i) sum += r.w[i] * f(mid + half * r.x[i]);
  const double v = sum * half;
  if (std::isnan(v)) throw std::domain_error("quadrature: integrand returned NaN");
  return v;
}

struct Segment {
  double a, b;
  double value;   // two-half estimate
  double error;   // |whole - two halves|
  bool frozen;    // at minimal width next to a singularity; not split further
};

template <class F>
Segment make_segment(const F& f, double a, double b) {
  const double whole = gauss_panel(f, a, b);
  const double mid = 0.5 * (a + b);
  const double v = gauss_panel(f, a, mid) + gauss_panel(f, mid, b);
  Segment s;
  s.a = a;
  s.b = b;
  s.value = v;
  s.error = std::abs(whole - v) + 1e-16 * std::abs(v);
  // Width relative to the endpoint magnitudes: next to a singularity at a
  // nonzero location the panel bottoms out at machine spacing, while next to
  // zero (algebraic endpoint singularities) refinement can continue until the
  // residual panel's contribution is negligible.
  s.frozen = (b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b));
  return s;
}

}  // namespace detail

// Adaptive integral over (a,b).  Declared interior singular points become
// panel boundaries; worst-error panels are bisected until the accumulated
// estimate meets max(rel_tol*|value|, abs_tol) or the budget is exhausted
// (then NonConvergence carries the best estimate).
template <class F>
IntegralResult integrate_interval(const F& f, double a, double b, const QuadSpec& spec) {
  if (!(a < b)) throw std::invalid_argument("integrate_interval: need a < b");

  std::vector<double> breaks{a};
  for (double s : spec.singular_points)
    if (s > a && s < b) breaks.push_back(s);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());

  auto worse = [](const detail::Segment& p, const detail::Segment& q) {
    return p.error < q.error;
  };
  std::priority_queue<detail::Segment, std::vector<detail::Segment>, decltype(worse)>
      queue(worse);
  double frozen_value = 0.0, frozen_error = 0.0;
  int subdivisions = 0;

  auto push = [&](detail::Segment s) {
    if (s.frozen) {
      frozen_value += s.value;
      frozen_error += s.error;
    } else {
      queue.push(s);
    }
  };

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    push(detail::make_segment(f, breaks[i], breaks[i + 1]));

  double queued_value = 0.0, queued_error = 0.0;
  {
    // recompute from a copy to seed running totals
    auto copy = queue;
    while (!copy.empty()) {
      queued_value += copy.top().value;
      queued_error += copy.top().error;
      copy.pop();
    }
  }

  auto tol = [&](double value) {
    return std::max(spec.rel_tol * std::abs(value), spec.abs_tol);
  };

  while (!queue.empty() &&
         queued_error + frozen_error > tol(queued_value + frozen_value) &&
         subdivisions < spec.max_subdivisions) {
    detail::Segment s = queue.top();
    queue.pop();
    queued_value -= s.value;
    queued_error -= s.error;
    const double mid = 0.5 * (s.a + s.b);
    for (detail::Segment child :
         {detail::make_segment(f, s.a, mid), detail::make_segment(f, mid, s.b)}) {
      if (child.frozen) {
        frozen_value += child.value;
        frozen_error += child.error;
      } else {
        queue.push(child);
        queued_value += child.value;
        queued_error += child.error;
      }
    }
    ++subdivisions;
  }

  IntegralResult result;
  result.value = queued_value + frozen_value;
  result.error_estimate = queued_error + frozen_error;
  result.subdivisions_used = subdivisions;
  result.converged = result.error_estimate <= tol(result.value);
  if (!result.converged && subdivisions >= spec.max_subdivisions)
    throw NonConvergence(result);
  return result;
}

// Integral over (0, inf).  The bounded head [0, B] covers all declared
// singular points and u = 1; the tail is mapped and accumulated in windows
// until it contracts below tolerance.
template <class F>
IntegralResult integrate_semi_infinite(const F& f, const QuadSpec& spec) {
  double last_break = 1.0;
  for (double s : spec.singular_points) last_break = std::max(last_break, s);
  const double B = 2.0 * last_break;

  QuadSpec head_spec = spec;
  IntegralResult result = integrate_interval(f, 0.0, B, head_spec);

  if (spec.tail_map == TailMap::Rational) {
    // u = B + v/(1-v); the v = 1 endpoint is singular by construction.
    auto g = [&](double v) {
      const double om = 1.0 - v;
      return f(B + v / om) / (om * om);
    };
    QuadSpec tail_spec = spec;
    tail_spec.singular_points.clear();
    IntegralResult tail = integrate_interval(g, 0.0, 1.0, tail_spec);
    result.value += tail.value;
    result.error_estimate += tail.error_estimate;
    result.subdivisions_used += tail.subdivisions_used;
    result.converged = result.converged && tail.converged;
    return result;
  }

  // Exponential map u = e^s, unit windows in s.
  QuadSpec tail_spec = spec;
  tail_spec.singular_points.clear();
  auto g = [&](double s) {
    const double u = std::exp(s);
    return u * f(u);
  };
  double s0 = std::log(B);
  double prev_window = std::numeric_limits<double>::infinity();
  int growth_streak = 0, small_streak = 0;
  for (int k = 0;; ++k) {
    if (s0 > 700.0) throw DivergentTail();
    IntegralResult win = integrate_interval(g, s0, s0 + 1.0, tail_spec);
    result.value += win.value;
    result.error_estimate += win.error_estimate;
    result.subdivisions_used += win.subdivisions_used;
    const double mag = std::abs(win.value);
    const double cutoff =
        0.25 * std::max(spec.rel_tol * std::abs(result.value), spec.abs_tol);
    small_streak = (mag <= cutoff) ? small_streak + 1 : 0;
    if (small_streak >= 2) {
      // remaining tail bounded by a geometric continuation of the window
      result.error_estimate += mag;
      break;
    }
    growth_streak = (mag > prev_window && k > 0) ? growth_streak + 1 : 0;
    if (growth_streak >= 8) throw DivergentTail();
    prev_window = mag;
    s0 += 1.0;
  }
  result.converged =
      result.error_estimate <=
      std::max(spec.rel_tol * std::abs(result.value), spec.abs_tol);
  return result;
}

// Iterated double integral over a rectangle.  With diag_singular the inner
// integral declares a singular point at the outer variable; with symmetric
// (square domain, symmetric f) only y > x is integrated and the result
// doubled.
template <class F>
IntegralResult double_integral_box(const F& f, double ax, double bx, double ay,
                                   double by, bool diag_singular, bool symmetric,
                                   const QuadSpec& spec) {
  if (symmetric && (ax != ay || bx != by))
    throw std::invalid_argument("double_integral_box: symmetric path needs a square domain");

  QuadSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = spec.abs_tol * 0.1;
  inner.singular_points.clear();

  long long inner_subdivisions = 0;
  bool inner_converged = true;

  auto outer_integrand = [&](double x) {
    const double lo = symmetric ? x : ay;
    QuadSpec is = inner;
    if (diag_singular && !symmetric && x > ay && x < by) is.singular_points = {x};
    IntegralResult r = integrate_interval([&](double y) { return f(x, y); }, lo, by, is);
    inner_subdivisions += r.subdivisions_used;
    inner_converged = inner_converged && r.converged;
    return r.value;
  };

  IntegralResult outer = integrate_interval(outer_integrand, ax, bx, spec);
  if (symmetric) {
    outer.value *= 2.0;
    outer.error_estimate *= 2.0;
  }
  outer.subdivisions_used += static_cast<int>(
      std::min<long long>(inner_subdivisions, std::numeric_limits<int>::max() / 2));
  outer.converged = outer.converged && inner_converged;
  return outer;
}

// Iterated double integral over (0,inf)^2.
template <class F>
IntegralResult double_integral(const F& f, bool diag_singular, const QuadSpec& spec) {
  QuadSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = spec.abs_tol * 0.1;
  inner.singular_points.clear();

  long long inner_subdivisions = 0;
  bool inner_converged = true;

  auto outer_integrand = [&](double x) {
    QuadSpec is = inner;
    if (diag_singular) is.singular_points = {x};
    IntegralResult r = integrate_semi_infinite([&](double y) { return f(x, y); }, is);
    inner_subdivisions += r.subdivisions_used;
    inner_converged = inner_converged && r.converged;
    return r.value;
  };

  IntegralResult outer = integrate_semi_infinite(outer_integrand, spec);
  outer.subdivisions_used += static_cast<int>(
      std::min<long long>(inner_subdivisions, std::numeric_limits<int>::max() / 2));
  outer.converged = outer.converged && inner_converged;
  return outer;
}

}  // namespace sharpnorm

#endif  // SHARPNORM_QUADRATURE_HPP
