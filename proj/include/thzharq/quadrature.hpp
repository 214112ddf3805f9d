// SPDX-License-Identifier: Apache-2.0
//
// Small quadrature toolbox: adaptive Gauss-Kronrod 15(7) on finite
// intervals, a rational map for semi-infinite ranges, tanh-sinh (double
// exponential) for integrable endpoint singularities, and a composite
// Gauss-Legendre rule with panel doubling used for contour integrals.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "thzharq/params.hpp"

namespace thzharq::quad {

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (abscissae >= 0).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15W[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Weights of the embedded 7-point Gauss rule (nodes 1, 3, 5, 7 above).
inline constexpr double kG7W[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F&& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGk15X[i]);
    fv[14 - i] = f(c + h * kGk15X[i]);
  }
  fv[7] = f(c);
  double kron = kGk15W[7] * fv[7];
  for (int i = 0; i < 7; ++i) kron += kGk15W[i] * (fv[i] + fv[14 - i]);
  double gauss = kG7W[3] * fv[7];
  for (int i = 0; i < 3; ++i) gauss += kG7W[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  result = kron * h;
  err = std::abs((kron - gauss) * h);
}

template <class F>
double integrate_rec(F&& f, double a, double b, double rel_tol, double abs_tol, int depth) {
  double result, err;
  gk15(f, a, b, result, err);
  if (err <= abs_tol + rel_tol * std::abs(result) || depth <= 0) {
    if (depth <= 0 && err > 16.0 * (abs_tol + rel_tol * std::abs(result)) &&
        err > 1e-300)
      throw ConvergenceError("adaptive quadrature: recursion depth exhausted");
    return result;
  }
  const double c = 0.5 * (a + b);
  return integrate_rec(f, a, c, rel_tol, 0.5 * abs_tol, depth - 1) +
         integrate_rec(f, c, b, rel_tol, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
                 int max_depth = 40) {
  if (a == b) return 0.0;
  return detail::integrate_rec(f, a, b, rel_tol, abs_tol, max_depth);
}

// Adaptive quadrature on [a, inf) via x = a + t/(1-t), t in [0, 1).
template <class F>
double integrate_upper(F&& f, double a, double rel_tol = 1e-10, double abs_tol = 0.0) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    return f(x) / (om * om);
  };
  // Stop a hair short of t = 1; the Jacobian blow-up is harmless for
  // integrands decaying faster than 1/x^2, which is all we use this for.
  return integrate(g, 0.0, 1.0 - 1e-14, rel_tol, abs_tol);
}

// tanh-sinh quadrature on (a, b); tolerates integrable endpoint
// singularities.  f is evaluated at points computed as offsets from the
// endpoints so the clustering retains full relative accuracy.
template <class F>
double tanh_sinh(F&& f, double a, double b, double tol = 1e-12, int max_level = 10) {
  const double width = b - a;
  const double t_max = 3.8;  // weights underflow beyond this
  auto eval_at = [&](double t, double& fx, double& w) {
    const double u = 1.5707963267948966 * std::sinh(t);
    // sigmoid(2u) and sigmoid(-2u), each accurate near its small end
    const double sp = 1.0 / (1.0 + std::exp(-2.0 * u));
    const double sm = 1.0 / (1.0 + std::exp(2.0 * u));
    const double x = (u >= 0) ? b - width * sm : a + width * sp;
    w = width * 3.141592653589793 * std::cosh(t) * sp * sm;
    fx = (w > 0 && x > a && x < b) ? f(x) : 0.0;
  };
  double h = 0.5;
  double fx, w;
  eval_at(0.0, fx, w);
  double sum = fx * w;
  int n = static_cast<int>(std::ceil(t_max / h));
  for (int k = 1; k <= n; ++k) {
    eval_at(k * h, fx, w);
    sum += fx * w;
    eval_at(-k * h, fx, w);
    sum += fx * w;
  }
  double integral = sum * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    n = static_cast<int>(std::ceil(t_max / h));
    double add = 0.0;
    for (int k = 1; k <= n; k += 2) {  // new (odd) nodes only
      eval_at(k * h, fx, w);
      add += fx * w;
      eval_at(-k * h, fx, w);
      add += fx * w;
    }
    sum += add;
    const double next = sum * h;
    const double change = std::abs(next - integral);
    integral = next;
    if (level >= 3 && change <= tol * std::abs(integral) + 1e-300) return integral;
  }
  return integral;
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GlRule {
  std::vector<double> x, w;
};

inline const GlRule& gauss_legendre(int n) {
  static std::map<int, GlRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

struct LineResult {
  std::complex<double> value{0.0, 0.0};
  double mass = 0.0;  // integral of |g|, the conditioning scale of the result
  int nodes = 0;
  bool converged = false;
};

// When the oscillatory integral cancels far below the integrand mass, no
// result-relative tolerance can be met in double precision; accept once
// successive estimates agree to this fraction of the mass (the attainable
// accuracy), so "converged" means "to within max(requested, conditioning)".
inline constexpr double kCancellationFloor = 1e-13;

// Composite Gauss-Legendre along a real parameter range, doubling the
// panel count until two successive estimates agree.  Used for contour
// integrals with g the (complex) integrand including any path Jacobian.
template <class F>
LineResult integrate_line(F&& g, double t_lo, double t_hi, double rel_tol, double abs_tol,
                          int max_nodes, int order = 16) {
  const GlRule& rule = gauss_legendre(order);
  LineResult out;
  std::complex<double> prev{0.0, 0.0};
  bool have_prev = false;
  for (int panels = 8; panels * order <= max_nodes; panels *= 2) {
    std::complex<double> acc{0.0, 0.0};
    double mass = 0.0;
    const double dt = (t_hi - t_lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = t_lo + (p + 0.5) * dt;
      std::complex<double> panel{0.0, 0.0};
      double panel_mass = 0.0;
      for (int i = 0; i < order; ++i) {
        const std::complex<double> gv = g(mid + 0.5 * dt * rule.x[i]);
        panel += rule.w[i] * gv;
        panel_mass += rule.w[i] * std::abs(gv);
      }
      acc += panel * (0.5 * dt);
      mass += panel_mass * (0.5 * dt);
    }
    out.value = acc;
    out.mass = mass;
    out.nodes = panels * order;
    if (have_prev && std::abs(acc - prev) <=
                         rel_tol * std::abs(acc) + abs_tol + kCancellationFloor * mass) {
      out.converged = true;
      return out;
    }
    prev = acc;
    have_prev = true;
  }
  return out;
}

}  // namespace thzharq::quad
