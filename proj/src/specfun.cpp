// SPDX-License-Identifier: Apache-2.0
#include "thzharq/specfun.hpp"

#include <cmath>

#include "thzharq/channel.hpp"
#include "thzharq/gammafun.hpp"
#include "thzharq/quadrature.hpp"

namespace thzharq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr std::complex<double> kI{0.0, 1.0};
}  // namespace

std::complex<double> fox_h_kernel(std::complex<double> t, double rho_k,
                                  const LinkParams& link, const ChannelParams& chan,
                                  const ContourConfig& cfg) {
  cfg.validate();
  if (!(rho_k > 0.0)) throw std::invalid_argument("fox_h_kernel: rho_k must be > 0");
  if (t == std::complex<double>(0.0, 0.0)) return 1.0;  // zeroth moment
  if (!(t.real() < 0.0))
    throw std::invalid_argument("fox_h_kernel: real(t) < 0 required (empty strip)");

  const PointingDerived pd = pointing_derived(chan);
  const double phi = pd.phi;
  const double alpha = chan.alpha;
  const double mu = chan.mu;
  const double hl = path_gain(link);
  // Scale entering the power term: z = (rho |h_l|^2)^(-1/2) * (mu / (hhat^alpha S0^alpha))^(1/alpha)
  const double ln_z = -0.5 * std::log(rho_k * hl * hl) +
                      (std::log(mu) - alpha * std::log(chan.hhat_f * pd.s0)) / alpha;

  const double strip_max = std::min({phi, alpha * mu, -2.0 * t.real()});
  const double c2 = cfg.c2_fraction * strip_max;

  // Log of the Mellin integrand along s = c2 + iT.
  auto ln_integrand = [&](double T) -> std::complex<double> {
    const std::complex<double> s{c2, T};
    return ln_gamma_complex(0.5 * s) + ln_gamma_complex(-t - 0.5 * s) +
           ln_gamma_complex(mu - s / alpha) + s * ln_z - std::log(phi - s);
  };
  // Reference magnitude at the contour centre keeps exp() in range even
  // when |imag(t)| is large (the 1/Gamma(-t) prefactor compensates).
  const double ref = ln_integrand(0.0).real();
  auto g = [&](double T) { return std::exp(ln_integrand(T) - ref); };

  // At deep moment orders the log-gamma terms reach ~1e5, so every exp()
  // evaluation carries |ln|*eps jitter relative to the normalized peak of 1;
  // panel refinements cannot agree below that, whatever the requested
  // tolerance.  Tie the absolute acceptance floor to this evaluation noise.
  const double eval_noise = 4e-15 * std::max(1.0, std::abs(ref));
  const double h = cfg.truncation_height;
  auto line = quad::integrate_line(g, -h, h, cfg.rel_tol,
                                   std::max(cfg.abs_tol, eval_noise), cfg.max_nodes);
  if (!line.converged)
    throw ConvergenceError("fox_h_kernel: contour quadrature did not converge");

  // Prefactor phi / (2 Gamma(mu) Gamma(-t)); the 1/(2 pi i) of the
  // Mellin-Barnes integral combines with ds = i dT into 1/(2 pi).
  const std::complex<double> ln_pref =
      std::log(phi / 2.0) - ln_gamma(mu) - ln_gamma_complex(-t);
  return std::exp(ln_pref + ref + std::log(line.value / (2.0 * kPi)));
}

double meijer_g_asymptotic(int k_rounds, double delta, double x, const ContourConfig& cfg) {
  cfg.validate();
  if (k_rounds < 1) throw std::invalid_argument("meijer_g_asymptotic: K must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("meijer_g_asymptotic: delta must be > 0");
  if (!(x > 1.0)) throw std::domain_error("meijer_g_asymptotic: requires x > 1");

  const double ln_x = std::log(x);
  const double k = static_cast<double>(k_rounds);

  // Just above x = 1 the integration region collapses onto the simplex
  // sum(u_i) <= x - 1 and the value approaches its Dirichlet-integral limit,
  // in error by ~k*delta*(x-1)/2; the contour integral meanwhile cancels:
  // its result shrinks like (x-1)^(k delta) against an integrand mass of
  // O(1), so its attainable relative error grows like floor/result.  Take
  // whichever branch predicts the smaller error (plus a hard node-density
  // guard, since the truncation span grows like 1/sqrt(ln x)).
  const double excess = x - 1.0;
  const double ln_limit = k * ln_gamma(delta + 1.0) - ln_gamma(k * delta + 1.0) +
                          k * delta * std::log(excess);
  const double series_err = 0.5 * k * delta * excess;
  const double quad_err = quad::kCancellationFloor * std::exp(-ln_limit);
  if (excess <= 1e-3 || series_err < quad_err) return std::exp(ln_limit);

  const double c = -delta - cfg.c1_margin;  // apex left of every pole t = n - delta

  // The integrand decays only like |t|^(-K delta - 1) on a vertical line, so
  // bend the contour into a right-opening parabola t(u) = c + a u^2 + i u.
  // No poles are crossed (they sit on the real axis at t >= -delta) and the
  // x^(-t) factor then supplies Gaussian decay x^(-a u^2).
  const double curvature = 0.5;
  auto f = [&](double u) -> std::complex<double> {
    const std::complex<double> t{c + curvature * u * u, u};
    const std::complex<double> dt{2.0 * curvature * u, 1.0};
    const std::complex<double> ln_ratio =
        ln_gamma_complex(-t - delta) - ln_gamma_complex(-t);
    return std::exp(k * ln_ratio - t * ln_x) / (-t) * dt;
  };

  // Truncate where the Gaussian factor alone is ~1e-16, with headroom for
  // the polynomially varying gamma ratio.
  const double u_h = 1.5 * std::sqrt(37.0 / (curvature * ln_x)) + 5.0;
  auto line = quad::integrate_line(f, -u_h, u_h, cfg.rel_tol, cfg.abs_tol, cfg.max_nodes);
  if (!line.converged) {
    // Near the predicted-error crossover the contour can still fail to
    // settle (its cancellation scales with the integrand mass, which the
    // a-priori estimate takes as O(1)).  The limit form's error bound is
    // input-only, so fall back to it whenever it is still tight.
    if (series_err <= 0.05) return std::exp(ln_limit);
    throw ConvergenceError("meijer_g_asymptotic: contour quadrature did not converge");
  }

  const double g = std::exp(k * ln_gamma(delta + 1.0)) *
                   (line.value / (2.0 * kPi * kI)).real();
  return g < 0.0 ? 0.0 : g;
}

}  // namespace thzharq
