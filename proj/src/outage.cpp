// SPDX-License-Identifier: Apache-2.0
#include "thzharq/outage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/gammafun.hpp"
#include "thzharq/quadrature.hpp"
#include "thzharq/specfun.hpp"

namespace thzharq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

std::atomic<std::uint64_t> g_clamp_count{0};

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b *= static_cast<double>(n - k + i) / i;
  return b;
}

// Laplace transform of the accumulated-information CDF evaluated at tau:
// (1/tau) * prod_k Phi(-tau, rho_k).  Kernel calls are memoized over the
// distinct power factors, which collapses uniform allocations to a single
// evaluation per node.
std::complex<double> cdf_transform(std::complex<double> tau, const HarqConfig& cfg,
                                   const LinkParams& link, const ChannelParams& chan,
                                   const ContourConfig& cc) {
  std::vector<double> distinct;
  std::vector<int> mult;
  for (int k = 0; k < cfg.k_max; ++k) {
    const double q = cfg.power_factor(k);
    auto it = std::find(distinct.begin(), distinct.end(), q);
    if (it == distinct.end()) {
      distinct.push_back(q);
      mult.push_back(1);
    } else {
      ++mult[static_cast<std::size_t>(it - distinct.begin())];
    }
  }
  std::complex<double> prod{1.0, 0.0};
  const double snr = cfg.snr_ref();
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    const std::complex<double> phi = fox_h_kernel(-tau, distinct[i] * snr, link, chan, cc);
    std::complex<double> pw{1.0, 0.0};
    for (int j = 0; j < mult[i]; ++j) pw *= phi;
    prod *= pw;
  }
  return prod / tau;
}

struct SchemeGain {
  double term;  // C(R)^(-D), the factor multiplying A * L(P)
  double gain;  // C(R) itself
};

SchemeGain coding_gain(HarqScheme scheme, int k_max, double delta, double rate,
                       const ContourConfig& cc) {
  const double d_total = k_max * delta;
  const double x = std::pow(2.0, rate);
  SchemeGain g;
  switch (scheme) {
    case HarqScheme::TypeI:
      g.term = std::pow(x - 1.0, d_total);
      break;
    case HarqScheme::ChaseCombining:
      g.term = std::exp(k_max * ln_gamma(delta + 1.0) - ln_gamma(d_total + 1.0)) *
               std::pow(x - 1.0, d_total);
      break;
    case HarqScheme::IncrementalRedundancy:
      g.term = meijer_g_asymptotic(k_max, delta, x, cc);
      break;
  }
  g.gain = std::pow(g.term, -1.0 / d_total);
  return g;
}

}  // namespace

double outage_exact_ir(const HarqConfig& cfg, const LinkParams& link,
                       const ChannelParams& chan, const AbateWhittConfig& aw,
                       const ContourConfig& cc) {
  cfg.validate();
  link.validate();
  chan.validate();
  aw.validate();
  cc.validate();
  if (!(cfg.rate_bps_hz > 0))
    throw std::invalid_argument("outage_exact_ir: rate must be > 0");

  const double x = cfg.rate_bps_hz * kLn2;  // invert the CDF transform at R ln 2
  const int n_max = aw.q + aw.m;

  // Partial sums s_j of the alternating Bromwich series at nodes
  // tau_n = (a + 2 pi i n) / (2x).
  std::vector<double> s(static_cast<std::size_t>(n_max) + 1);
  const double pref = std::exp(0.5 * aw.a);
  double acc = pref / (2.0 * x) *
               cdf_transform(std::complex<double>(aw.a / (2.0 * x), 0.0), cfg, link, chan, cc)
                   .real();
  s[0] = acc;
  for (int n = 1; n <= n_max; ++n) {
    const std::complex<double> tau{aw.a / (2.0 * x), kPi * n / x};
    const double term = cdf_transform(tau, cfg, link, chan, cc).real();
    acc += pref / x * ((n % 2) ? -term : term);
    s[static_cast<std::size_t>(n)] = acc;
  }

  // Euler (binomial) average of the last m+1 partial sums, plus the same
  // average one index earlier as a stagnation check.
  const double scale = std::pow(2.0, -aw.m);
  double est = 0.0, est_prev = 0.0;
  for (int m = 0; m <= aw.m; ++m) {
    const double w = scale * binomial(aw.m, m);
    est += w * s[static_cast<std::size_t>(aw.q + m)];
    est_prev += w * s[static_cast<std::size_t>(aw.q + m - 1)];
  }
  const double diff = std::abs(est - est_prev);
  if (diff > 1e-5 + 1e-3 * std::abs(est))
    throw ConvergenceError("outage_exact_ir: Euler sum did not stabilize");

  if (est < 0.0 || est > 1.0) {
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    est = std::clamp(est, 0.0, 1.0);
  }
  return est;
}

std::uint64_t outage_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }

AsymptoticBreakdown outage_asymptotic(const HarqConfig& cfg, const LinkParams& link,
                                      const ChannelParams& chan, const ContourConfig& cc) {
  cfg.validate();
  link.validate();
  chan.validate();
  if (!(cfg.rate_bps_hz > 0))
    throw std::invalid_argument("outage_asymptotic: rate must be > 0");
  const PointingDerived pd = pointing_derived(chan);
  const double phi = pd.phi;
  const double am = chan.alpha * chan.mu;
  if (std::abs(am - phi) < 1e-9)
    throw std::domain_error("outage_asymptotic: mu*alpha == phi boundary excluded");

  const double delta = 0.5 * std::min(phi, am);
  const double hl = path_gain(link);
  const double hs = chan.hhat_f * pd.s0;  // composite amplitude scale

  // Per-round channel constant: the coefficient of y^delta in the tail
  // Pr{rho |h_l|^2 X^2 < y} ~ const * rho^(-delta) * y^delta.
  double a1;
  if (phi < am) {  // misalignment-limited branch
    a1 = gamma_fn(chan.mu - phi / chan.alpha) * std::pow(chan.mu, phi / chan.alpha) /
         (gamma_fn(chan.mu) * std::pow(hs, phi) * std::pow(hl, phi));
  } else {  // fading-limited branch
    a1 = phi * std::pow(chan.mu, chan.mu - 1.0) /
         (gamma_fn(chan.mu) * (phi - am) * std::pow(hs, am) * std::pow(hl, am));
  }

  AsymptoticBreakdown out;
  out.diversity = cfg.k_max * delta;
  // Powers in watts: P_k = q_k * snr_ref * N0, so prod rho_k^-delta =
  // power_factor * N0^diversity; the compensating noise power folds into A.
  double lp = 1.0;
  const double snr = cfg.snr_ref();
  for (int k = 0; k < cfg.k_max; ++k)
    lp *= std::pow(cfg.power_factor(k) * snr * link.noise_power_w, -delta);
  out.power_factor = lp;
  out.impact_factor_a =
      std::pow(a1, cfg.k_max) * std::pow(link.noise_power_w, out.diversity);

  const SchemeGain g = coding_gain(cfg.scheme, cfg.k_max, delta, cfg.rate_bps_hz, cc);
  out.coding_gain = g.gain;
  out.outage = out.impact_factor_a * out.power_factor * g.term;
  return out;
}

double diversity_order(const ChannelParams& chan, int k_max, int hops) {
  chan.validate();
  if (hops < 1) throw std::invalid_argument("diversity_order: hops must be >= 1");
  if (k_max < hops) throw std::invalid_argument("diversity_order: k_max must be >= hops");
  const PointingDerived pd = pointing_derived(chan);
  return (k_max - hops + 1) * 0.5 * std::min(pd.phi, chan.alpha * chan.mu);
}

double outage_type1_exact(const HarqConfig& cfg, const LinkParams& link,
                          const ChannelParams& chan) {
  cfg.validate();
  const double hl = path_gain(link);
  const double c = std::pow(2.0, cfg.rate_bps_hz) - 1.0;
  double p = 1.0;
  for (int k = 0; k < cfg.k_max; ++k) {
    const double rho = cfg.power_factor(k) * cfg.snr_ref();
    p *= composite_cdf(std::sqrt(c / (rho * hl * hl)), chan);
  }
  return p;
}

double outage_cc_quadrature(const HarqConfig& cfg, const LinkParams& link,
                            const ChannelParams& chan, double rel_tol) {
  cfg.validate();
  if (cfg.k_max > 3)
    throw std::invalid_argument("outage_cc_quadrature: supported for k_max <= 3");
  const double hl = path_gain(link);
  const double c = std::pow(2.0, cfg.rate_bps_hz) - 1.0;
  std::vector<double> g(static_cast<std::size_t>(cfg.k_max));
  for (int k = 0; k < cfg.k_max; ++k)
    g[static_cast<std::size_t>(k)] = cfg.power_factor(k) * cfg.snr_ref() * hl * hl;

  if (cfg.k_max == 1) return composite_cdf(std::sqrt(c / g[0]), chan);
  if (cfg.k_max == 2) {
    const double x1_max = std::sqrt(c / g[0]);
    return quad::tanh_sinh(
        [&](double x1) {
          const double rem = c - g[0] * x1 * x1;
          return composite_pdf(x1, chan) * composite_cdf(std::sqrt(rem / g[1]), chan);
        },
        0.0, x1_max, rel_tol);
  }
  const double x1_max = std::sqrt(c / g[0]);
  return quad::tanh_sinh(
      [&](double x1) {
        const double rem1 = c - g[0] * x1 * x1;
        const double x2_max = std::sqrt(rem1 / g[1]);
        const double inner = quad::tanh_sinh(
            [&](double x2) {
              const double rem2 = rem1 - g[1] * x2 * x2;
              return composite_pdf(x2, chan) * composite_cdf(std::sqrt(rem2 / g[2]), chan);
            },
            0.0, x2_max, rel_tol);
        return composite_pdf(x1, chan) * inner;
      },
      0.0, x1_max, rel_tol);
}

}  // namespace thzharq
