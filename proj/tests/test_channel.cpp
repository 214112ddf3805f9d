// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <algorithm>
#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/quadrature.hpp"

using namespace thzharq;
using testutil::ref_chan;
using testutil::ref_link;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Quantile of the composite distribution by bisection on the closed-form CDF.
double composite_quantile(const ChannelParams& ch, double p) {
  double lo = 0.0, hi = 60.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (composite_cdf(mid, ch) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("free-space path gain with unit antenna gains") {
  LinkParams link = ref_link();
  link.gain_tx_dbi = 0.0;
  link.gain_rx_dbi = 0.0;
  // c / (4 pi f d) at 275 GHz over 20 m
  CHECK(path_gain(link) == doctest::Approx(4.3376e-6).epsilon(1e-4));
  CHECK(path_gain(ref_link()) == doctest::Approx(1.3717).epsilon(1e-3));
}

TEST_CASE("path gain scaling laws") {
  const LinkParams link = ref_link();
  CHECK(path_gain(link, 40.0) ==
        doctest::Approx(0.5 * path_gain(link, 20.0)).epsilon(1e-13));

  LinkParams absorbing = link;
  absorbing.absorption_coeff_per_m = 0.1;  // kappa d = 2
  CHECK(path_gain(absorbing) / path_gain(link) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  double prev = path_gain(link, 5.0);
  for (double d = 10.0; d <= 80.0; d += 5.0) {
    const double cur = path_gain(link, d);
    CHECK(cur < prev);
    prev = cur;
  }
  LinkParams hf = link;
  hf.frequency_hz = 2.0 * link.frequency_hz;
  CHECK(path_gain(hf) < path_gain(link));
}

TEST_CASE("pointing geometry limits and identities") {
  // Wide aperture relative to the beam: nearly all power collected.
  ChannelParams wide = ref_chan(1.0);
  wide.antenna_radius_m = 20.0;
  CHECK(pointing_derived(wide).s0 == doctest::Approx(1.0).epsilon(1e-12));

  // zeta = sqrt(pi) r / (sqrt(2) w) = 1  =>  S0 = erf(1)^2.
  ChannelParams unit = ref_chan(1.0);
  unit.antenna_radius_m = std::sqrt(2.0) / std::sqrt(kPi);
  const auto pd = pointing_derived(unit);
  CHECK(pd.zeta == doctest::Approx(1.0).epsilon(1e-12));
  const double erf1 = std::erf(1.0);
  CHECK(pd.s0 == doctest::Approx(erf1 * erf1).epsilon(1e-12));
  CHECK(std::abs(pd.s0 - 0.7108) <= 1e-3);

  // Equivalent-width identity.
  const auto q = pointing_derived(ref_chan(3.0));
  const double w = 3.0;
  const double we2_ref = std::sqrt(kPi) * w * w * std::erf(q.zeta) /
                         (2.0 * q.zeta * std::exp(-q.zeta * q.zeta));
  CHECK(q.w_e * q.w_e == doctest::Approx(we2_ref).epsilon(1e-12));

  // Jitter only rescales phi; the geometry terms are untouched.
  ChannelParams jittery = ref_chan(3.0);
  jittery.jitter_sigma = 2.0;
  const auto qj = pointing_derived(jittery);
  CHECK(qj.s0 == doctest::Approx(q.s0).epsilon(1e-14));
  CHECK(qj.w_e == doctest::Approx(q.w_e).epsilon(1e-14));
  CHECK(qj.phi == doctest::Approx(q.phi / 4.0).epsilon(1e-13));
}

TEST_CASE("composite pdf is a density") {
  for (double w : {1.0, 3.0}) {
    const ChannelParams ch = ref_chan(w);
    for (double x : {0.01, 0.1, 0.4, 0.9, 1.5, 3.0}) {
      CHECK(composite_pdf(x, ch) >= 0.0);
    }
    const double head =
        quad::tanh_sinh([&](double x) { return composite_pdf(x, ch); }, 0.0, 8.0, 1e-13);
    const double tail =
        quad::integrate_upper([&](double x) { return composite_pdf(x, ch); }, 8.0, 1e-12);
    CHECK(head + tail == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("composite density approaches the pure-fading limit for wide jitter headroom") {
  // A large aperture pushes phi ~ 160 and S0 ~ 1, so the misalignment factor
  // concentrates at 1 and the alpha-mu (Rayleigh for alpha=2, mu=1) density
  // should emerge.
  ChannelParams ch = ref_chan(1.0);
  ch.antenna_radius_m = 2.2;
  const auto pd = pointing_derived(ch);
  CHECK(pd.phi > 100.0);
  CHECK(pd.s0 > 0.999);
  for (double x : {0.6, 1.0, 1.4}) {
    const double rayleigh = 2.0 * x * std::exp(-x * x);
    const double got = composite_pdf(x, ch);
    CHECK(std::isfinite(got));
    CHECK(testutil::close_rel(got, rayleigh, 0.05));
  }
}

TEST_CASE("closed-form cdf matches quadrature of the pdf") {
  for (double w : {1.0, 3.0}) {
    const ChannelParams ch = ref_chan(w);
    for (double x : {0.05, 0.2, 0.5, 0.9, 1.3}) {
      const double by_quad =
          quad::tanh_sinh([&](double t) { return composite_pdf(t, ch); }, 0.0, x, 1e-13);
      CHECK(composite_cdf(x, ch) == doctest::Approx(by_quad).epsilon(1e-8));
    }
    CHECK(composite_cdf(50.0, ch) >= 1.0 - 1e-8);
    double prev = 0.0;
    for (double x = 0.05; x < 4.0; x += 0.08) {
      const double cur = composite_cdf(x, ch);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("array sampler is deterministic in the seed") {
  const ChannelParams ch = ref_chan(3.0);
  const auto a = sample_composite(ch, 256, 42);
  const auto b = sample_composite(ch, 256, 42);
  const auto c = sample_composite(ch, 256, 43);
  REQUIRE(a.size() == 256);
  CHECK(a == b);
  CHECK(a != c);
  for (double x : a) CHECK(x > 0.0);
}

TEST_CASE("sampled alpha-th moment matches the product-channel expectation") {
  struct Case {
    ChannelParams ch;
    std::uint64_t seed;
  };
  ChannelParams odd = ref_chan(2.0);
  odd.alpha = 3.1;
  odd.mu = 1.7;
  odd.hhat_f = 1.3;
  for (const Case& tc : {Case{ref_chan(3.0), 7}, Case{odd, 8}}) {
    const auto pd = pointing_derived(tc.ch);
    const double a = tc.ch.alpha;
    // E[X^alpha] = E[h_p^alpha] E[h_f^alpha]
    //            = S0^alpha phi/(phi+alpha) * hhat^alpha.
    const double want = std::pow(pd.s0, a) * (pd.phi / (pd.phi + a)) *
                        std::pow(tc.ch.hhat_f, a);
    const std::size_t n = 400000;
    const auto xs = sample_composite(tc.ch, n, tc.seed);
    double sum = 0.0, sq = 0.0;
    for (double x : xs) {
      const double m = std::pow(x, a);
      sum += m;
      sq += m * m;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - want) < 4.0 * se);
  }
}

TEST_CASE("sample median sits at the distribution median") {
  const ChannelParams ch = ref_chan(3.0);
  auto xs = sample_composite(ch, 1000000, 11);
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
  const double median = xs[xs.size() / 2];
  CHECK(composite_cdf(median, ch) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("kolmogorov-smirnov distance against the closed-form cdf") {
  const ChannelParams ch = ref_chan(1.0);
  auto xs = sample_composite(ch, 1000000, 5);
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = composite_cdf(xs[i], ch);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  CHECK(d <= 1.63 / std::sqrt(n));  // 1% critical value
}

TEST_CASE("chi-square goodness of fit over equal-probability bins") {
  const ChannelParams ch = ref_chan(3.0);
  const int bins = 50;
  std::vector<double> edges(bins - 1);
  for (int j = 1; j < bins; ++j)
    edges[j - 1] = composite_quantile(ch, static_cast<double>(j) / bins);
  const std::size_t n = 1000000;
  const auto xs = sample_composite(ch, n, 9);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : xs) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    ++counts[static_cast<std::size_t>(it - edges.begin())];
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(testutil::chi2_tail(chi2, bins - 1) > 0.01);
}
