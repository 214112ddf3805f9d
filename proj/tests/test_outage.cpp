// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/montecarlo.hpp"
#include "thzharq/outage.hpp"

using namespace thzharq;
using testutil::ref_chan;
using testutil::ref_harq;
using testutil::ref_link;

namespace {

// Single-round outage has the closed form F(sqrt((2^R - 1) / (rho |h_l|^2))).
double single_round_closed_form(const HarqConfig& cfg, const LinkParams& link,
                                const ChannelParams& ch) {
  const double rho = cfg.power_factor(0) * cfg.snr_ref() / link.noise_power_w;
  const double hl = path_gain(link);
  const double thr = std::sqrt((std::exp2(cfg.rate_bps_hz) - 1.0) / (rho * hl * hl));
  return composite_cdf(thr, ch);
}

}  // namespace

TEST_CASE("single-round outage reduces to the composite cdf") {
  for (double w : {1.0, 3.0}) {
    const ChannelParams ch = ref_chan(w);
    for (double snr_db : {0.0, 8.0, 16.0, 24.0, 32.0}) {
      for (double rate : {0.5, 2.0, 4.0}) {
        const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 1, rate, snr_db);
        const double want = single_round_closed_form(cfg, ref_link(), ch);
        CHECK(std::abs(outage_exact_ir(cfg, ref_link(), ch) - want) <= 1e-6);
        CHECK(std::abs(outage_type1_exact(cfg, ref_link(), ch) - want) <= 1e-12);
        CHECK(std::abs(outage_cc_quadrature(cfg, ref_link(), ch) - want) <= 1e-6);
      }
    }
  }
}

TEST_CASE("vanishing rate drives the outage to zero") {
  const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 1e-3, 20.0);
  AbateWhittConfig aw;
  aw.a = 30.0;  // tighten the discretization error for the tiny target
  CHECK(outage_exact_ir(cfg, ref_link(), ref_chan(3.0), aw) <= 1e-6);
}

TEST_CASE("asymptotic outage scales exactly with per-round power factors") {
  auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, 24.0);
  const auto base = outage_asymptotic(cfg, ref_link(), ref_chan(3.0));
  const double c = 2.5;
  cfg.power_factors = {c, c, c};
  const auto boosted = outage_asymptotic(cfg, ref_link(), ref_chan(3.0));
  CHECK(boosted.outage ==
        doctest::Approx(base.outage * std::pow(c, -base.diversity)).epsilon(1e-12));
  CHECK(boosted.diversity == base.diversity);
  CHECK(boosted.impact_factor_a == doctest::Approx(base.impact_factor_a).epsilon(1e-14));
}

TEST_CASE("breakdown invariant ties the fields to the outage") {
  for (auto scheme : {HarqScheme::TypeI, HarqScheme::ChaseCombining,
                      HarqScheme::IncrementalRedundancy}) {
    const auto cfg = ref_harq(scheme, 3, 2.0, 30.0);
    const auto b = outage_asymptotic(cfg, ref_link(), ref_chan(3.0));
    CHECK(b.outage == doctest::Approx(b.impact_factor_a * b.power_factor *
                                      std::pow(b.coding_gain, -b.diversity))
                          .epsilon(1e-10));
    CHECK(b.diversity == doctest::Approx(diversity_order(ref_chan(3.0), 3)).epsilon(1e-14));
  }
}

TEST_CASE("all schemes coincide when only one round is allowed") {
  std::vector<AsymptoticBreakdown> bs;
  for (auto scheme : {HarqScheme::TypeI, HarqScheme::ChaseCombining,
                      HarqScheme::IncrementalRedundancy}) {
    bs.push_back(outage_asymptotic(ref_harq(scheme, 1, 2.0, 24.0), ref_link(), ref_chan(1.0)));
  }
  for (std::size_t i = 1; i < bs.size(); ++i) {
    CHECK(testutil::close_rel(bs[i].outage, bs[0].outage, 1e-10));
    CHECK(testutil::close_rel(bs[i].coding_gain, bs[0].coding_gain, 1e-10));
  }
}

TEST_CASE("coding gains order as redundancy grows smarter") {
  for (double w : {1.0, 3.0}) {
    for (int k : {2, 3, 4}) {
      for (double rate : {1.0, 2.0, 3.5}) {
        const auto t1 =
            outage_asymptotic(ref_harq(HarqScheme::TypeI, k, rate, 30.0), ref_link(), ref_chan(w));
        const auto cc = outage_asymptotic(ref_harq(HarqScheme::ChaseCombining, k, rate, 30.0),
                                          ref_link(), ref_chan(w));
        const auto ir = outage_asymptotic(
            ref_harq(HarqScheme::IncrementalRedundancy, k, rate, 30.0), ref_link(), ref_chan(w));
        CHECK(ir.coding_gain >= cc.coding_gain * (1.0 - 1e-12));
        CHECK(cc.coding_gain >= t1.coding_gain * (1.0 - 1e-12));
        CHECK(t1.outage >= cc.outage * (1.0 - 1e-12));
        CHECK(cc.outage >= ir.outage * (1.0 - 1e-12));
      }
    }
  }
}

TEST_CASE("asymptote approaches the exact curve at high snr") {
  // One point per sign regime.  The widest default-jitter waist at which the
  // pointing exponent still dominates (w = 3) converges too slowly for a
  // tight window here (the exponent gap |mu - phi/alpha| is only ~0.27, so
  // the subleading term decays like snr^-0.27); w = 6 gives a gap of ~1.
  {
    const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 2, 2.0, 46.0);
    const double exact = outage_exact_ir(cfg, ref_link(), ref_chan(6.0));
    const double asy = outage_asymptotic(cfg, ref_link(), ref_chan(6.0)).outage;
    CHECK(asy / exact > 0.9);
    CHECK(asy / exact < 1.1);
  }
  {
    const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, 44.0);
    const double exact = outage_exact_ir(cfg, ref_link(), ref_chan(1.0));
    const double asy = outage_asymptotic(cfg, ref_link(), ref_chan(1.0)).outage;
    CHECK(asy / exact > 0.9);
    CHECK(asy / exact < 1.1);
  }
}

TEST_CASE("degenerate regime boundary is rejected") {
  // sigma_s tuned so that phi = alpha * mu exactly.
  ChannelParams ch = ref_chan(3.0);
  const auto pd = pointing_derived(ch);
  ch.jitter_sigma = pd.w_e / std::sqrt(4.0 * ch.alpha * ch.mu);
  const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, 24.0);
  CHECK_THROWS_AS((void)outage_asymptotic(cfg, ref_link(), ch), std::domain_error);
}

TEST_CASE("euler-sum discretization error is controlled by its exponent") {
  const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, 16.0);
  AbateWhittConfig tight;
  tight.a = 22.0;
  const double loose = outage_exact_ir(cfg, ref_link(), ref_chan(3.0));
  const double ref = outage_exact_ir(cfg, ref_link(), ref_chan(3.0), tight);
  CHECK(std::abs(loose - ref) <= std::exp(-18.0) / (1.0 - std::exp(-18.0)) + 1e-9);
}

TEST_CASE("exact outage is monotone in snr, rate, and round budget") {
  const ChannelParams ch = ref_chan(3.0);
  // Start above the regime where the estimate saturates at 1 (there the
  // clamp makes successive values equal rather than strictly decreasing).
  double prev = 1.0;
  for (double snr : {8.0, 16.0, 24.0, 32.0}) {
    const double p =
        outage_exact_ir(ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, snr), ref_link(), ch);
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (double rate : {0.5, 1.0, 2.0, 3.0}) {
    const double p =
        outage_exact_ir(ref_harq(HarqScheme::IncrementalRedundancy, 3, rate, 16.0), ref_link(), ch);
    CHECK(p > prev);
    prev = p;
  }
  prev = 1.0;
  for (int k : {1, 2, 3, 4}) {
    const double p =
        outage_exact_ir(ref_harq(HarqScheme::IncrementalRedundancy, k, 2.0, 16.0), ref_link(), ch);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("zero rate is rejected by the outage routines") {
  const auto cfg = ref_harq(HarqScheme::IncrementalRedundancy, 3, 0.0, 16.0);
  CHECK_THROWS_AS((void)outage_exact_ir(cfg, ref_link(), ref_chan(3.0)), std::invalid_argument);
  CHECK_THROWS_AS((void)outage_asymptotic(cfg, ref_link(), ref_chan(3.0)), std::invalid_argument);
}

TEST_CASE("type-one outage with equal powers is a cdf power") {
  const auto cfg = ref_harq(HarqScheme::TypeI, 3, 2.0, 12.0);
  const double single = single_round_closed_form(cfg, ref_link(), ref_chan(1.0));
  CHECK(outage_type1_exact(cfg, ref_link(), ref_chan(1.0)) ==
        doctest::Approx(single * single * single).epsilon(1e-12));
}

TEST_CASE("chase-combining quadrature against monte carlo") {
  for (int k : {2, 3}) {
    const auto cfg = ref_harq(HarqScheme::ChaseCombining, k, 2.0, 10.0);
    const double exact = outage_cc_quadrature(cfg, ref_link(), ref_chan(3.0));
    const auto sim = simulate_outage(cfg, ref_link(), ref_chan(3.0), 1000000, 77);
    CHECK(std::abs(sim.estimate - exact) < 3.5 * sim.std_error);
  }
  const auto big = ref_harq(HarqScheme::ChaseCombining, 4, 2.0, 10.0);
  CHECK_THROWS_AS((void)outage_cc_quadrature(big, ref_link(), ref_chan(3.0)),
                  std::invalid_argument);
}

TEST_CASE("diversity order bookkeeping") {
  // w = 3 is the fading-limited regime (phi > alpha mu), so delta = alpha mu / 2 = 1.
  CHECK(diversity_order(ref_chan(3.0), 3) == doctest::Approx(3.0).epsilon(1e-12));
  const ChannelParams w3 = ref_chan(3.0);
  const auto pd3 = pointing_derived(w3);
  const double delta3 = 0.5 * std::min(pd3.phi, w3.alpha * w3.mu);
  CHECK(diversity_order(w3, 3) == doctest::Approx(3.0 * delta3).epsilon(1e-12));
  CHECK(diversity_order(w3, 4, 2) == doctest::Approx(3.0 * delta3).epsilon(1e-12));
  const ChannelParams w1 = ref_chan(1.0);
  const auto pd1 = pointing_derived(w1);
  CHECK(diversity_order(w1, 2) ==
        doctest::Approx(2.0 * 0.5 * std::min(pd1.phi, w1.alpha * w1.mu)).epsilon(1e-12));
  CHECK_THROWS_AS((void)diversity_order(w3, 2, 3), std::invalid_argument);
}

TEST_CASE("results are probabilities and the clamp counter is reachable") {
  const auto before = outage_clamp_count();
  for (double snr : {0.0, 20.0, 40.0}) {
    const double p = outage_exact_ir(
        ref_harq(HarqScheme::IncrementalRedundancy, 3, 2.0, snr), ref_link(), ref_chan(1.0));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(outage_clamp_count() >= before);
}
