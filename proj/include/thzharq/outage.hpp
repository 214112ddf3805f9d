// SPDX-License-Identifier: Apache-2.0
//
// Outage probability of HARQ over the composite terahertz channel.
// The incremental-redundancy exact value inverts the Laplace transform of
// the accumulated-mutual-information CDF (Euler-accelerated Bromwich sum
// over fox_h_kernel factors).  High-SNR asymptotics follow the
// diversity/coding-gain decomposition; Type-I and chase-combining exact
// references come from the composite CDF directly.
#pragma once

#include <cstdint>

#include "thzharq/params.hpp"

namespace thzharq {

// Multiplicative decomposition of the high-SNR outage:
//   outage = impact_factor_a * power_factor * coding_gain^(-diversity)
// where power_factor collects the per-round transmit powers and
// coding_gain depends only on the rate and the HARQ scheme.
struct AsymptoticBreakdown {
  double impact_factor_a = 0.0;
  double power_factor = 0.0;
  double coding_gain = 0.0;
  double diversity = 0.0;
  double outage = 0.0;
};

// Exact outage probability of incremental-redundancy HARQ after
// cfg.k_max rounds: Pr{ sum_k log2(1 + rho_k |h_l|^2 X_k^2) < R }.
// Result clamped to [0, 1]; clamp events are counted, not raised.
double outage_exact_ir(const HarqConfig& cfg, const LinkParams& link,
                       const ChannelParams& chan, const AbateWhittConfig& aw = {},
                       const ContourConfig& cc = {});

// Number of times outage_exact_ir had to clamp a result into [0, 1]
// since process start (benign artifact of the alternating Euler sum).
std::uint64_t outage_clamp_count();

// High-SNR asymptotic outage for the configured scheme.  Requires the
// non-degenerate regime mu*alpha != phi; throws std::domain_error on the
// boundary.
AsymptoticBreakdown outage_asymptotic(const HarqConfig& cfg, const LinkParams& link,
                                      const ChannelParams& chan,
                                      const ContourConfig& cc = {});

// (k_max - hops + 1) * min{phi, alpha mu} / 2.
double diversity_order(const ChannelParams& chan, int k_max, int hops = 1);

// Exact Type-I outage: every round fails individually, so the value is a
// product of composite CDFs at the per-round SNR thresholds.
double outage_type1_exact(const HarqConfig& cfg, const LinkParams& link,
                          const ChannelParams& chan);

// Exact chase-combining outage by nested quadrature over the composite
// density; supported for k_max <= 3 (use Monte Carlo beyond that).
double outage_cc_quadrature(const HarqConfig& cfg, const LinkParams& link,
                            const ChannelParams& chan, double rel_tol = 1e-8);

}  // namespace thzharq
