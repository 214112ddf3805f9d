// SPDX-License-Identifier: Apache-2.0
//
// Blockage-aware closed-form outage and long-term average throughput for
// decode-and-forward relay chains that share one HARQ round budget.  The
// multi-hop outage composes per-hop outage differences over all ways of
// splitting the budget; a second, independent first-failing-hop
// decomposition is provided for cross-checking.
#pragma once

#include <vector>

#include "thzharq/params.hpp"

namespace thzharq {

// exp(-beta d): probability that a hop of length d is not blocked.
double non_blocking_prob(const BlockageParams& b, double distance_m);

// Law of total probability on one hop: P_B + P_N * p_out.
double outage_single_hop_blockage(const HarqConfig& cfg, const LinkParams& link,
                                  const ChannelParams& chan, const BlockageParams& b,
                                  const AbateWhittConfig& aw = {},
                                  const ContourConfig& cc = {});

// Outage of the L-hop chain with round budget cfg.k_max.
double outage_multihop(const HopTopology& topology, const HarqConfig& cfg,
                       const LinkParams& link, const ChannelParams& chan,
                       const AbateWhittConfig& aw = {}, const ContourConfig& cc = {});

// Outage after each intermediate budget k = hops..k_max (the last entry
// equals outage_multihop).  Shares the per-hop tables across budgets.
std::vector<double> outage_multihop_profile(const HopTopology& topology,
                                            const HarqConfig& cfg, const LinkParams& link,
                                            const ChannelParams& chan,
                                            const AbateWhittConfig& aw = {},
                                            const ContourConfig& cc = {});

// Independent outage formula summing over the first hop that fails to
// decode (the failing hop may receive zero rounds).  Only valid without
// blockage; used as a consistency oracle against outage_multihop.
double outage_multihop_first_failure(const HopTopology& topology, const HarqConfig& cfg,
                                     const LinkParams& link, const ChannelParams& chan,
                                     const AbateWhittConfig& aw = {},
                                     const ContourConfig& cc = {});

// Renewal-reward throughput from per-round outage probabilities
// p_out,1..p_out,K (single hop): R (1 - p_K) / (1 + sum_{k<K} p_k).
double ltat(const HarqConfig& cfg, const std::vector<double>& outages);

// Multi-hop version; `outages` holds p^(L)_out,k for k = hops..k_max:
// R (1 - p_K) / (L + sum_{k=L}^{K-1} p_k).
double ltat_multihop(const HopTopology& topology, const HarqConfig& cfg,
                     const std::vector<double>& outages);

// High-SNR limits: the outage floor 1 - prod_l P_N^l and the throughput
// ceiling R prod / (K (1 - prod) + L prod).
double multihop_outage_floor(const HopTopology& topology, const LinkParams& link);
double multihop_ltat_bound(const HopTopology& topology, const HarqConfig& cfg,
                           const LinkParams& link);

}  // namespace thzharq
