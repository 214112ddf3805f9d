// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte-Carlo reference implementations: per-scheme outage,
// renewal-cycle throughput, and multi-hop outcomes with blockage.  Trials
// are split into fixed-size chunks, each driven by its own counter-RNG
// stream derived from (seed, chunk index), so estimates are bit-identical
// regardless of the number of worker threads.
#pragma once

#include <cstdint>

#include "thzharq/params.hpp"

namespace thzharq {

// Outage estimate for cfg.scheme after cfg.k_max rounds.  workers = 0
// picks the hardware concurrency; workers = 1 forces in-thread execution
// (useful when the caller runs its own pool).
SimResult simulate_outage(const HarqConfig& cfg, const LinkParams& link,
                          const ChannelParams& chan, std::uint64_t trials,
                          std::uint64_t seed, int workers = 0);

// All three schemes evaluated on the same channel draws, so the pointwise
// ordering TypeI >= CC >= IR holds per seed, not just in expectation.
struct SchemeComparison {
  SimResult type1, cc, ir;
};
SchemeComparison simulate_all_schemes(const HarqConfig& cfg, const LinkParams& link,
                                      const ChannelParams& chan, std::uint64_t trials,
                                      std::uint64_t seed, int workers = 0);

// Long-term average throughput over renewal cycles: a cycle consumes k
// rounds when decoding succeeds at round k and k_max rounds otherwise.
// std_error comes from the delta method for the ratio estimator.
SimResult simulate_ltat(const HarqConfig& cfg, const LinkParams& link,
                        const ChannelParams& chan, std::uint64_t trials,
                        std::uint64_t seed, int workers = 0);

// Multi-hop outage: each hop is independently blocked with probability
// 1 - exp(-beta_l d_l) (sampled once per message), and the decode-forward
// chain shares a budget of cfg.k_max rounds across hops.
SimResult simulate_multihop(const HopTopology& topology, const HarqConfig& cfg,
                            const LinkParams& link, const ChannelParams& chan,
                            std::uint64_t trials, std::uint64_t seed, int workers = 0);

// Multi-hop throughput; a failed or blocked message burns the full round
// budget, a delivered one consumes the rounds actually used.
SimResult simulate_multihop_ltat(const HopTopology& topology, const HarqConfig& cfg,
                                 const LinkParams& link, const ChannelParams& chan,
                                 std::uint64_t trials, std::uint64_t seed,
                                 int workers = 0);

}  // namespace thzharq
