// SPDX-License-Identifier: Apache-2.0
#include "thzharq/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/rng.hpp"

namespace thzharq {

namespace {

constexpr std::uint64_t kChunk = 1ull << 16;

// Run `body` once per fixed-size chunk, each with its own RNG stream, and
// return the per-chunk states in chunk order so any reduction is
// independent of thread scheduling.
template <class State, class Body>
std::vector<State> run_chunks(std::uint64_t trials, std::uint64_t seed, int workers,
                              Body&& body) {
  const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<State> states(static_cast<std::size_t>(n_chunks));
  int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::clamp(nw, 1, 64);
  if (static_cast<std::uint64_t>(nw) > n_chunks) nw = static_cast<int>(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      CounterRng rng(seed, c);
      const std::uint64_t n = std::min(kChunk, trials - c * kChunk);
      body(rng, n, states[static_cast<std::size_t>(c)]);
    }
  };
  if (nw <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int i = 0; i < nw; ++i) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }
  return states;
}

SimResult probability_result(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed) {
  SimResult r;
  r.trials = trials;
  r.seed = seed;
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  r.estimate = p;
  r.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return r;
}

struct LtatState {
  std::uint64_t wins = 0;       // delivered messages
  std::uint64_t rounds = 0;     // total rounds consumed
  std::uint64_t rounds_sq = 0;  // sum of squared per-cycle rounds
  std::uint64_t win_rounds = 0; // sum of rounds over delivered cycles
};

SimResult ltat_result(const LtatState& s, double rate, std::uint64_t trials,
                      std::uint64_t seed) {
  SimResult r;
  r.trials = trials;
  r.seed = seed;
  const double n = static_cast<double>(trials);
  const double wbar = static_cast<double>(s.wins) / n;
  const double rbar = static_cast<double>(s.rounds) / n;
  r.estimate = rate * wbar / rbar;
  // Delta method for the ratio of means (w binary, so E[w^2] = E[w]).
  const double var_w = wbar - wbar * wbar;
  const double cov = static_cast<double>(s.win_rounds) / n - wbar * rbar;
  const double var_r = static_cast<double>(s.rounds_sq) / n - rbar * rbar;
  const double theta = wbar / rbar;
  const double var_t =
      (var_w - 2.0 * theta * cov + theta * theta * var_r) / (n * rbar * rbar);
  r.std_error = rate * std::sqrt(std::max(0.0, var_t));
  return r;
}

// Per-round linear SNR gains rho_k |h_l|^2 for one hop.
std::vector<double> round_gains(const HarqConfig& cfg, double hl) {
  std::vector<double> g(static_cast<std::size_t>(cfg.k_max));
  for (int k = 0; k < cfg.k_max; ++k)
    g[static_cast<std::size_t>(k)] = cfg.power_factor(k) * cfg.snr_ref() * hl * hl;
  return g;
}

// Rounds needed by one hop to decode under the configured combining rule,
// drawing fresh channels until success or the budget runs out.  Returns
// the number of rounds consumed and sets `ok`.
int hop_rounds(const HarqConfig& cfg, const ChannelParams& chan,
               const std::vector<double>& gains, int budget, CounterRng& rng, bool& ok) {
  const double thr_prod = std::pow(2.0, cfg.rate_bps_hz);
  const double thr_lin = thr_prod - 1.0;
  double prod = 1.0, sum = 0.0, best = 0.0;
  for (int j = 0; j < budget; ++j) {
    const double x = sample_composite(chan, rng);
    const double snr = gains[static_cast<std::size_t>(j)] * x * x;
    switch (cfg.scheme) {
      case HarqScheme::IncrementalRedundancy:
        prod *= 1.0 + snr;
        if (prod >= thr_prod) { ok = true; return j + 1; }
        break;
      case HarqScheme::ChaseCombining:
        sum += snr;
        if (sum >= thr_lin) { ok = true; return j + 1; }
        break;
      case HarqScheme::TypeI:
        best = std::max(best, snr);
        if (best >= thr_lin) { ok = true; return j + 1; }
        break;
    }
  }
  ok = false;
  return budget;
}

}  // namespace

SimResult simulate_outage(const HarqConfig& cfg, const LinkParams& link,
                          const ChannelParams& chan, std::uint64_t trials,
                          std::uint64_t seed, int workers) {
  cfg.validate();
  link.validate();
  chan.validate();
  if (trials < 1) throw std::invalid_argument("simulate_outage: trials must be >= 1");
  const auto gains = round_gains(cfg, path_gain(link));
  auto states = run_chunks<std::uint64_t>(
      trials, seed, workers, [&](CounterRng& rng, std::uint64_t n, std::uint64_t& hits) {
        for (std::uint64_t t = 0; t < n; ++t) {
          bool ok = false;
          hop_rounds(cfg, chan, gains, cfg.k_max, rng, ok);
          if (!ok) ++hits;
        }
      });
  std::uint64_t hits = 0;
  for (auto h : states) hits += h;
  return probability_result(hits, trials, seed);
}

SchemeComparison simulate_all_schemes(const HarqConfig& cfg, const LinkParams& link,
                                      const ChannelParams& chan, std::uint64_t trials,
                                      std::uint64_t seed, int workers) {
  cfg.validate();
  link.validate();
  chan.validate();
  if (trials < 1) throw std::invalid_argument("simulate_all_schemes: trials must be >= 1");
  const auto gains = round_gains(cfg, path_gain(link));
  const double thr_prod = std::pow(2.0, cfg.rate_bps_hz);
  const double thr_lin = thr_prod - 1.0;
  struct Counts {
    std::uint64_t t1 = 0, cc = 0, ir = 0;
  };
  auto states = run_chunks<Counts>(
      trials, seed, workers, [&](CounterRng& rng, std::uint64_t n, Counts& c) {
        for (std::uint64_t t = 0; t < n; ++t) {
          double prod = 1.0, sum = 0.0, best = 0.0;
          for (int k = 0; k < cfg.k_max; ++k) {
            const double x = sample_composite(chan, rng);
            const double snr = gains[static_cast<std::size_t>(k)] * x * x;
            prod *= 1.0 + snr;
            sum += snr;
            best = std::max(best, snr);
          }
          if (best < thr_lin) ++c.t1;
          if (sum < thr_lin) ++c.cc;
          if (prod < thr_prod) ++c.ir;
        }
      });
  Counts total;
  for (const auto& c : states) {
    total.t1 += c.t1;
    total.cc += c.cc;
    total.ir += c.ir;
  }
  SchemeComparison out;
  out.type1 = probability_result(total.t1, trials, seed);
  out.cc = probability_result(total.cc, trials, seed);
  out.ir = probability_result(total.ir, trials, seed);
  return out;
}

SimResult simulate_ltat(const HarqConfig& cfg, const LinkParams& link,
                        const ChannelParams& chan, std::uint64_t trials,
                        std::uint64_t seed, int workers) {
  cfg.validate();
  link.validate();
  chan.validate();
  if (trials < 1) throw std::invalid_argument("simulate_ltat: trials must be >= 1");
  const auto gains = round_gains(cfg, path_gain(link));
  auto states = run_chunks<LtatState>(
      trials, seed, workers, [&](CounterRng& rng, std::uint64_t n, LtatState& s) {
        for (std::uint64_t t = 0; t < n; ++t) {
          bool ok = false;
          const int used = hop_rounds(cfg, chan, gains, cfg.k_max, rng, ok);
          s.wins += ok ? 1 : 0;
          s.rounds += static_cast<std::uint64_t>(used);
          s.rounds_sq += static_cast<std::uint64_t>(used) * static_cast<std::uint64_t>(used);
          if (ok) s.win_rounds += static_cast<std::uint64_t>(used);
        }
      });
  LtatState total;
  for (const auto& s : states) {
    total.wins += s.wins;
    total.rounds += s.rounds;
    total.rounds_sq += s.rounds_sq;
    total.win_rounds += s.win_rounds;
  }
  return ltat_result(total, cfg.rate_bps_hz, trials, seed);
}

namespace {

// One multi-hop message: returns rounds consumed; delivered set on success.
// Blockage is sampled once per hop; a blocked or undecoded message burns
// the whole budget.
int multihop_message(const HopTopology& topo, const HarqConfig& cfg,
                     const ChannelParams& chan,
                     const std::vector<std::vector<double>>& hop_gains,
                     const std::vector<double>& block_prob, CounterRng& rng,
                     bool& delivered) {
  int used = 0;
  for (int l = 0; l < topo.hops; ++l) {
    if (rng.uniform() < block_prob[static_cast<std::size_t>(l)]) {
      delivered = false;
      return cfg.k_max;
    }
    bool ok = false;
    used += hop_rounds(cfg, chan, hop_gains[static_cast<std::size_t>(l)],
                       cfg.k_max - used, rng, ok);
    if (!ok) {
      delivered = false;
      return cfg.k_max;
    }
  }
  delivered = true;
  return used;
}

struct MultihopSetup {
  std::vector<std::vector<double>> gains;
  std::vector<double> block_prob;
};

MultihopSetup multihop_setup(const HopTopology& topo, const HarqConfig& cfg,
                             const LinkParams& link) {
  topo.validate();
  cfg.validate();
  link.validate();
  if (cfg.k_max < topo.hops)
    throw std::invalid_argument("multi-hop simulation requires k_max >= hops");
  MultihopSetup s;
  const auto dists = topo.hop_distances(link.distance_m);
  for (int l = 0; l < topo.hops; ++l) {
    const double d = dists[static_cast<std::size_t>(l)];
    s.gains.push_back(round_gains(cfg, path_gain(link, d)));
    s.block_prob.push_back(-std::expm1(-topo.hop_blockage(l).beta() * d));
  }
  return s;
}

}  // namespace

SimResult simulate_multihop(const HopTopology& topology, const HarqConfig& cfg,
                            const LinkParams& link, const ChannelParams& chan,
                            std::uint64_t trials, std::uint64_t seed, int workers) {
  chan.validate();
  if (trials < 1) throw std::invalid_argument("simulate_multihop: trials must be >= 1");
  const MultihopSetup setup = multihop_setup(topology, cfg, link);
  auto states = run_chunks<std::uint64_t>(
      trials, seed, workers, [&](CounterRng& rng, std::uint64_t n, std::uint64_t& hits) {
        for (std::uint64_t t = 0; t < n; ++t) {
          bool delivered = false;
          multihop_message(topology, cfg, chan, setup.gains, setup.block_prob, rng,
                           delivered);
          if (!delivered) ++hits;
        }
      });
  std::uint64_t hits = 0;
  for (auto h : states) hits += h;
  return probability_result(hits, trials, seed);
}

SimResult simulate_multihop_ltat(const HopTopology& topology, const HarqConfig& cfg,
                                 const LinkParams& link, const ChannelParams& chan,
                                 std::uint64_t trials, std::uint64_t seed, int workers) {
  chan.validate();
  if (trials < 1) throw std::invalid_argument("simulate_multihop_ltat: trials must be >= 1");
  const MultihopSetup setup = multihop_setup(topology, cfg, link);
  auto states = run_chunks<LtatState>(
      trials, seed, workers, [&](CounterRng& rng, std::uint64_t n, LtatState& s) {
        for (std::uint64_t t = 0; t < n; ++t) {
          bool delivered = false;
          const int used = multihop_message(topology, cfg, chan, setup.gains,
                                            setup.block_prob, rng, delivered);
          s.wins += delivered ? 1 : 0;
          s.rounds += static_cast<std::uint64_t>(used);
          s.rounds_sq += static_cast<std::uint64_t>(used) * static_cast<std::uint64_t>(used);
          if (delivered) s.win_rounds += static_cast<std::uint64_t>(used);
        }
      });
  LtatState total;
  for (const auto& s : states) {
    total.wins += s.wins;
    total.rounds += s.rounds;
    total.rounds_sq += s.rounds_sq;
    total.win_rounds += s.win_rounds;
  }
  return ltat_result(total, cfg.rate_bps_hz, trials, seed);
}

}  // namespace thzharq
