// SPDX-License-Identifier: Apache-2.0
#include "thzharq/multihop.hpp"

#include <cmath>

#include "thzharq/channel.hpp"
#include "thzharq/outage.hpp"

namespace thzharq {

namespace {

// Exact single-hop outage after `rounds` rounds for the configured scheme.
double single_hop_outage(const HarqConfig& cfg, int rounds, const LinkParams& link,
                         const ChannelParams& chan, const AbateWhittConfig& aw,
                         const ContourConfig& cc) {
  HarqConfig c = cfg;
  c.k_max = rounds;
  if (!cfg.power_factors.empty())
    c.power_factors.assign(cfg.power_factors.begin(), cfg.power_factors.begin() + rounds);
  switch (cfg.scheme) {
    case HarqScheme::IncrementalRedundancy:
      return outage_exact_ir(c, link, chan, aw, cc);
    case HarqScheme::TypeI:
      return outage_type1_exact(c, link, chan);
    case HarqScheme::ChaseCombining:
      return outage_cc_quadrature(c, link, chan);
  }
  throw std::logic_error("single_hop_outage: unknown scheme");
}

// Per-hop data shared by every formula below.
struct HopTables {
  std::vector<double> pn;                   // non-blocking probability per hop
  std::vector<std::vector<double>> p_out;   // p_out[l][m], m = 0..max rounds for hop l
};

HopTables build_tables(const HopTopology& topo, const HarqConfig& cfg,
                       const LinkParams& link, const ChannelParams& chan,
                       const AbateWhittConfig& aw, const ContourConfig& cc, int m_max) {
  topo.validate();
  cfg.validate();
  link.validate();
  chan.validate();
  if (cfg.k_max < topo.hops)
    throw std::invalid_argument("outage_multihop: requires k_max >= hops");
  HopTables t;
  const auto dists = topo.hop_distances(link.distance_m);
  for (int l = 0; l < topo.hops; ++l) {
    const double d = dists[static_cast<std::size_t>(l)];
    t.pn.push_back(non_blocking_prob(topo.hop_blockage(l), d));
    LinkParams hop_link = link;
    hop_link.distance_m = d;
    std::vector<double> p(static_cast<std::size_t>(m_max) + 1);
    p[0] = 1.0;  // zero rounds: certain failure
    for (int m = 1; m <= m_max; ++m)
      p[static_cast<std::size_t>(m)] = single_hop_outage(cfg, m, hop_link, chan, aw, cc);
    t.p_out.push_back(std::move(p));
  }
  return t;
}

// Success probability with total budget exactly j rounds consumed:
// sum over compositions (k_1..k_L), k_l >= 1, sum = j, of
// prod_l pn_l (p_l[k_l - 1] - p_l[k_l]).  Enumerated recursively; the
// term counts are tiny at desk scale (<= C(j-1, L-1)).
double success_mass_at(const HopTables& t, int hops, int j) {
  double total = 0.0;
  std::vector<int> k(static_cast<std::size_t>(hops));
  // Odometer over the first L-1 parts; the last part is the remainder.
  auto rec = [&](auto&& self, int level, int remaining) -> void {
    if (level == hops - 1) {
      k[static_cast<std::size_t>(level)] = remaining;
      double term = 1.0;
      for (int l = 0; l < hops; ++l) {
        const auto& p = t.p_out[static_cast<std::size_t>(l)];
        const int kl = k[static_cast<std::size_t>(l)];
        term *= t.pn[static_cast<std::size_t>(l)] *
                (p[static_cast<std::size_t>(kl - 1)] - p[static_cast<std::size_t>(kl)]);
      }
      total += term;
      return;
    }
    // Leave at least one round for each hop after this one.
    for (int v = 1; v <= remaining - (hops - 1 - level); ++v) {
      k[static_cast<std::size_t>(level)] = v;
      self(self, level + 1, remaining - v);
    }
  };
  rec(rec, 0, j);
  return total;
}

}  // namespace

double non_blocking_prob(const BlockageParams& b, double distance_m) {
  b.validate();
  if (!(distance_m > 0)) throw std::invalid_argument("non_blocking_prob: distance must be > 0");
  return std::exp(-b.beta() * distance_m);
}

double outage_single_hop_blockage(const HarqConfig& cfg, const LinkParams& link,
                                  const ChannelParams& chan, const BlockageParams& b,
                                  const AbateWhittConfig& aw, const ContourConfig& cc) {
  const double pn = non_blocking_prob(b, link.distance_m);
  const double p = single_hop_outage(cfg, cfg.k_max, link, chan, aw, cc);
  return (1.0 - pn) + pn * p;
}

std::vector<double> outage_multihop_profile(const HopTopology& topology,
                                            const HarqConfig& cfg, const LinkParams& link,
                                            const ChannelParams& chan,
                                            const AbateWhittConfig& aw,
                                            const ContourConfig& cc) {
  // No hop can use more rounds than the budget leaves after giving every
  // other hop one round.
  const HopTables t =
      build_tables(topology, cfg, link, chan, aw, cc, cfg.k_max - topology.hops + 1);
  std::vector<double> profile;
  double success = 0.0;
  for (int k = topology.hops; k <= cfg.k_max; ++k) {
    success += success_mass_at(t, topology.hops, k);
    double p = 1.0 - success;
    if (p < 0.0) p = 0.0;
    profile.push_back(p);
  }
  return profile;
}

double outage_multihop(const HopTopology& topology, const HarqConfig& cfg,
                       const LinkParams& link, const ChannelParams& chan,
                       const AbateWhittConfig& aw, const ContourConfig& cc) {
  return outage_multihop_profile(topology, cfg, link, chan, aw, cc).back();
}

double outage_multihop_first_failure(const HopTopology& topology, const HarqConfig& cfg,
                                     const LinkParams& link, const ChannelParams& chan,
                                     const AbateWhittConfig& aw, const ContourConfig& cc) {
  for (int l = 0; l < topology.hops; ++l)
    if (topology.hop_blockage(l).density_per_m2 != 0.0)
      throw std::invalid_argument(
          "outage_multihop_first_failure: defined for the blockage-free case");
  // The first failing hop may inherit the entire budget, so tables run to
  // k_max here (unlike the composition sum, where every hop gets >= 1).
  const HopTables t = build_tables(topology, cfg, link, chan, aw, cc, cfg.k_max);
  const int hops = topology.hops;
  const int k_budget = cfg.k_max;

  // chi_n = Pr{hops 1..n-1 decode, hop n does not decode with what is
  // left}; the failing hop may be left zero rounds.  Enumerate the exact
  // rounds used by the first n-1 hops.
  double outage = 0.0;
  for (int n = 0; n < hops; ++n) {
    std::vector<int> k(static_cast<std::size_t>(n));
    auto rec = [&](auto&& self, int level, int used) -> void {
      if (level == n) {
        double term = 1.0;
        for (int l = 0; l < n; ++l) {
          const auto& p = t.p_out[static_cast<std::size_t>(l)];
          const int kl = k[static_cast<std::size_t>(l)];
          term *= p[static_cast<std::size_t>(kl - 1)] - p[static_cast<std::size_t>(kl)];
        }
        const auto& pn_fail = t.p_out[static_cast<std::size_t>(n)];
        term *= pn_fail[static_cast<std::size_t>(k_budget - used)];
        outage += term;
        return;
      }
      for (int v = 1; v <= k_budget - used; ++v) {
        k[static_cast<std::size_t>(level)] = v;
        self(self, level + 1, used + v);
      }
    };
    rec(rec, 0, 0);
  }
  return outage;
}

double ltat(const HarqConfig& cfg, const std::vector<double>& outages) {
  cfg.validate();
  if (outages.size() != static_cast<std::size_t>(cfg.k_max))
    throw std::invalid_argument("ltat: need one outage value per round");
  for (std::size_t i = 0; i < outages.size(); ++i) {
    if (!(outages[i] >= 0.0 && outages[i] <= 1.0))
      throw std::invalid_argument("ltat: outage values must lie in [0, 1]");
    if (i > 0 && outages[i] > outages[i - 1] + 1e-12)
      throw std::invalid_argument("ltat: outage must be non-increasing in the round index");
  }
  double denom = 1.0;
  for (std::size_t k = 0; k + 1 < outages.size(); ++k) denom += outages[k];
  return cfg.rate_bps_hz * (1.0 - outages.back()) / denom;
}

double ltat_multihop(const HopTopology& topology, const HarqConfig& cfg,
                     const std::vector<double>& outages) {
  topology.validate();
  cfg.validate();
  const std::size_t expect = static_cast<std::size_t>(cfg.k_max - topology.hops + 1);
  if (cfg.k_max < topology.hops || outages.size() != expect)
    throw std::invalid_argument("ltat_multihop: need outages for k = hops..k_max");
  for (std::size_t i = 0; i < outages.size(); ++i) {
    if (!(outages[i] >= 0.0 && outages[i] <= 1.0))
      throw std::invalid_argument("ltat_multihop: outage values must lie in [0, 1]");
    if (i > 0 && outages[i] > outages[i - 1] + 1e-12)
      throw std::invalid_argument("ltat_multihop: outage must be non-increasing");
  }
  double denom = static_cast<double>(topology.hops);
  for (std::size_t k = 0; k + 1 < outages.size(); ++k) denom += outages[k];
  return cfg.rate_bps_hz * (1.0 - outages.back()) / denom;
}

double multihop_outage_floor(const HopTopology& topology, const LinkParams& link) {
  topology.validate();
  link.validate();
  double prod = 1.0;
  const auto dists = topology.hop_distances(link.distance_m);
  for (int l = 0; l < topology.hops; ++l)
    prod *= non_blocking_prob(topology.hop_blockage(l), dists[static_cast<std::size_t>(l)]);
  return 1.0 - prod;
}

double multihop_ltat_bound(const HopTopology& topology, const HarqConfig& cfg,
                           const LinkParams& link) {
  cfg.validate();
  const double prod = 1.0 - multihop_outage_floor(topology, link);
  const double k = static_cast<double>(cfg.k_max);
  const double l = static_cast<double>(topology.hops);
  return cfg.rate_bps_hz * prod / (k * (1.0 - prod) + l * prod);
}

}  // namespace thzharq
