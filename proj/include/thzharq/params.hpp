// SPDX-License-Identifier: Apache-2.0
//
// Parameter structs shared by every layer of the toolkit: radio-link
// constants, the composite fading/pointing channel description, HARQ
// round configuration, blockage geometry, and the numeric knobs of the
// contour quadrature and the Euler-accelerated Laplace inversion.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace thzharq {

// Thrown when a computation fails to reach its requested tolerance
// (contour quadrature node cap, Euler-sum stagnation, ...).  The CLI maps
// this to its "numerical non-convergence" exit code.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an optimization problem has an empty feasible set.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic radio-link constants of one hop.  The antenna gains are
// given in dBi; the molecular-absorption coefficient is a plain input in
// 1/m (default 0 = absorption ignored) so measured values for a given
// (frequency, temperature, humidity, pressure) operating point can be
// supplied directly.
struct LinkParams {
  double frequency_hz = 275e9;
  double distance_m = 20.0;
  double gain_tx_dbi = 55.0;
  double gain_rx_dbi = 55.0;
  double absorption_coeff_per_m = 0.0;
  double noise_power_w = 1.0;

  void validate() const {
    if (!(frequency_hz > 0)) throw std::invalid_argument("frequency_hz must be > 0");
    if (!(distance_m > 0)) throw std::invalid_argument("distance_m must be > 0");
    if (!(absorption_coeff_per_m >= 0))
      throw std::invalid_argument("absorption_coeff_per_m must be >= 0");
    if (!(noise_power_w > 0)) throw std::invalid_argument("noise_power_w must be > 0");
  }
};

// alpha-mu small-scale fading combined with a misalignment (pointing-error)
// gain.  hhat_f is the alpha-root mean value of the fading envelope,
// i.e. E[|h_f|^alpha] = hhat_f^alpha.  The pointing geometry is described
// by the receive-aperture radius, the beam waist at the receiver plane and
// the radial jitter standard deviation.
struct ChannelParams {
  double alpha = 2.0;
  double mu = 1.0;
  double hhat_f = 1.0;
  double antenna_radius_m = 1.0;
  double beam_waist_m = 1.0;
  double jitter_sigma = 1.0;

  void validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
    if (!(mu > 0)) throw std::invalid_argument("mu must be > 0");
    if (!(hhat_f > 0)) throw std::invalid_argument("hhat_f must be > 0");
    if (!(antenna_radius_m > 0)) throw std::invalid_argument("antenna_radius_m must be > 0");
    if (!(beam_waist_m > 0)) throw std::invalid_argument("beam_waist_m must be > 0");
    if (!(jitter_sigma > 0)) throw std::invalid_argument("jitter_sigma must be > 0");
  }
};

// Quantities derived from the pointing geometry.  s0 is the fraction of
// optical/RF power collected under perfect alignment, w_e the equivalent
// beam width and phi = w_e^2 / (4 sigma_s^2) the severity exponent of the
// misalignment gain distribution (small phi = severe jitter).
struct PointingDerived {
  double zeta = 0.0;
  double s0 = 0.0;
  double w_e = 0.0;
  double phi = 0.0;
};

enum class HarqScheme { TypeI, ChaseCombining, IncrementalRedundancy };

inline const char* to_string(HarqScheme s) {
  switch (s) {
    case HarqScheme::TypeI: return "TypeI";
    case HarqScheme::ChaseCombining: return "CC";
    case HarqScheme::IncrementalRedundancy: return "IR";
  }
  return "?";
}

// HARQ round configuration.  snr_ref_db is the reference transmit SNR
// (P_ref / N0 in dB); round k transmits with SNR q_k * ref where q_k comes
// from power_factors (empty = all ones).  rate_bps_hz is the initial code
// rate R in bits/s/Hz; a message is delivered once the accumulated mutual
// information of the active scheme reaches R.
struct HarqConfig {
  HarqScheme scheme = HarqScheme::IncrementalRedundancy;
  int k_max = 3;
  double rate_bps_hz = 2.0;
  double snr_ref_db = 0.0;
  std::vector<double> power_factors;

  double power_factor(int k) const {  // k is 0-based round index
    if (power_factors.empty()) return 1.0;
    return power_factors.at(static_cast<std::size_t>(k));
  }

  double snr_ref() const { return std::pow(10.0, snr_ref_db / 10.0); }

  void validate() const {
    if (k_max < 1 || k_max > 64) throw std::invalid_argument("k_max must be in [1, 64]");
    if (!(rate_bps_hz >= 0)) throw std::invalid_argument("rate_bps_hz must be >= 0");
    if (!power_factors.empty() && power_factors.size() != static_cast<std::size_t>(k_max))
      throw std::invalid_argument("power_factors must be empty or have k_max entries");
    for (double q : power_factors)
      if (!(q > 0)) throw std::invalid_argument("power_factors must be > 0");
  }
};

// Cylindrical-blocker field between transmitter and receiver.  A hop of
// length d is unblocked with probability exp(-beta d) where
// beta = 2 lambda_b r_b (h_b - h_u) / (h_a - h_u).
struct BlockageParams {
  double density_per_m2 = 0.0;     // lambda_b, blockers per m^2
  double body_radius_m = 0.25;  // r_b
  double body_height_m = 1.7;   // h_b
  double bs_height_m = 10.0;  // h_a
  double user_height_m = 1.0;      // h_u

  double beta() const {
    return 2.0 * density_per_m2 * body_radius_m * (body_height_m - user_height_m) /
           (bs_height_m - user_height_m);
  }

  void validate() const {
    if (!(density_per_m2 >= 0)) throw std::invalid_argument("density_per_m2 must be >= 0");
    if (!(body_radius_m > 0)) throw std::invalid_argument("body_radius_m must be > 0");
    if (!(bs_height_m > body_height_m && body_height_m > user_height_m))
      throw std::invalid_argument("heights must satisfy bs > body > user");
  }
};

// Relay chain description.  distances_m may be empty (total link distance
// split equally across hops) or contain one entry per hop.  blockage holds
// either a single entry shared by all hops or one entry per hop.
struct HopTopology {
  int hops = 1;
  std::vector<double> distances_m;
  std::vector<BlockageParams> blockage{BlockageParams{}};

  const BlockageParams& hop_blockage(int l) const {  // l is 0-based
    if (blockage.size() == 1) return blockage.front();
    return blockage.at(static_cast<std::size_t>(l));
  }

  std::vector<double> hop_distances(double total_distance_m) const {
    if (!distances_m.empty()) return distances_m;
    return std::vector<double>(static_cast<std::size_t>(hops), total_distance_m / hops);
  }

  void validate() const {
    if (hops < 1 || hops > 16) throw std::invalid_argument("hops must be in [1, 16]");
    if (!distances_m.empty() && distances_m.size() != static_cast<std::size_t>(hops))
      throw std::invalid_argument("distances_m must be empty or have one entry per hop");
    for (double d : distances_m)
      if (!(d > 0)) throw std::invalid_argument("hop distances must be > 0");
    if (blockage.size() != 1 && blockage.size() != static_cast<std::size_t>(hops))
      throw std::invalid_argument("blockage must have one entry or one entry per hop");
    for (const auto& b : blockage) b.validate();
  }
};

// Knobs of the Mellin-Barnes contour quadrature.  truncation_height is the
// half-height at which the vertical contour is cut; panels of Gauss-Legendre
// nodes are doubled until successive estimates agree to rel_tol (plus an
// absolute floor abs_tol) or max_nodes is exceeded.  c1_margin positions the
// outer contour apex at -min(phi, mu*alpha)/2 - c1_margin; c2_fraction
// places the inner abscissa at that fraction of its admissible strip.
struct ContourConfig {
  double truncation_height = 40.0;
  double rel_tol = 1e-11;
  double abs_tol = 0.0;
  int max_nodes = 1 << 16;
  double c1_margin = 0.25;
  double c2_fraction = 0.5;

  void validate() const {
    if (!(truncation_height > 0)) throw std::invalid_argument("truncation_height must be > 0");
    if (!(rel_tol > 0)) throw std::invalid_argument("rel_tol must be > 0");
    if (!(abs_tol >= 0)) throw std::invalid_argument("abs_tol must be >= 0");
    if (max_nodes < 64) throw std::invalid_argument("max_nodes must be >= 64");
    if (!(c1_margin > 0)) throw std::invalid_argument("c1_margin must be > 0");
    if (!(c2_fraction > 0 && c2_fraction < 1))
      throw std::invalid_argument("c2_fraction must be in (0, 1)");
  }
};

// Euler-accelerated Bromwich inversion parameters (Abate & Whitt).  The
// discretization error is bounded by e^-a / (1 - e^-a); m is the order of
// the binomial (Euler) average and q the base number of alternating terms.
struct AbateWhittConfig {
  double a = 18.0;
  int m = 11;
  int q = 15;

  void validate() const {
    if (!(a > 0)) throw std::invalid_argument("abate-whitt a must be > 0");
    if (m < 1 || q < 1) throw std::invalid_argument("abate-whitt m, q must be >= 1");
    if (m + q > 500) throw std::invalid_argument("abate-whitt m + q too large");
  }
};

// Point estimate produced by a Monte-Carlo routine.  std_error is the
// binomial standard error sqrt(p(1-p)/n) for probabilities and a
// delta-method ratio standard error for throughput estimates.
struct SimResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

}  // namespace thzharq
