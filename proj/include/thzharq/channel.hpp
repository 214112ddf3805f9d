// SPDX-License-Identifier: Apache-2.0
//
// Terahertz link-level channel model: deterministic line-of-sight path
// gain, beam pointing-error geometry, and the composite amplitude
// distribution  X = h_p * h_f  combining alpha-mu small-scale fading with
// misalignment loss.
#pragma once

#include "thzharq/params.hpp"
#include "thzharq/rng.hpp"

namespace thzharq {

// Amplitude path gain |h_l| including antenna gains and molecular
// absorption over the given distance.
double path_gain(const LinkParams& link, double distance_m);
inline double path_gain(const LinkParams& link) { return path_gain(link, link.distance_m); }

// Geometry-derived pointing quantities: zeta, the collected-power fraction
// S0 at zero offset, the equivalent beam width w_e, and the misalignment
// exponent phi = w_e^2 / (4 sigma_s^2).
PointingDerived pointing_derived(const ChannelParams& ch);

// Density and distribution function of the composite amplitude X.
double composite_pdf(double x, const ChannelParams& ch);
double composite_cdf(double x, const ChannelParams& ch);

// Draw one composite amplitude: h_f^alpha is Gamma(mu) scaled to mean
// hhat_f^alpha, h_p = S0 * U^(1/phi).
double sample_composite(const ChannelParams& ch, CounterRng& rng);

// n i.i.d. draws, deterministic in seed and independent of the caller's
// other streams.
std::vector<double> sample_composite(const ChannelParams& ch, std::size_t n,
                                     std::uint64_t seed);

}  // namespace thzharq
