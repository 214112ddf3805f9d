// SPDX-License-Identifier: Apache-2.0
//
// Mellin-Barnes evaluators for the two contour integrals at the heart of
// the outage analysis: the per-round moment kernel
//   Phi(t, rho) = E[(1 + rho |h_l|^2 X^2)^t]
// with X the composite fading-pointing amplitude, and the coding-gain
// factor G_K(x) used by the high-SNR expansion of the incremental
// redundancy scheme.
#pragma once

#include <complex>

#include "thzharq/params.hpp"

namespace thzharq {

// Moment kernel for one HARQ round at transmit SNR rho_k (linear).  Valid
// for real(t) < 0; t = 0 returns 1 exactly.  Evaluated as a vertical-line
// Mellin-Barnes integral with abscissa inside (0, min{phi, alpha mu,
// -2 real(t)}).  Throws std::invalid_argument if the strip is empty and
// ConvergenceError if node doubling stalls.
std::complex<double> fox_h_kernel(std::complex<double> t, double rho_k,
                                  const LinkParams& link, const ChannelParams& chan,
                                  const ContourConfig& cfg = {});

// G_K(x) = Gamma(delta+1)^K * (1/2 pi i) Int x^(-t) (-t)^(-1)
//          (Gamma(-t-delta)/Gamma(-t))^K dt over a left contour.
// Increasing and convex in x; G_1(x) = (x-1)^delta.  Requires x > 1.
double meijer_g_asymptotic(int k_rounds, double delta, double x,
                           const ContourConfig& cfg = {});

}  // namespace thzharq
