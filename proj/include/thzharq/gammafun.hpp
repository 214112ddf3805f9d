// SPDX-License-Identifier: Apache-2.0
//
// Gamma-family special functions needed by the channel model and the
// contour-integral kernels: complex log-gamma (Lanczos approximation with
// reflection), and the upper incomplete gamma function for real order of
// either sign.
#pragma once

#include <complex>

namespace thzharq {

// Principal-branch log of Gamma(z) for complex z.  Throws
// std::domain_error at the poles (non-positive real integers).  Branch
// offsets are consistent under conjugation, which is all the contour code
// relies on.
std::complex<double> ln_gamma_complex(std::complex<double> z);

// Real log-gamma, x > 0 required.
double ln_gamma(double x);

// Real gamma function; throws std::domain_error at non-positive integers.
double gamma_fn(double x);

// Upper incomplete gamma Gamma(a, x) for real a of either sign and x >= 0
// (x > 0 required when a <= 0).  Uses a lower-series / continued-fraction
// split for a > 0 and a stable downward recurrence, seeded by an expansion
// regular at a = 0, for a <= 0.
double upper_incomplete_gamma(double a, double x);

}  // namespace thzharq
