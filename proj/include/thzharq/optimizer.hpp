// SPDX-License-Identifier: Apache-2.0
//
// Optimal-rate selection: maximize long-term average throughput
//   T(R) = R (1 - p_K(R)) / (1 + sum_{k=1}^{K-1} p_k(R))
// subject to an outage ceiling p_K(R) <= epsilon, over a scalar rate
// interval.  Two outage models are supported: the high-SNR closed form
// (solved by Dinkelbach fractional programming with a golden-section
// inner maximizer) and the trained surrogate (dense grid plus local
// golden refinement).
#pragma once

#include "thzharq/params.hpp"
#include "thzharq/surrogate.hpp"

namespace thzharq {

enum class RateMethod { Asymptotic, Surrogate };

struct RateProblem {
  HarqConfig cfg;            // rate_bps_hz is the decision variable
  double epsilon = 1e-3;     // outage ceiling, in (0, 1)
  double rate_lo = 0.1;      // bps/Hz
  double rate_hi = 5.0;      // bps/Hz
  RateMethod method = RateMethod::Asymptotic;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw std::invalid_argument("epsilon must be in (0, 1)");
    if (!(rate_lo > 0.0 && rate_lo < rate_hi))
      throw std::invalid_argument("require 0 < rate_lo < rate_hi");
    cfg.validate();
  }
};

struct RateResult {
  double rate = 0.0;
  double ltat = 0.0;
  int iterations = 0;    // Dinkelbach outer iterations (asymptotic method)
  int evaluations = 0;   // objective / subproblem evaluations
  bool extrapolated = false;  // any surrogate query left the training box
  std::vector<double> lambda_trace;  // Dinkelbach auxiliary sequence
};

// Dinkelbach fractional programming on the high-SNR outage closed form.
// Throws InfeasibleError when p_K(rate_lo) > epsilon and ConvergenceError
// when the auxiliary sequence has not settled after 50 iterations.
RateResult optimal_rate_asymptotic(const RateProblem& p, const LinkParams& link,
                                   const ChannelParams& chan);

// Same objective evaluated through the trained surrogate (k = 1 terms use
// the exact single-round outage, which is outside the model's input range).
RateResult optimal_rate_surrogate(const RateProblem& p, const SurrogateModel& model,
                                  const LinkParams& link, const ChannelParams& chan);

}  // namespace thzharq
