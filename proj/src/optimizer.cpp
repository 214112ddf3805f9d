// SPDX-License-Identifier: Apache-2.0
#include "thzharq/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/outage.hpp"

namespace thzharq {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio

// Golden-section maximization of a unimodal-ish scalar function on [a, b].
// Returns the abscissa; also reports the value through *val if non-null.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-10, double* val = nullptr) {
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  if (val) *val = f(mid);
  return mid;
}

HarqConfig truncated(const HarqConfig& base, int k, double rate) {
  HarqConfig c = base;
  c.k_max = k;
  c.rate_bps_hz = rate;
  if (!base.power_factors.empty())
    c.power_factors.assign(base.power_factors.begin(), base.power_factors.begin() + k);
  return c;
}

// Shrink the upper rate bound to the largest R with p(R) <= eps, assuming p
// is increasing in R.  p(lo) <= eps is the caller's responsibility.
double feasible_hi(const std::function<double(double)>& p, double lo, double hi,
                   double eps) {
  if (p(hi) <= eps) return hi;
  double a = lo, b = hi;
  for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
    const double m = 0.5 * (a + b);
    (p(m) <= eps ? a : b) = m;
  }
  return a;
}

struct Objective {
  std::function<double(int, double)> outage_k;  // p_k(R) for budget k
  int k_max;

  double operator()(double rate) const {
    const double pk = std::min(1.0, outage_k(k_max, rate));
    double denom = 1.0;
    for (int k = 1; k < k_max; ++k) denom += std::min(1.0, outage_k(k, rate));
    return rate * (1.0 - pk) / denom;
  }
};

}  // namespace

RateResult optimal_rate_asymptotic(const RateProblem& p, const LinkParams& link,
                                   const ChannelParams& chan) {
  p.validate();
  link.validate();
  chan.validate();

  auto outage_k = [&](int k, double rate) {
    return outage_asymptotic(truncated(p.cfg, k, rate), link, chan).outage;
  };
  Objective obj{outage_k, p.cfg.k_max};
  auto constraint = [&](double rate) { return outage_k(p.cfg.k_max, rate); };

  if (constraint(p.rate_lo) > p.epsilon)
    throw InfeasibleError("outage ceiling unattainable even at the lowest rate");
  const double hi = feasible_hi(constraint, p.rate_lo, p.rate_hi, p.epsilon);

  RateResult res;
  auto counted_obj = [&](double rate) {
    ++res.evaluations;
    return obj(rate);
  };
  // Dinkelbach: lambda_{t+1} = N(R*_t)/D(R*_t) with R*_t maximizing
  // N(R) - lambda_t * D(R); monotone non-decreasing from a feasible start.
  double lambda = counted_obj(p.rate_lo);
  res.lambda_trace.push_back(lambda);
  double best_rate = p.rate_lo;
  bool converged = false;
  for (int it = 1; it <= 50; ++it) {
    auto sub = [&](double rate) {
      ++res.evaluations;
      const double pk = std::min(1.0, outage_k(p.cfg.k_max, rate));
      double denom = 1.0;
      for (int k = 1; k < p.cfg.k_max; ++k)
        denom += std::min(1.0, outage_k(k, rate));
      return rate * (1.0 - pk) - lambda * denom;
    };
    best_rate = golden_max(sub, p.rate_lo, hi, 1e-11);
    const double next = counted_obj(best_rate);
    res.iterations = it;
    res.lambda_trace.push_back(next);
    if (std::abs(next - lambda) <= 1e-8) {
      lambda = next;
      converged = true;
      break;
    }
    lambda = next;
  }
  if (!converged)
    throw ConvergenceError("Dinkelbach iteration did not settle within 50 steps");
  res.rate = best_rate;
  res.ltat = lambda;
  return res;
}

RateResult optimal_rate_surrogate(const RateProblem& p, const SurrogateModel& model,
                                  const LinkParams& link, const ChannelParams& chan) {
  p.validate();
  link.validate();
  chan.validate();

  const double hl = path_gain(link);
  RateResult res;

  // Exact single-round outage; K = 1 sits outside the surrogate's inputs.
  auto outage_one = [&](double rate) {
    const double rho1 = p.cfg.power_factor(0) * p.cfg.snr_ref() / link.noise_power_w;
    const double x = std::sqrt((std::exp2(rate) - 1.0) / (rho1 * hl * hl));
    return composite_cdf(x, chan);
  };
  auto outage_k = [&](int k, double rate) {
    if (k == 1) return outage_one(rate);
    bool extra = false;
    const double v = predict_outage(model, p.cfg.snr_ref_db, rate,
                                    static_cast<double>(k), chan.beam_waist_m, &extra);
    if (extra) res.extrapolated = true;
    return v;
  };
  Objective obj{outage_k, p.cfg.k_max};
  auto counted = [&](double rate) {
    ++res.evaluations;
    return obj(rate);
  };
  auto constraint = [&](double rate) { return outage_k(p.cfg.k_max, rate); };

  // Dense grid with the constraint applied pointwise (the MLP response need
  // not be monotone in rate), then golden refinement around the incumbent.
  constexpr int kGrid = 512;
  double best_rate = -1.0, best_val = -std::numeric_limits<double>::infinity();
  int best_idx = -1;
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    grid[static_cast<std::size_t>(i)] =
        p.rate_lo + (p.rate_hi - p.rate_lo) * i / (kGrid - 1);
    const double r = grid[static_cast<std::size_t>(i)];
    if (constraint(r) > p.epsilon) continue;
    const double v = counted(r);
    if (v > best_val + 1e-15) {  // strict: ties keep the smaller rate
      best_val = v;
      best_rate = r;
      best_idx = i;
    }
  }
  if (best_idx < 0)
    throw InfeasibleError("no rate in the search interval meets the outage ceiling");

  const double lo = grid[static_cast<std::size_t>(std::max(0, best_idx - 1))];
  const double hi = grid[static_cast<std::size_t>(std::min(kGrid - 1, best_idx + 1))];
  double refined_val = 0.0;
  const double refined = golden_max([&](double r) { return counted(r); }, lo, hi,
                                    1e-10, &refined_val);
  if (constraint(refined) <= p.epsilon + 1e-12 && refined_val > best_val + 1e-15) {
    best_rate = refined;
    best_val = refined_val;
  } else if (constraint(refined) <= p.epsilon + 1e-12 &&
             std::abs(refined_val - best_val) <= 1e-9 && refined < best_rate) {
    best_rate = refined;  // tie-break toward the smaller rate
  }
  res.rate = best_rate;
  res.ltat = best_val;
  return res;
}

}  // namespace thzharq
