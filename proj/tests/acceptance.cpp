// SPDX-License-Identifier: Apache-2.0
//
// Release gate for the toolkit: one self-contained check per contract item,
// each printed as a single PASS/FAIL line.  Items marked "conditional"
// (external anchor values whose exact operating point is underdetermined)
// are reported but do not affect the exit status.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thzharq/channel.hpp"
#include "thzharq/montecarlo.hpp"
#include "thzharq/multihop.hpp"
#include "thzharq/optimizer.hpp"
#include "thzharq/outage.hpp"
#include "thzharq/quadrature.hpp"
#include "thzharq/surrogate.hpp"

using namespace thzharq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LinkParams ref_link() { return LinkParams{}; }

ChannelParams ref_chan(double w) {
  ChannelParams c;
  c.beam_waist_m = w;
  return c;
}

HarqConfig harq_ir(int k, double rate, double snr_db) {
  HarqConfig c;
  c.scheme = HarqScheme::IncrementalRedundancy;
  c.k_max = k;
  c.rate_bps_hz = rate;
  c.snr_ref_db = snr_db;
  return c;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Closed-form single-round outage.
double single_round(const HarqConfig& cfg, const LinkParams& link, const ChannelParams& ch) {
  const double hl = path_gain(link);
  const double rho = cfg.power_factor(0) * cfg.snr_ref();
  return composite_cdf(std::sqrt((std::exp2(cfg.rate_bps_hz) - 1.0) / (rho * hl * hl)), ch);
}

// SNR (dB) at which the single-round outage equals `target`.
double snr_for_outage(double target, double rate, const ChannelParams& ch) {
  double lo = -40.0, hi = 260.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (single_round(harq_ir(1, rate, mid), ref_link(), ch) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Independent oracle for the accumulated-information outage: nested adaptive
// quadrature of Pr{ prod_k (1 + rho_k |h_l|^2 x_k^2) < 2^R } over the
// composite density (k_max 2 or 3).
double ir_outage_by_quadrature(const HarqConfig& cfg, const LinkParams& link,
                               const ChannelParams& ch) {
  const double hl = path_gain(link);
  const double snr = cfg.snr_ref();
  std::vector<double> g(static_cast<std::size_t>(cfg.k_max));
  for (int k = 0; k < cfg.k_max; ++k)
    g[static_cast<std::size_t>(k)] = cfg.power_factor(k) * snr * hl * hl;
  const double cap = std::exp2(cfg.rate_bps_hz);

  if (cfg.k_max == 2) {
    const double x1_max = std::sqrt((cap - 1.0) / g[0]);
    return quad::tanh_sinh(
        [&](double x1) {
          const double rem = cap / (1.0 + g[0] * x1 * x1) - 1.0;
          return composite_pdf(x1, ch) * composite_cdf(std::sqrt(rem / g[1]), ch);
        },
        0.0, x1_max, 1e-10);
  }
  const double x1_max = std::sqrt((cap - 1.0) / g[0]);
  return quad::tanh_sinh(
      [&](double x1) {
        const double cap1 = cap / (1.0 + g[0] * x1 * x1);
        const double x2_max = std::sqrt((cap1 - 1.0) / g[1]);
        const double inner = quad::tanh_sinh(
            [&](double x2) {
              const double rem = cap1 / (1.0 + g[1] * x2 * x2) - 1.0;
              return composite_pdf(x2, ch) * composite_cdf(std::sqrt(rem / g[2]), ch);
            },
            0.0, x2_max, 1e-11);
        return composite_pdf(x1, ch) * inner;
      },
      0.0, x1_max, 1e-10);
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.str().empty()) detail << "; ";
      detail << what;
    }
  }
  void info(const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what;
  }
};

std::optional<SurrogateModel> g_model;       // produced by item 8, reused by item 9
std::optional<SurrogateModel> g_elu_model;   // bounded-output variant, informational

// ---------------------------------------------------------------------------

Check c1_single_round_exactness() {
  Check c;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double w : {1.0, 3.0}) {
    const ChannelParams ch = ref_chan(w);
    for (int i = 0; i < 20; ++i) {
      const double target = 0.9 * std::pow(1e-6 / 0.9, i / 19.0);
      const double snr = snr_for_outage(target, 2.0, ch);
      const HarqConfig cfg = harq_ir(1, 2.0, snr);
      const double closed = single_round(cfg, ref_link(), ch);
      const double exact = outage_exact_ir(cfg, ref_link(), ch);
      worst = std::max(worst, std::abs(exact - closed));
    }
  }
  const double dt = seconds_since(t0);
  c.require(worst <= 1e-6, "max abs err " + fmt(worst));
  c.require(dt < 30.0, "runtime " + fmt(dt) + " s");
  c.info("max abs err " + fmt(worst) + ", " + fmt(dt) + " s");
  return c;
}

Check c2_oracle_equivalence() {
  Check c;
  const auto t0 = Clock::now();
  struct Pt {
    int k;
    double snr, rate, w;
  };
  const Pt pts[] = {{2, 4.0, 2.0, 3.0},  {2, 10.0, 2.0, 3.0}, {2, 8.0, 3.0, 1.0},
                    {2, 0.0, 1.0, 3.0},  {2, 12.0, 2.0, 1.0}, {3, 6.0, 2.0, 3.0},
                    {3, 12.0, 2.0, 3.0}, {3, 10.0, 3.0, 1.0}, {3, 4.0, 1.5, 3.0},
                    {3, 14.0, 2.0, 1.0}};
  double worst = 0.0;
  for (const Pt& p : pts) {
    const HarqConfig cfg = harq_ir(p.k, p.rate, p.snr);
    const ChannelParams ch = ref_chan(p.w);
    const double oracle = ir_outage_by_quadrature(cfg, ref_link(), ch);
    const double exact = outage_exact_ir(cfg, ref_link(), ch);
    if (oracle <= 1e-6) continue;
    worst = std::max(worst, std::abs(exact - oracle) / oracle);
  }
  const double dt = seconds_since(t0);
  c.require(worst <= 1e-4, "max rel err " + fmt(worst));
  c.require(dt < 300.0, "runtime " + fmt(dt) + " s");
  c.info("max rel err " + fmt(worst) + ", " + fmt(dt) + " s");
  return c;
}

Check c3_monte_carlo_agreement() {
  Check c;
  const auto t0 = Clock::now();
  double worst_sigma = 0.0;
  for (int k : {2, 3, 4}) {
    for (double snr : {0.0, 6.0, 12.0, 18.0, 24.0}) {
      const HarqConfig cfg = harq_ir(k, 2.0, snr);
      const double exact = outage_exact_ir(cfg, ref_link(), ref_chan(3.0));
      const auto sim = simulate_outage(cfg, ref_link(), ref_chan(3.0), 1000000,
                                       1000 + k * 100 + static_cast<int>(snr));
      const double nsig = std::abs(sim.estimate - exact) / sim.std_error;
      worst_sigma = std::max(worst_sigma, nsig);
    }
  }
  const double dt = seconds_since(t0);
  c.require(worst_sigma <= 3.5, "worst deviation " + fmt(worst_sigma) + " sigma");
  c.require(dt < 120.0, "runtime " + fmt(dt) + " s");
  c.info("worst " + fmt(worst_sigma) + " sigma, " + fmt(dt) + " s");
  return c;
}

Check c4_asymptote_convergence() {
  Check c;
  AbateWhittConfig aw;
  aw.a = 30.0;
  struct Pt {
    double w;
    int k;
    double snr;
  };
  // One batch per sign regime of mu*alpha - phi: w = 1 (pointing-limited)
  // and w = 6 (fading-limited with a subleading exponent gap of ~1, unlike
  // w = 3 whose ~0.27 gap defers 10% agreement to outages below 1e-15).
  const Pt pts[] = {{1.0, 3, 48.0}, {1.0, 3, 54.0}, {1.0, 2, 60.0}, {6.0, 3, 40.0}, {6.0, 2, 46.0}};
  double lo = 1.0, hi = 1.0;
  for (const Pt& p : pts) {
    const HarqConfig cfg = harq_ir(p.k, 2.0, p.snr);
    const ChannelParams ch = ref_chan(p.w);
    const double exact = outage_exact_ir(cfg, ref_link(), ch, aw);
    c.require(exact < 1e-4, "point not deep enough: exact " + fmt(exact));
    const double ratio = outage_asymptotic(cfg, ref_link(), ch).outage / exact;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  c.require(lo >= 0.9 && hi <= 1.1, "ratio range [" + fmt(lo) + ", " + fmt(hi) + "]");
  c.info("ratio range [" + fmt(lo) + ", " + fmt(hi) + "]");
  return c;
}

Check c5_diversity_slope() {
  Check c;
  AbateWhittConfig aw;
  aw.a = 30.0;
  const ChannelParams ch = ref_chan(3.0);  // min{phi, alpha mu}/2 = 1
  // 44..54 dB: deep enough that the snr^-0.27 subleading term perturbs the
  // fitted slope by ~2.6% (within the 5% budget) while the smaller outage
  // (~1e-11) stays two decades above the inversion's discretization floor.
  const double l10 = std::log(10.0);
  for (int k : {2, 3}) {
    const double p1 = outage_exact_ir(harq_ir(k, 2.0, 44.0), ref_link(), ch, aw);
    const double p2 = outage_exact_ir(harq_ir(k, 2.0, 54.0), ref_link(), ch, aw);
    const double slope = (std::log(p2) - std::log(p1)) / l10;  // per decade of snr
    const double want = -static_cast<double>(k);
    c.require(std::abs(slope / want - 1.0) <= 0.05,
              "k=" + std::to_string(k) + " slope " + fmt(slope));
    c.info("k=" + std::to_string(k) + " slope " + fmt(slope));
  }
  HopTopology topo;
  topo.hops = 2;
  topo.blockage.front().density_per_m2 = 0.0;
  const double m1 = outage_multihop(topo, harq_ir(3, 2.0, 44.0), ref_link(), ch, aw);
  const double m2 = outage_multihop(topo, harq_ir(3, 2.0, 54.0), ref_link(), ch, aw);
  const double mslope = (std::log(m2) - std::log(m1)) / l10;
  c.require(std::abs(mslope / -2.0 - 1.0) <= 0.05, "two-hop slope " + fmt(mslope));
  c.info("two-hop slope " + fmt(mslope));
  return c;
}

Check c6_scheme_ordering() {
  Check c;
  const HarqConfig cfg = harq_ir(3, 2.0, 10.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto cmp = simulate_all_schemes(cfg, ref_link(), ref_chan(3.0), 10000, seed);
    c.require(cmp.type1.estimate >= cmp.cc.estimate && cmp.cc.estimate >= cmp.ir.estimate,
              "ordering violated at seed " + std::to_string(seed));
  }
  c.info("20-seed shared-draw battery ordered");
  return c;
}

Check c7_multihop_limits() {
  Check c;
  HopTopology topo;
  topo.hops = 2;
  topo.blockage.front().density_per_m2 = 0.01;
  const HarqConfig cfg = harq_ir(3, 2.0, 60.0);
  const ChannelParams ch = ref_chan(3.0);
  const double out = outage_multihop(topo, cfg, ref_link(), ch);
  const double floor = multihop_outage_floor(topo, ref_link());
  c.require(std::abs(out - floor) <= 1e-3,
            "outage " + fmt(out) + " vs floor " + fmt(floor));
  const auto prof = outage_multihop_profile(topo, cfg, ref_link(), ch);
  const double thr = ltat_multihop(topo, cfg, prof);
  const double bound = multihop_ltat_bound(topo, cfg, ref_link());
  c.require(std::abs(thr - bound) <= 1e-3,
            "throughput " + fmt(thr) + " vs ceiling " + fmt(bound));

  HopTopology clear = topo;
  clear.blockage.front().density_per_m2 = 0.0;
  for (int k : {3, 4}) {
    const HarqConfig ck = harq_ir(k, 2.0, 14.0);
    const double a = outage_multihop(clear, ck, ref_link(), ch);
    const double b = outage_multihop_first_failure(clear, ck, ref_link(), ch);
    c.require(std::abs(a - b) <= 1e-10,
              "decomposition mismatch " + fmt(std::abs(a - b)) + " at k=" + std::to_string(k));
  }
  c.info("floor gap " + fmt(std::abs(out - floor)) + ", ceiling gap " +
         fmt(std::abs(thr - bound)));
  return c;
}

Check c8_surrogate_quality() {
  Check c;
  const auto t0 = Clock::now();
  DatasetConfig dc;  // defaults: n=12500, upsilon=1e-4, sim_trials=1e5, seed=1
  const Dataset ds = generate_dataset(dc);
  const double t_data = seconds_since(t0);

  TrainConfig tc;  // defaults: identity output head
  SurrogateModel m = train(ds, tc);
  const double train_mse = evaluate_mse(m, ds.subset(SampleSplit::Train));
  const double val_mse = evaluate_mse(m, ds.subset(SampleSplit::Validation));
  const double test_mse = evaluate_mse(m, ds.subset(SampleSplit::Test));
  const double dt = seconds_since(t0);

  c.require(test_mse <= 0.05, "test mse " + fmt(test_mse));
  const double lo = std::min({train_mse, val_mse, test_mse});
  const double hi = std::max({train_mse, val_mse, test_mse});
  c.require(hi <= 2.0 * lo, "mse spread " + fmt(lo) + ".." + fmt(hi));
  c.require(dt < 900.0, "runtime " + fmt(dt) + " s");
  g_model = std::move(m);

  // Informational: the bounded (ELU) output head cannot reach targets below
  // -1, which covers every outage above ~0.71; its mse is reported here for
  // the record but does not gate.
  TrainConfig te = tc;
  te.output_activation = "elu";
  SurrogateModel me = train(ds, te);
  const double elu_test = evaluate_mse(me, ds.subset(SampleSplit::Test));
  g_elu_model = std::move(me);

  c.info("train/val/test mse " + fmt(train_mse) + "/" + fmt(val_mse) + "/" + fmt(test_mse) +
         ", bounded-head test mse " + fmt(elu_test) + " (informational), data " +
         fmt(t_data) + " s, total " + fmt(dt) + " s");
  return c;
}

Check c9_rate_optimization() {
  Check c;
  RateProblem prob;
  prob.cfg = harq_ir(3, 2.0, 20.0);
  prob.epsilon = 0.05;
  prob.rate_lo = 0.1;
  prob.rate_hi = 5.0;
  const ChannelParams ch = ref_chan(3.0);

  const auto res = optimal_rate_asymptotic(prob, ref_link(), ch);
  c.require(res.iterations <= 50, "iterations " + std::to_string(res.iterations));
  bool monotone = true;
  for (std::size_t i = 1; i < res.lambda_trace.size(); ++i)
    monotone &= res.lambda_trace[i] >= res.lambda_trace[i - 1] - 1e-12;
  c.require(monotone, "lambda trace not monotone");

  // Brute-force grid oracle.
  auto outage_at = [&](int k, double rate) {
    HarqConfig t = prob.cfg;
    t.k_max = k;
    t.rate_bps_hz = rate;
    return std::min(1.0, outage_asymptotic(t, ref_link(), ch).outage);
  };
  auto objective = [&](double rate) {
    double denom = 1.0;
    for (int k = 1; k < prob.cfg.k_max; ++k) denom += outage_at(k, rate);
    return rate * (1.0 - outage_at(prob.cfg.k_max, rate)) / denom;
  };
  const int n = 400;
  double best_rate = prob.rate_lo, best_val = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double r = prob.rate_lo + (prob.rate_hi - prob.rate_lo) * i / n;
    if (outage_at(prob.cfg.k_max, r) > prob.epsilon) continue;
    const double v = objective(r);
    if (v > best_val) {
      best_val = v;
      best_rate = r;
    }
  }
  const double step = (prob.rate_hi - prob.rate_lo) / n;
  c.require(std::abs(res.rate - best_rate) <= 2.0 * step,
            "rate " + fmt(res.rate) + " vs grid " + fmt(best_rate));
  c.require(res.ltat >= best_val - 1e-6,
            "ltat " + fmt(res.ltat) + " vs grid " + fmt(best_val));

  double prev = -1.0;
  bool eps_monotone = true;
  for (int i = 0; i < 10; ++i) {
    RateProblem pi = prob;
    pi.epsilon = std::pow(10.0, -4.0 + 3.7 * i / 9.0);  // 1e-4 .. ~0.5
    const auto ri = optimal_rate_asymptotic(pi, ref_link(), ch);
    eps_monotone &= ri.ltat >= prev - 1e-9;
    prev = ri.ltat;
  }
  c.require(eps_monotone, "ltat not monotone across the ceiling sweep");

  if (g_model) {
    RateProblem p4 = prob;
    p4.cfg = harq_ir(4, 2.0, 20.0);
    p4.epsilon = 0.01;
    p4.method = RateMethod::Surrogate;
    const ChannelParams ch4 = ref_chan(3.5);
    const auto sur = optimal_rate_surrogate(p4, *g_model, ref_link(), ch4);
    p4.method = RateMethod::Asymptotic;
    const auto asy = optimal_rate_asymptotic(p4, ref_link(), ch4);
    c.require(sur.ltat >= asy.ltat - 1e-6,
              "learned-model ltat " + fmt(sur.ltat) + " < formula ltat " + fmt(asy.ltat));
    c.info("dinkelbach iters " + std::to_string(res.iterations) + ", model ltat " +
           fmt(sur.ltat) + " vs formula ltat " + fmt(asy.ltat));
  } else {
    c.require(false, "no trained model available from the quality gate");
  }
  return c;
}

Check c10_reference_anchors() {
  Check c;
  const ChannelParams base = ref_chan(1.0);
  LinkParams link = ref_link();
  ChannelParams ch = base;
  const double target0 = 0.5792;

  auto outage_at = [&](double snr_db, const AbateWhittConfig& aw) {
    return outage_exact_ir(harq_ir(3, 2.0, snr_db), link, ch, aw);
  };
  AbateWhittConfig aw0;  // defaults fine near outage ~ 0.6

  const double p_raw = outage_at(0.0, aw0);
  std::string knob;
  if (p_raw <= target0) {
    // Calibrate the absorption coefficient (outage increases with it).
    knob = "absorption";
    double lo = 0.0, hi = 2.0;
    for (int i = 0; i < 80; ++i) {
      link.absorption_coeff_per_m = 0.5 * (lo + hi);
      (outage_at(0.0, aw0) < target0 ? lo : hi) = link.absorption_coeff_per_m;
    }
    link.absorption_coeff_per_m = 0.5 * (lo + hi);
  } else {
    // Uncalibrated point already exceeds the anchor: scale the fading mean
    // upward instead (outage decreases with it).
    knob = "fading mean";
    double lo = 1.0, hi = 50.0;
    for (int i = 0; i < 80; ++i) {
      ch.hhat_f = 0.5 * (lo + hi);
      (outage_at(0.0, aw0) > target0 ? lo : hi) = ch.hhat_f;
    }
    ch.hhat_f = 0.5 * (lo + hi);
  }
  const double p0 = outage_at(0.0, aw0);

  AbateWhittConfig aw;
  aw.a = 24.0;
  const double p24 = outage_at(24.0, aw);
  const double p48 = outage_at(48.0, aw);
  const double r24 = std::abs(p24 / 0.0020 - 1.0);
  const double r48 = std::abs(p48 / 3.0607e-06 - 1.0);
  c.require(r24 <= 0.05, "24 dB " + fmt(p24) + " (off " + fmt(r24) + ")");
  c.require(r48 <= 0.05, "48 dB " + fmt(p48) + " (off " + fmt(r48) + ")");
  c.info("calibrated " + knob + " (" +
         fmt(knob == "absorption" ? link.absorption_coeff_per_m : ch.hhat_f) +
         "), anchor " + fmt(p0) + ", 24 dB " + fmt(p24) + ", 48 dB " + fmt(p48));
  return c;
}

Check c11_single_call_latency() {
  Check c;
  const auto t0 = Clock::now();
  const double p = outage_exact_ir(harq_ir(4, 2.0, 24.0), ref_link(), ref_chan(1.0));
  const double dt = seconds_since(t0);
  c.require(dt <= 5.0, "call took " + fmt(dt) + " s");
  c.info(fmt(dt) + " s (outage " + fmt(p) + ")");
  return c;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* label;
    std::function<Check()> fn;
    bool conditional;
  };
  const std::vector<Item> items = {
      {1, "single-round outage matches the closed form", c1_single_round_exactness, false},
      {2, "multi-round outage matches nested quadrature", c2_oracle_equivalence, false},
      {3, "analytic outage within monte-carlo error bars", c3_monte_carlo_agreement, false},
      {4, "high-snr asymptote tracks the exact curve", c4_asymptote_convergence, false},
      {5, "log-log outage slope equals the diversity order", c5_diversity_slope, false},
      {6, "shared-draw scheme ordering holds per seed", c6_scheme_ordering, false},
      {7, "relay-chain limits: blockage floor and throughput ceiling", c7_multihop_limits, false},
      {8, "learned outage evaluator reaches the accuracy bar", c8_surrogate_quality, false},
      {9, "rate optimizer: convergence, oracle, and model route", c9_rate_optimization, false},
      {10, "published anchor table reproduced after calibration", c10_reference_anchors, true},
      {11, "single four-round evaluation stays under 5 s", c11_single_call_latency, false},
  };

  bool all_ok = true;
  for (const auto& item : items) {
    Check c;
    try {
      c = item.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    std::printf("%s [%2d] %s%s%s%s\n", c.ok ? "PASS" : "FAIL", item.id, item.label,
                c.detail.str().empty() ? "" : " -- ", c.detail.str().c_str(),
                !c.ok && item.conditional ? " (conditional, not gating)" : "");
    std::fflush(stdout);
    if (!c.ok && !item.conditional) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
