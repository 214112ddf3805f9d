// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: JSON config in, CSV/JSON artifacts out.
// Commands: outage-curve, ltat-curve, multihop, simulate, dataset, train,
// optimize.  Artifacts are byte-identical across re-runs with the same
// config and seed; every CSV starts with a metadata comment carrying the
// toolkit version and a hash of the effective config.
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thzharq/channel.hpp"
#include "thzharq/montecarlo.hpp"
#include "thzharq/multihop.hpp"
#include "thzharq/optimizer.hpp"
#include "thzharq/outage.hpp"
#include "thzharq/runconfig.hpp"
#include "thzharq/surrogate.hpp"
#include "thzharq/version.hpp"

namespace {

using namespace thzharq;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct CommonOpts {
  std::string config_path;
  std::int64_t seed = -1;       // <0: keep config value
  std::int64_t trials = -1;     // <0: keep config value
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file (or preset name w1/w3)")
      ->required();
  cmd->add_option("--seed", o.seed, "override config seed");
  cmd->add_option("--trials", o.trials, "override Monte-Carlo trial count");
  cmd->add_option("--out", o.out, "override output path");
}

RunConfig effective_config(const CommonOpts& o) {
  RunConfig rc;
  std::ifstream probe(o.config_path);
  if (probe.good())
    rc = load_run_config(o.config_path);
  else
    rc = make_preset(o.config_path);
  if (o.seed >= 0) {
    rc.seed = static_cast<std::uint64_t>(o.seed);
    if (rc.dataset) rc.dataset->seed = rc.seed;
    if (rc.train_request) rc.train_request->config.seed = rc.seed;
  }
  if (o.trials >= 0) {
    rc.trials = static_cast<std::uint64_t>(o.trials);
    if (rc.dataset) rc.dataset->sim_trials = rc.trials;
  }
  if (!o.out.empty()) rc.output_path = o.out;
  if (rc.dataset) {
    rc.dataset->link = rc.link;
    rc.dataset->chan = rc.channel;
  }
  rc.validate();
  return rc;
}

// Rows are computed by a small pool but always emitted in sweep order.
std::vector<std::string> compute_rows(int n, const std::function<std::string(int)>& f) {
  std::vector<std::string> rows(static_cast<std::size_t>(n));
  int nw = std::min(n, static_cast<int>(std::thread::hardware_concurrency()));
  nw = std::max(1, std::min(nw, 16));
  if (nw == 1) {
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = f(i);
    return rows;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          rows[static_cast<std::size_t>(i)] = f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return rows;
}

void write_artifact(const RunConfig& rc, const std::string& command,
                    const std::string& header, const std::vector<std::string>& rows) {
  std::ostringstream os;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(rc)));
  os << "# thzharq " << kVersion << " command=" << command << " config_hash=" << hash
     << " seed=" << rc.seed << "\n";
  os << header << "\n";
  for (const auto& r : rows) os << r << "\n";
  if (rc.output_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(rc.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + rc.output_path);
    out << os.str();
  }
}

void write_text(const RunConfig& rc, const std::string& text) {
  if (rc.output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(rc.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + rc.output_path);
    out << text;
  }
}

HarqConfig at_sweep_point(const RunConfig& rc, double x) {
  HarqConfig cfg = rc.harq;
  switch (rc.sweep.variable) {
    case SweepVariable::Snr: cfg.snr_ref_db = x; break;
    case SweepVariable::Rate: cfg.rate_bps_hz = x; break;
    case SweepVariable::Epsilon:
      throw std::invalid_argument("epsilon sweeps only apply to the optimize command");
  }
  return cfg;
}

HarqConfig truncated(const HarqConfig& base, int k) {
  HarqConfig c = base;
  c.k_max = k;
  if (!base.power_factors.empty())
    c.power_factors.assign(base.power_factors.begin(), base.power_factors.begin() + k);
  return c;
}

constexpr HarqScheme kSchemes[] = {HarqScheme::TypeI, HarqScheme::ChaseCombining,
                                   HarqScheme::IncrementalRedundancy};

std::string exact_outage_field(const HarqConfig& cfg, const RunConfig& rc) {
  if (rc.topology && rc.topology->hops > 1)
    return fmt(outage_multihop(*rc.topology, cfg, rc.link, rc.channel));
  switch (cfg.scheme) {
    case HarqScheme::IncrementalRedundancy:
      return fmt(outage_exact_ir(cfg, rc.link, rc.channel));
    case HarqScheme::TypeI:
      return fmt(outage_type1_exact(cfg, rc.link, rc.channel));
    case HarqScheme::ChaseCombining:
      return cfg.k_max <= 3 ? fmt(outage_cc_quadrature(cfg, rc.link, rc.channel))
                            : std::string();
  }
  return {};
}

int cmd_outage_curve(const RunConfig& rc) {
  const bool multi = rc.topology && rc.topology->hops > 1;
  auto rows = compute_rows(rc.sweep.points, [&](int i) {
    const double x = rc.sweep.value_at(i);
    const HarqConfig cfg0 = at_sweep_point(rc, x);
    std::ostringstream os;
    SchemeComparison mc{};
    if (!multi) mc = simulate_all_schemes(cfg0, rc.link, rc.channel, rc.trials, rc.seed, 1);
    bool first = true;
    for (HarqScheme s : kSchemes) {
      HarqConfig cfg = cfg0;
      cfg.scheme = s;
      SimResult sim{};
      if (multi)
        sim = simulate_multihop(*rc.topology, cfg, rc.link, rc.channel, rc.trials,
                                rc.seed, 1);
      else
        sim = (s == HarqScheme::TypeI) ? mc.type1
              : (s == HarqScheme::ChaseCombining) ? mc.cc
                                                  : mc.ir;
      std::string asy;
      if (!multi && cfg.rate_bps_hz > 0) asy = fmt(outage_asymptotic(cfg, rc.link, rc.channel).outage);
      if (!first) os << "\n";
      first = false;
      os << fmt(x) << ',' << exact_outage_field(cfg, rc) << ',' << asy << ','
         << fmt(sim.estimate) << ',' << fmt(sim.std_error) << ',' << to_string(s);
    }
    return os.str();
  });
  write_artifact(rc, "outage-curve", "x,exact,asymptotic,mc_estimate,mc_stderr,scheme", rows);
  return kExitOk;
}

// Per-round outage chain p_1..p_K for the renewal formula; exact wherever a
// closed form or quadrature applies, Monte-Carlo otherwise (CC with k > 3).
std::vector<double> per_round_outages(const HarqConfig& cfg, const RunConfig& rc) {
  std::vector<double> p(static_cast<std::size_t>(cfg.k_max));
  for (int k = 1; k <= cfg.k_max; ++k) {
    const HarqConfig ck = truncated(cfg, k);
    double v = 0.0;
    switch (cfg.scheme) {
      case HarqScheme::IncrementalRedundancy:
        v = outage_exact_ir(ck, rc.link, rc.channel);
        break;
      case HarqScheme::TypeI:
        v = outage_type1_exact(ck, rc.link, rc.channel);
        break;
      case HarqScheme::ChaseCombining:
        v = k <= 3 ? outage_cc_quadrature(ck, rc.link, rc.channel)
                   : simulate_outage(ck, rc.link, rc.channel, rc.trials, rc.seed, 1)
                         .estimate;
        break;
    }
    p[static_cast<std::size_t>(k - 1)] = v;
  }
  return p;
}

int cmd_ltat_curve(const RunConfig& rc) {
  const bool multi = rc.topology && rc.topology->hops > 1;
  auto rows = compute_rows(rc.sweep.points, [&](int i) {
    const double x = rc.sweep.value_at(i);
    const HarqConfig cfg0 = at_sweep_point(rc, x);
    std::ostringstream os;
    bool first = true;
    for (HarqScheme s : kSchemes) {
      HarqConfig cfg = cfg0;
      cfg.scheme = s;
      double formula = 0.0;
      SimResult sim{};
      if (multi) {
        formula = ltat_multihop(
            *rc.topology, cfg,
            outage_multihop_profile(*rc.topology, cfg, rc.link, rc.channel));
        sim = simulate_multihop_ltat(*rc.topology, cfg, rc.link, rc.channel, rc.trials,
                                     rc.seed, 1);
      } else {
        formula = ltat(cfg, per_round_outages(cfg, rc));
        sim = simulate_ltat(cfg, rc.link, rc.channel, rc.trials, rc.seed, 1);
      }
      if (!first) os << "\n";
      first = false;
      os << fmt(x) << ',' << fmt(formula) << ',' << fmt(sim.estimate) << ','
         << fmt(sim.std_error) << ',' << to_string(s);
    }
    return os.str();
  });
  write_artifact(rc, "ltat-curve", "x,ltat_formula,ltat_sim,ltat_stderr,scheme", rows);
  return kExitOk;
}

int cmd_multihop(const RunConfig& rc) {
  if (!rc.topology)
    throw std::invalid_argument("multihop command requires a topology block");
  const HopTopology& topo = *rc.topology;
  auto rows = compute_rows(rc.sweep.points, [&](int i) {
    const double x = rc.sweep.value_at(i);
    const HarqConfig cfg = at_sweep_point(rc, x);
    const double out = outage_multihop(topo, cfg, rc.link, rc.channel);
    const double t =
        ltat_multihop(topo, cfg, outage_multihop_profile(topo, cfg, rc.link, rc.channel));
    const SimResult sim =
        simulate_multihop(topo, cfg, rc.link, rc.channel, rc.trials, rc.seed, 1);
    std::ostringstream os;
    os << fmt(x) << ',' << fmt(out) << ',' << fmt(t) << ','
       << fmt(multihop_outage_floor(topo, rc.link)) << ','
       << fmt(multihop_ltat_bound(topo, cfg, rc.link)) << ',' << fmt(sim.estimate) << ','
       << fmt(sim.std_error);
    return os.str();
  });
  write_artifact(rc, "multihop",
                 "x,outage,ltat,outage_floor,ltat_bound,mc_outage,mc_stderr", rows);
  return kExitOk;
}

int cmd_simulate(const RunConfig& rc) {
  const bool multi = rc.topology && rc.topology->hops > 1;
  auto rows = compute_rows(rc.sweep.points, [&](int i) {
    const double x = rc.sweep.value_at(i);
    const HarqConfig cfg0 = at_sweep_point(rc, x);
    std::ostringstream os;
    SchemeComparison mc{};
    if (!multi) mc = simulate_all_schemes(cfg0, rc.link, rc.channel, rc.trials, rc.seed, 1);
    bool first = true;
    for (HarqScheme s : kSchemes) {
      HarqConfig cfg = cfg0;
      cfg.scheme = s;
      const SimResult sim =
          multi ? simulate_multihop(*rc.topology, cfg, rc.link, rc.channel, rc.trials,
                                    rc.seed, 1)
                : (s == HarqScheme::TypeI  ? mc.type1
                   : s == HarqScheme::ChaseCombining ? mc.cc
                                                     : mc.ir);
      if (!first) os << "\n";
      first = false;
      os << fmt(x) << ',' << fmt(sim.estimate) << ',' << fmt(sim.std_error) << ','
         << to_string(s);
    }
    return os.str();
  });
  write_artifact(rc, "simulate", "x,mc_estimate,mc_stderr,scheme", rows);
  return kExitOk;
}

int cmd_dataset(const RunConfig& rc) {
  DatasetConfig dc = rc.dataset.value_or(DatasetConfig{});
  dc.link = rc.link;
  dc.chan = rc.channel;
  if (!rc.dataset) dc.seed = rc.seed;
  const Dataset ds = generate_dataset(dc);
  const std::string path = rc.output_path.empty() ? "dataset.csv" : rc.output_path;
  save_dataset_csv(ds, path);
  nlohmann::json j{{"rows", ds.samples.size()},
                   {"redraws", ds.redraw_count},
                   {"path", path}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& rc) {
  if (!rc.train_request || rc.train_request->dataset_path.empty())
    throw std::invalid_argument("train command requires train.dataset_path in the config");
  const TrainRequest& tr = *rc.train_request;
  const Dataset ds = load_dataset_csv(tr.dataset_path);
  SurrogateModel model = train(ds, tr.config);
  const double test_mse = evaluate_mse(model, ds.subset(SampleSplit::Test));
  std::string path = rc.output_path;
  if (path.empty()) path = tr.model_path.empty() ? "model.json" : tr.model_path;
  save_model_json(model, path);
  nlohmann::json j{{"train_mse", model.train_mse},
                   {"val_mse", model.val_mse},
                   {"test_mse", test_mse},
                   {"epochs", model.epochs_run},
                   {"path", path}};
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_optimize(const RunConfig& rc) {
  if (!rc.optimize)
    throw std::invalid_argument("optimize command requires an optimize block");
  const OptimizeRequest& req = *rc.optimize;
  SurrogateModel model;
  if (req.method == RateMethod::Surrogate) {
    if (req.model_path.empty())
      throw std::invalid_argument("surrogate optimization requires optimize.model_path");
    model = load_model_json(req.model_path);
  }
  auto solve = [&](double eps) {
    RateProblem prob;
    prob.cfg = rc.harq;
    prob.epsilon = eps;
    prob.rate_lo = req.rate_lo;
    prob.rate_hi = req.rate_hi;
    prob.method = req.method;
    return req.method == RateMethod::Asymptotic
               ? optimal_rate_asymptotic(prob, rc.link, rc.channel)
               : optimal_rate_surrogate(prob, model, rc.link, rc.channel);
  };
  const char* mname = req.method == RateMethod::Asymptotic ? "asymptotic" : "surrogate";
  if (rc.sweep.variable == SweepVariable::Epsilon) {
    auto rows = compute_rows(rc.sweep.points, [&](int i) {
      const RateResult r = solve(rc.sweep.value_at(i));
      std::ostringstream os;
      os << fmt(rc.sweep.value_at(i)) << ',' << fmt(r.rate) << ',' << fmt(r.ltat) << ','
         << mname;
      return os.str();
    });
    write_artifact(rc, "optimize", "x,rate,ltat,method", rows);
    return kExitOk;
  }
  const RateResult r = solve(req.epsilon);
  nlohmann::json j{{"rate", r.rate},
                   {"ltat", r.ltat},
                   {"method", mname},
                   {"iterations",
                    req.method == RateMethod::Asymptotic ? r.iterations : r.evaluations}};
  if (req.method == RateMethod::Surrogate) {
    j["evaluations"] = r.evaluations;
    j["extrapolated"] = r.extrapolated;
  }
  write_text(rc, j.dump() + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terahertz HARQ outage / throughput toolkit"};
  app.require_subcommand(1);
  CommonOpts o;
  CLI::App* c_outage = app.add_subcommand("outage-curve", "exact/asymptotic/MC outage sweep");
  CLI::App* c_ltat = app.add_subcommand("ltat-curve", "throughput sweep");
  CLI::App* c_multi = app.add_subcommand("multihop", "relay-chain outage and throughput sweep");
  CLI::App* c_sim = app.add_subcommand("simulate", "Monte-Carlo only sweep");
  CLI::App* c_data = app.add_subcommand("dataset", "generate a training dataset CSV");
  CLI::App* c_train = app.add_subcommand("train", "train the outage surrogate");
  CLI::App* c_opt = app.add_subcommand("optimize", "outage-constrained rate selection");
  for (CLI::App* c : {c_outage, c_ltat, c_multi, c_sim, c_data, c_train, c_opt})
    add_common(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    thzharq::emit_error_json(std::cerr, thzharq::kExitConfig, e.what());
    return thzharq::kExitConfig;
  }

  try {
    const RunConfig rc = effective_config(o);
    if (app.got_subcommand(c_outage)) return cmd_outage_curve(rc);
    if (app.got_subcommand(c_ltat)) return cmd_ltat_curve(rc);
    if (app.got_subcommand(c_multi)) return cmd_multihop(rc);
    if (app.got_subcommand(c_sim)) return cmd_simulate(rc);
    if (app.got_subcommand(c_data)) return cmd_dataset(rc);
    if (app.got_subcommand(c_train)) return cmd_train(rc);
    if (app.got_subcommand(c_opt)) return cmd_optimize(rc);
    throw std::invalid_argument("no command selected");
  } catch (const std::exception& e) {
    const int code = thzharq::exit_code_for(e);
    thzharq::emit_error_json(std::cerr, code, e.what());
    return code;
  }
}
