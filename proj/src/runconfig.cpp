// SPDX-License-Identifier: Apache-2.0
#include "thzharq/runconfig.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace thzharq {

namespace {

using json = nlohmann::json;

HarqScheme scheme_from_string(const std::string& s) {
  if (s == "IR") return HarqScheme::IncrementalRedundancy;
  if (s == "CC") return HarqScheme::ChaseCombining;
  if (s == "TypeI") return HarqScheme::TypeI;
  throw std::invalid_argument("unknown HARQ scheme: " + s);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

LinkParams parse_link(const json& j) {
  LinkParams p;
  get_if(j, "frequency_hz", p.frequency_hz);
  get_if(j, "distance_m", p.distance_m);
  get_if(j, "gain_tx_dbi", p.gain_tx_dbi);
  get_if(j, "gain_rx_dbi", p.gain_rx_dbi);
  get_if(j, "absorption_coeff_per_m", p.absorption_coeff_per_m);
  get_if(j, "noise_power_w", p.noise_power_w);
  return p;
}

ChannelParams parse_channel(const json& j) {
  ChannelParams p;
  get_if(j, "alpha", p.alpha);
  get_if(j, "mu", p.mu);
  get_if(j, "hhat_f", p.hhat_f);
  get_if(j, "antenna_radius_m", p.antenna_radius_m);
  get_if(j, "beam_waist_m", p.beam_waist_m);
  get_if(j, "jitter_sigma", p.jitter_sigma);
  return p;
}

HarqConfig parse_harq(const json& j) {
  HarqConfig c;
  if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  get_if(j, "k_max", c.k_max);
  get_if(j, "rate_bps_hz", c.rate_bps_hz);
  get_if(j, "snr_ref_db", c.snr_ref_db);
  get_if(j, "power_factors", c.power_factors);
  return c;
}

BlockageParams parse_blockage(const json& j) {
  BlockageParams b;
  get_if(j, "density_per_m2", b.density_per_m2);
  get_if(j, "body_radius_m", b.body_radius_m);
  get_if(j, "body_height_m", b.body_height_m);
  get_if(j, "bs_height_m", b.bs_height_m);
  get_if(j, "user_height_m", b.user_height_m);
  return b;
}

HopTopology parse_topology(const json& j) {
  HopTopology t;
  get_if(j, "hops", t.hops);
  get_if(j, "distances_m", t.distances_m);
  if (j.contains("blockage")) {
    t.blockage.clear();
    const auto& jb = j.at("blockage");
    if (jb.is_array())
      for (const auto& e : jb) t.blockage.push_back(parse_blockage(e));
    else
      t.blockage.push_back(parse_blockage(jb));
  }
  return t;
}

json link_json(const LinkParams& p) {
  return {{"frequency_hz", p.frequency_hz},
          {"distance_m", p.distance_m},
          {"gain_tx_dbi", p.gain_tx_dbi},
          {"gain_rx_dbi", p.gain_rx_dbi},
          {"absorption_coeff_per_m", p.absorption_coeff_per_m},
          {"noise_power_w", p.noise_power_w}};
}

json channel_json(const ChannelParams& p) {
  return {{"alpha", p.alpha},
          {"mu", p.mu},
          {"hhat_f", p.hhat_f},
          {"antenna_radius_m", p.antenna_radius_m},
          {"beam_waist_m", p.beam_waist_m},
          {"jitter_sigma", p.jitter_sigma}};
}

json harq_json(const HarqConfig& c) {
  json j{{"scheme", to_string(c.scheme)},
         {"k_max", c.k_max},
         {"rate_bps_hz", c.rate_bps_hz},
         {"snr_ref_db", c.snr_ref_db}};
  if (!c.power_factors.empty()) j["power_factors"] = c.power_factors;
  return j;
}

json blockage_json(const BlockageParams& b) {
  return {{"density_per_m2", b.density_per_m2},
          {"body_radius_m", b.body_radius_m},
          {"body_height_m", b.body_height_m},
          {"bs_height_m", b.bs_height_m},
          {"user_height_m", b.user_height_m}};
}

json topology_json(const HopTopology& t) {
  json j{{"hops", t.hops}};
  if (!t.distances_m.empty()) j["distances_m"] = t.distances_m;
  json jb = json::array();
  for (const auto& b : t.blockage) jb.push_back(blockage_json(b));
  j["blockage"] = jb;
  return j;
}

}  // namespace

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Snr: return "snr";
    case SweepVariable::Rate: return "rate";
    case SweepVariable::Epsilon: return "epsilon";
  }
  return "?";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "snr") return SweepVariable::Snr;
  if (s == "rate") return SweepVariable::Rate;
  if (s == "epsilon") return SweepVariable::Epsilon;
  throw std::invalid_argument("unknown sweep variable: " + s);
}

void RunConfig::validate() const {
  link.validate();
  channel.validate();
  harq.validate();
  if (topology) topology->validate();
  sweep.validate();
  if (dataset) dataset->validate();
  if (train_request) train_request->config.validate();
  if (optimize) {
    if (!(optimize->epsilon > 0 && optimize->epsilon < 1))
      throw std::invalid_argument("optimize.epsilon must be in (0, 1)");
    if (!(optimize->rate_lo > 0 && optimize->rate_lo < optimize->rate_hi))
      throw std::invalid_argument("optimize rate bounds must satisfy 0 < lo < hi");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc;
  try {
    if (j.contains("preset")) rc = make_preset(j.at("preset").get<std::string>());
    if (j.contains("link")) rc.link = parse_link(j.at("link"));
    if (j.contains("channel")) rc.channel = parse_channel(j.at("channel"));
    if (j.contains("harq")) rc.harq = parse_harq(j.at("harq"));
    if (j.contains("topology")) rc.topology = parse_topology(j.at("topology"));
    if (j.contains("sweep")) {
      const auto& js = j.at("sweep");
      if (js.contains("variable"))
        rc.sweep.variable = sweep_variable_from_string(js.at("variable").get<std::string>());
      get_if(js, "from", rc.sweep.from);
      get_if(js, "to", rc.sweep.to);
      get_if(js, "points", rc.sweep.points);
    }
    get_if(j, "output_path", rc.output_path);
    get_if(j, "seed", rc.seed);
    get_if(j, "trials", rc.trials);
    get_if(j, "metadata", rc.metadata);
    if (j.contains("dataset")) {
      DatasetConfig dc;
      dc.link = rc.link;
      dc.chan = rc.channel;
      dc.seed = rc.seed;
      const auto& jd = j.at("dataset");
      get_if(jd, "n", dc.n);
      get_if(jd, "upsilon", dc.upsilon);
      get_if(jd, "sim_trials", dc.sim_trials);
      get_if(jd, "workers", dc.workers);
      get_if(jd, "snr_db_min", dc.snr_db_min);
      get_if(jd, "snr_db_max", dc.snr_db_max);
      get_if(jd, "rate_min", dc.rate_min);
      get_if(jd, "rate_max", dc.rate_max);
      get_if(jd, "k_min", dc.k_min);
      get_if(jd, "k_max", dc.k_max);
      get_if(jd, "waist_min", dc.waist_min);
      get_if(jd, "waist_max", dc.waist_max);
      rc.dataset = dc;
    }
    if (j.contains("train")) {
      TrainRequest tr;
      tr.config.seed = rc.seed;
      const auto& jt = j.at("train");
      get_if(jt, "learning_rate", tr.config.learning_rate);
      get_if(jt, "batch_size", tr.config.batch_size);
      get_if(jt, "max_epochs", tr.config.max_epochs);
      get_if(jt, "patience", tr.config.patience);
      get_if(jt, "output_activation", tr.config.output_activation);
      get_if(jt, "dataset_path", tr.dataset_path);
      get_if(jt, "model_path", tr.model_path);
      rc.train_request = tr;
    }
    if (j.contains("optimize")) {
      OptimizeRequest opt;
      const auto& jo = j.at("optimize");
      if (jo.contains("method")) {
        const auto m = jo.at("method").get<std::string>();
        if (m == "asymptotic")
          opt.method = RateMethod::Asymptotic;
        else if (m == "surrogate")
          opt.method = RateMethod::Surrogate;
        else
          throw std::invalid_argument("optimize.method must be asymptotic or surrogate");
      }
      get_if(jo, "epsilon", opt.epsilon);
      get_if(jo, "rate_lo", opt.rate_lo);
      get_if(jo, "rate_hi", opt.rate_hi);
      get_if(jo, "model_path", opt.model_path);
      rc.optimize = opt;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") + e.what());
  }
  rc.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string serialize_run_config(const RunConfig& rc) {
  json j;
  j["link"] = link_json(rc.link);
  j["channel"] = channel_json(rc.channel);
  j["harq"] = harq_json(rc.harq);
  if (rc.topology) j["topology"] = topology_json(*rc.topology);
  j["sweep"] = {{"variable", to_string(rc.sweep.variable)},
                {"from", rc.sweep.from},
                {"to", rc.sweep.to},
                {"points", rc.sweep.points}};
  if (!rc.output_path.empty()) j["output_path"] = rc.output_path;
  j["seed"] = rc.seed;
  j["trials"] = rc.trials;
  if (!rc.metadata.empty()) j["metadata"] = rc.metadata;
  if (rc.dataset) {
    const auto& dc = *rc.dataset;
    j["dataset"] = {{"n", dc.n},
                    {"upsilon", dc.upsilon},
                    {"sim_trials", dc.sim_trials},
                    {"snr_db_min", dc.snr_db_min},
                    {"snr_db_max", dc.snr_db_max},
                    {"rate_min", dc.rate_min},
                    {"rate_max", dc.rate_max},
                    {"k_min", dc.k_min},
                    {"k_max", dc.k_max},
                    {"waist_min", dc.waist_min},
                    {"waist_max", dc.waist_max}};
  }
  if (rc.train_request) {
    const auto& tr = *rc.train_request;
    j["train"] = {{"learning_rate", tr.config.learning_rate},
                  {"batch_size", tr.config.batch_size},
                  {"max_epochs", tr.config.max_epochs},
                  {"patience", tr.config.patience},
                  {"output_activation", tr.config.output_activation},
                  {"dataset_path", tr.dataset_path},
                  {"model_path", tr.model_path}};
  }
  if (rc.optimize) {
    const auto& opt = *rc.optimize;
    j["optimize"] = {
        {"method", opt.method == RateMethod::Asymptotic ? "asymptotic" : "surrogate"},
        {"epsilon", opt.epsilon},
        {"rate_lo", opt.rate_lo},
        {"rate_hi", opt.rate_hi},
        {"model_path", opt.model_path}};
  }
  return j.dump(2);
}

RunConfig make_preset(const std::string& name) {
  RunConfig rc;  // struct defaults already mirror the reference setup
  rc.metadata = "temperature_k=296 psi=0.5 pressure_pa=101325";
  if (name == "w1") {
    rc.channel.beam_waist_m = 1.0;
  } else if (name == "w3") {
    rc.channel.beam_waist_m = 3.0;
  } else {
    throw std::invalid_argument("unknown preset: " + name + " (expected w1 or w3)");
  }
  return rc;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& rc) {
  // The hash identifies the computation, so the artifact destination must
  // not perturb it: the same run written to two paths is the same run.
  RunConfig keyed = rc;
  keyed.output_path.clear();
  return fnv1a64(serialize_run_config(keyed));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return kExitNonConvergence;
  if (dynamic_cast<const InfeasibleError*>(&e)) return kExitInfeasible;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitConfig;
  if (dynamic_cast<const std::domain_error*>(&e)) return kExitConfig;
  return 1;
}

void emit_error_json(std::ostream& os, int code, const std::string& message) {
  nlohmann::json j{{"error", {{"code", code}, {"message", message}}}};
  os << j.dump() << "\n";
}

}  // namespace thzharq
