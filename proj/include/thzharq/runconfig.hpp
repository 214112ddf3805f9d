// SPDX-License-Identifier: Apache-2.0
//
// JSON run configuration shared by the command-line tools: link/channel/
// HARQ parameter blocks, optional multi-hop topology, sweep description,
// dataset/train/optimize sub-configurations, named presets, a stable
// 64-bit config hash for artifact metadata, and exit-code conventions.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "thzharq/optimizer.hpp"
#include "thzharq/params.hpp"
#include "thzharq/surrogate.hpp"

namespace thzharq {

enum class SweepVariable { Snr, Rate, Epsilon };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

struct SweepSpec {
  SweepVariable variable = SweepVariable::Snr;
  double from = 0.0;
  double to = 48.0;
  int points = 9;

  void validate() const {
    if (points < 2) throw std::invalid_argument("sweep.points must be >= 2");
    if (!(from < to)) throw std::invalid_argument("sweep.from must be < sweep.to");
  }
  double value_at(int i) const { return from + (to - from) * i / (points - 1); }
};

struct TrainRequest {
  TrainConfig config;
  std::string dataset_path;  // required by the train command
  std::string model_path;    // output (overridden by --out)
};

struct OptimizeRequest {
  RateMethod method = RateMethod::Asymptotic;
  double epsilon = 1e-3;
  double rate_lo = 0.1;
  double rate_hi = 5.0;
  std::string model_path;  // required when method == Surrogate
};

struct RunConfig {
  LinkParams link;
  ChannelParams channel;
  HarqConfig harq;
  std::optional<HopTopology> topology;
  SweepSpec sweep;
  std::string output_path;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000000;

  std::optional<DatasetConfig> dataset;
  std::optional<TrainRequest> train_request;
  std::optional<OptimizeRequest> optimize;

  // Free-form ambient metadata carried into artifacts (e.g. temperature,
  // humidity fraction, pressure for the molecular-absorption preset).
  std::string metadata;

  void validate() const;
};

// Parse/serialize.  parse throws std::invalid_argument on malformed input.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& rc);

// Named presets mirroring the reference evaluation setup (275 GHz, 20 m,
// 55 dBi, alpha=2, mu=1, sigma_s=1, K=3, R=2): "w1" uses a 1 m beam waist
// (pointing-dominated tail), "w3" a 3 m waist (fading-dominated tail).
RunConfig make_preset(const std::string& name);

// FNV-1a over the canonical serialized config; stable across re-runs.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t config_hash(const RunConfig& rc);

// Exit-code conventions for the command-line tools.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitInfeasible = 4;

int exit_code_for(const std::exception& e);
void emit_error_json(std::ostream& os, int code, const std::string& message);

}  // namespace thzharq
