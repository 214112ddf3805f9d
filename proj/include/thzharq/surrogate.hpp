// SPDX-License-Identifier: Apache-2.0
//
// Learned outage evaluator: hybrid dataset generation (simulation above a
// probability floor, asymptotic formula below it), the log-log target
// transform that magnifies low outage values, and a small fully-connected
// network (4-100-100-1, ELU) trained with Adam on the transformed MSE.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thzharq/params.hpp"

namespace thzharq {

// Target transform target = log2(-log2 p) and its inverse p = 2^(-2^y).
double outage_to_target(double p);
double target_to_outage(double y);

enum class SampleSplit { Train = 0, Validation = 1, Test = 2 };

struct Sample {
  double snr_db = 0.0;
  double rate = 0.0;
  int k_max = 2;
  double beam_waist = 3.0;
  double raw_p = 0.0;    // outage before the transform
  bool from_sim = true;  // true: Monte Carlo; false: asymptotic formula
  double target = 0.0;   // transformed outage
  SampleSplit split = SampleSplit::Train;
};

// Fixed physics plus input ranges for dataset generation.  The beam waist
// and the four network inputs are drawn uniformly from the ranges; all
// other channel/link constants are held fixed.
struct DatasetConfig {
  int n = 12500;
  double upsilon = 1e-4;            // sim/asymptotic switchover outage
  std::uint64_t sim_trials = 100000;
  std::uint64_t seed = 1;
  int workers = 0;                  // 0 = hardware concurrency
  LinkParams link;
  ChannelParams chan;               // beam_waist_m overridden per sample
  double snr_db_min = 0.0, snr_db_max = 50.0;
  double rate_min = 0.0, rate_max = 5.0;
  int k_min = 2, k_max = 4;
  double waist_min = 3.0, waist_max = 4.0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("dataset n must be >= 1");
    if (!(upsilon > 0.0 && upsilon < 1.0))
      throw std::invalid_argument("upsilon must be in (0, 1)");
    if (sim_trials < 1) throw std::invalid_argument("sim_trials must be >= 1");
    if (!(snr_db_min < snr_db_max) || !(rate_min < rate_max) || !(waist_min < waist_max) ||
        k_min > k_max || k_min < 1)
      throw std::invalid_argument("invalid dataset input ranges");
  }
};

struct Dataset {
  std::vector<Sample> samples;
  std::uint64_t redraw_count = 0;  // degenerate raw outputs re-drawn
  DatasetConfig config;

  std::vector<Sample> subset(SampleSplit s) const {
    std::vector<Sample> out;
    for (const auto& x : samples)
      if (x.split == s) out.push_back(x);
    return out;
  }
};

// Draw n input tuples, attach hybrid targets (simulated outage when it is
// at least upsilon, asymptotic otherwise), transform, and split 60/20/20
// by index.  Deterministic given the seed, regardless of worker count.
Dataset generate_dataset(const DatasetConfig& dc);

void save_dataset_csv(const Dataset& ds, const std::string& path);
Dataset load_dataset_csv(const std::string& path);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int max_epochs = 500;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int patience = 50;  // epochs without validation improvement
  std::uint64_t seed = 1;
  // "elu" follows the reference architecture (output bounded below at -1);
  // "identity" lifts that bound.  See the model card in the README.
  std::string output_activation = "identity";

  void validate() const {
    if (!(learning_rate > 0) || batch_size < 1 || max_epochs < 1 || patience < 1)
      throw std::invalid_argument("invalid training hyper-parameters");
    if (!(adam_beta1 > 0 && adam_beta1 < 1 && adam_beta2 > 0 && adam_beta2 < 1))
      throw std::invalid_argument("adam betas must be in (0, 1)");
    if (output_activation != "elu" && output_activation != "identity")
      throw std::invalid_argument("output_activation must be 'elu' or 'identity'");
  }
};

struct SurrogateModel {
  std::vector<int> layer_sizes{4, 100, 100, 1};
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: layer_sizes[l+1] x layer_sizes[l]
  std::vector<Eigen::VectorXd> biases;
  bool elu_output = false;
  std::array<double, 4> input_lo{0.0, 0.0, 2.0, 3.0};  // snr_db, rate, k, waist
  std::array<double, 4> input_hi{50.0, 5.0, 4.0, 4.0};
  // training metadata
  std::uint64_t seed = 0;
  int epochs_run = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;

  // Network output in the transformed domain.  Sets *extrapolated when an
  // input falls outside the normalization ranges.
  double predict_transformed(double snr_db, double rate, double k, double waist,
                             bool* extrapolated = nullptr) const;
};

// Adam + early stopping on the validation split; restores the best
// weights seen.  Deterministic given tc.seed.  Throws ConvergenceError if
// the loss becomes non-finite.
SurrogateModel train(const Dataset& ds, const TrainConfig& tc);

// p_hat = 2^(-2^yhat), guaranteed inside (0, 1).
double predict_outage(const SurrogateModel& m, double snr_db, double rate, double k,
                      double waist, bool* extrapolated = nullptr);

// Mean squared error in the transformed domain over a sample set.
double evaluate_mse(const SurrogateModel& m, const std::vector<Sample>& set);

void save_model_json(const SurrogateModel& m, const std::string& path);
SurrogateModel load_model_json(const std::string& path);

}  // namespace thzharq
