// SPDX-License-Identifier: Apache-2.0
#include "thzharq/surrogate.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "thzharq/montecarlo.hpp"
#include "thzharq/outage.hpp"
#include "thzharq/rng.hpp"
#include "thzharq/version.hpp"

namespace thzharq {

namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double elu_grad(double z) { return z > 0.0 ? 1.0 : std::exp(z); }

Eigen::MatrixXd elu_mat(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return elu(v); });
}
Eigen::MatrixXd elu_grad_mat(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return elu_grad(v); });
}

SampleSplit split_for_index(int i, int n) {
  const int n_train = static_cast<int>(std::floor(0.6 * n));
  const int n_val = static_cast<int>(std::floor(0.8 * n));
  if (i < n_train) return SampleSplit::Train;
  if (i < n_val) return SampleSplit::Validation;
  return SampleSplit::Test;
}

const char* split_name(SampleSplit s) {
  switch (s) {
    case SampleSplit::Train: return "train";
    case SampleSplit::Validation: return "val";
    case SampleSplit::Test: return "test";
  }
  return "?";
}

SampleSplit split_from_name(const std::string& s) {
  if (s == "train") return SampleSplit::Train;
  if (s == "val") return SampleSplit::Validation;
  if (s == "test") return SampleSplit::Test;
  throw std::invalid_argument("unknown split label: " + s);
}

}  // namespace

double outage_to_target(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("outage_to_target: p must be in (0, 1)");
  return std::log2(-std::log2(p));
}

double target_to_outage(double y) { return std::exp2(-std::exp2(y)); }

Dataset generate_dataset(const DatasetConfig& dc) {
  dc.validate();
  dc.link.validate();
  dc.chan.validate();
  Dataset ds;
  ds.config = dc;
  ds.samples.resize(static_cast<std::size_t>(dc.n));
  std::atomic<std::uint64_t> redraws{0};
  std::atomic<int> next{0};

  auto gen_one = [&](int i) {
    CounterRng rng(dc.seed, 0x100000000ull + static_cast<std::uint64_t>(i));
    Sample s;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000)
        throw std::runtime_error("generate_dataset: too many degenerate re-draws");
      s.snr_db = dc.snr_db_min + (dc.snr_db_max - dc.snr_db_min) * rng.uniform();
      s.rate = dc.rate_min + (dc.rate_max - dc.rate_min) * rng.uniform();
      s.k_max = dc.k_min +
                static_cast<int>(rng.uniform() * (dc.k_max - dc.k_min + 1));
      s.k_max = std::min(s.k_max, dc.k_max);
      s.beam_waist = dc.waist_min + (dc.waist_max - dc.waist_min) * rng.uniform();

      HarqConfig cfg;
      cfg.scheme = HarqScheme::IncrementalRedundancy;
      cfg.k_max = s.k_max;
      cfg.rate_bps_hz = s.rate;
      cfg.snr_ref_db = s.snr_db;
      ChannelParams chan = dc.chan;
      chan.beam_waist_m = s.beam_waist;

      const std::uint64_t sim_seed = splitmix64(
          splitmix64(dc.seed ^ 0x6A09E667F3BCC909ull) +
          static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ull +
          static_cast<std::uint64_t>(attempt));
      const double p_sim =
          simulate_outage(cfg, dc.link, chan, dc.sim_trials, sim_seed, 1).estimate;
      if (p_sim >= dc.upsilon) {
        s.raw_p = p_sim;
        s.from_sim = true;
      } else {
        // Below the switchover the simulation is too coarse; use the
        // high-SNR formula instead (rate 0 has no outage to model: redraw).
        if (s.rate <= 0.0) {
          redraws.fetch_add(1, std::memory_order_relaxed);
          continue;
        }
        s.raw_p = outage_asymptotic(cfg, dc.link, chan).outage;
        s.from_sim = false;
      }
      // Degenerate draws: raw outside (0,1), or a boundary case where the
      // high-SNR branch lands at/above the switchover (the stored value must
      // be consistent with its provenance flag).
      if (s.raw_p <= 0.0 || s.raw_p >= 1.0 || (!s.from_sim && s.raw_p >= dc.upsilon)) {
        redraws.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      break;
    }
    s.target = outage_to_target(s.raw_p);
    s.split = split_for_index(i, dc.n);
    ds.samples[static_cast<std::size_t>(i)] = s;
  };

  int nw = dc.workers > 0 ? dc.workers : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::max(1, std::min({nw, 64, dc.n}));
  if (nw == 1) {
    for (int i = 0; i < dc.n; ++i) gen_one(i);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= dc.n) return;
          try {
            gen_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
            return;
          }
        }
      });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  }
  ds.redraw_count = redraws.load();
  return ds;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const auto& dc = ds.config;
  out.precision(17);
  out << "# thzharq " << kVersion << " dataset seed=" << dc.seed
      << " upsilon=" << dc.upsilon << " sim_trials=" << dc.sim_trials
      << " redraws=" << ds.redraw_count << " ranges=" << dc.snr_db_min << ","
      << dc.snr_db_max << "," << dc.rate_min << "," << dc.rate_max << "," << dc.k_min
      << "," << dc.k_max << "," << dc.waist_min << "," << dc.waist_max << "\n";
  out << "snr_db,rate,k_max,beam_waist,raw_p,source,target,split\n";
  for (const auto& s : ds.samples) {
    out << s.snr_db << ',' << s.rate << ',' << s.k_max << ',' << s.beam_waist << ','
        << s.raw_p << ',' << (s.from_sim ? "sim" : "asy") << ',' << s.target << ','
        << split_name(s.split) << '\n';
  }
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Dataset ds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto scan = [&line](const char* key, auto& dst) {
        const auto p = line.find(key);
        if (p == std::string::npos) return;
        std::istringstream v(line.substr(p + std::string(key).size()));
        v >> dst;
      };
      auto& dc = ds.config;
      scan("seed=", dc.seed);
      scan("upsilon=", dc.upsilon);
      scan("sim_trials=", dc.sim_trials);
      scan("redraws=", ds.redraw_count);
      const auto pos = line.find("ranges=");
      if (pos != std::string::npos) {
        std::istringstream r(line.substr(pos + 7));
        char c;
        r >> dc.snr_db_min >> c >> dc.snr_db_max >> c >> dc.rate_min >> c >>
            dc.rate_max >> c >> dc.k_min >> c >> dc.k_max >> c >> dc.waist_min >> c >>
            dc.waist_max;
      }
      continue;
    }
    if (line.rfind("snr_db,", 0) == 0) continue;  // header
    std::istringstream row(line);
    std::string field;
    Sample s;
    std::getline(row, field, ',');
    s.snr_db = std::stod(field);
    std::getline(row, field, ',');
    s.rate = std::stod(field);
    std::getline(row, field, ',');
    s.k_max = std::stoi(field);
    std::getline(row, field, ',');
    s.beam_waist = std::stod(field);
    std::getline(row, field, ',');
    s.raw_p = std::stod(field);
    std::getline(row, field, ',');
    s.from_sim = (field == "sim");
    std::getline(row, field, ',');
    s.target = std::stod(field);
    std::getline(row, field, ',');
    s.split = split_from_name(field);
    ds.samples.push_back(s);
  }
  ds.config.n = static_cast<int>(ds.samples.size());
  return ds;
}

double SurrogateModel::predict_transformed(double snr_db, double rate, double k,
                                           double waist, bool* extrapolated) const {
  const std::array<double, 4> raw{snr_db, rate, k, waist};
  Eigen::VectorXd x(4);
  bool outside = false;
  for (int i = 0; i < 4; ++i) {
    const double span = input_hi[static_cast<std::size_t>(i)] -
                        input_lo[static_cast<std::size_t>(i)];
    const double u =
        (raw[static_cast<std::size_t>(i)] - input_lo[static_cast<std::size_t>(i)]) / span;
    if (u < -1e-9 || u > 1.0 + 1e-9) outside = true;
    x[i] = u;
  }
  if (extrapolated) *extrapolated = outside;
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::VectorXd z = weights[l] * a + biases[l];
    const bool last = (l + 1 == weights.size());
    if (!last || elu_output)
      a = z.unaryExpr([](double v) { return elu(v); });
    else
      a = z;
  }
  return a[0];
}

namespace {

struct Batch {
  Eigen::MatrixXd x;  // 4 x B, normalized
  Eigen::MatrixXd t;  // 1 x B
};

Batch make_matrix(const SurrogateModel& m, const std::vector<Sample>& set) {
  Batch b;
  const auto n = static_cast<Eigen::Index>(set.size());
  b.x.resize(4, n);
  b.t.resize(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = set[static_cast<std::size_t>(i)];
    const std::array<double, 4> raw{s.snr_db, s.rate, static_cast<double>(s.k_max),
                                    s.beam_waist};
    for (int j = 0; j < 4; ++j)
      b.x(j, i) = (raw[static_cast<std::size_t>(j)] - m.input_lo[static_cast<std::size_t>(j)]) /
                  (m.input_hi[static_cast<std::size_t>(j)] - m.input_lo[static_cast<std::size_t>(j)]);
    b.t(0, i) = s.target;
  }
  return b;
}

// Forward pass through the whole set; returns transformed-domain MSE.
double mse_on(const SurrogateModel& m, const Batch& b) {
  Eigen::MatrixXd a = b.x;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::MatrixXd z = (m.weights[l] * a).colwise() + m.biases[l];
    const bool last = (l + 1 == m.weights.size());
    a = (!last || m.elu_output) ? elu_mat(z) : z;
  }
  return (a - b.t).array().square().mean();
}

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  std::uint64_t step = 0;
};

}  // namespace

SurrogateModel train(const Dataset& ds, const TrainConfig& tc) {
  tc.validate();
  if (ds.samples.empty()) throw std::invalid_argument("train: dataset is empty");

  SurrogateModel m;
  m.elu_output = (tc.output_activation == "elu");
  m.seed = tc.seed;
  // Normalization ranges come from the generating configuration.
  m.input_lo = {ds.config.snr_db_min, ds.config.rate_min,
                static_cast<double>(ds.config.k_min), ds.config.waist_min};
  m.input_hi = {ds.config.snr_db_max, ds.config.rate_max,
                static_cast<double>(ds.config.k_max), ds.config.waist_max};

  CounterRng rng(tc.seed, 0xF17Eull);
  const auto& ls = m.layer_sizes;
  for (std::size_t l = 0; l + 1 < ls.size(); ++l) {
    const int fan_in = ls[l];
    const int fan_out = ls[l + 1];
    const double limit = std::sqrt(3.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }

  auto train_set = ds.subset(SampleSplit::Train);
  auto val_set = ds.subset(SampleSplit::Validation);
  if (train_set.empty()) train_set = ds.samples;
  if (val_set.empty()) val_set = train_set;
  const Batch tr = make_matrix(m, train_set);
  const Batch va = make_matrix(m, val_set);

  AdamState adam;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    adam.mw.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
    adam.vw.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
    adam.mb.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
    adam.vb.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
  }
  auto adam_update = [&](auto& theta, const auto& g, auto& mm, auto& vv) {
    mm = tc.adam_beta1 * mm + (1.0 - tc.adam_beta1) * g;
    vv = (tc.adam_beta2 * vv.array() + (1.0 - tc.adam_beta2) * g.array().square()).matrix();
    const double bc1 = 1.0 - std::pow(tc.adam_beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(tc.adam_beta2, static_cast<double>(adam.step));
    theta.array() -=
        tc.learning_rate * (mm.array() / bc1) / ((vv.array() / bc2).sqrt() + tc.adam_eps);
  };

  const Eigen::Index n_train = tr.x.cols();
  const Eigen::Index batch = std::min<Eigen::Index>(tc.batch_size, n_train);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  for (Eigen::Index i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Eigen::MatrixXd> best_w = m.weights;
  std::vector<Eigen::VectorXd> best_b = m.biases;
  int best_epoch = 0;
  int bad_epochs = 0;

  Eigen::MatrixXd xb(4, batch), tb(1, batch);
  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    // Fisher-Yates with the deterministic stream.
    for (Eigen::Index i = n_train - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng.bits64() %
                                               static_cast<std::uint64_t>(i + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index start = 0; start + batch <= n_train; start += batch) {
      for (Eigen::Index i = 0; i < batch; ++i) {
        xb.col(i) = tr.x.col(order[static_cast<std::size_t>(start + i)]);
        tb.col(i) = tr.t.col(order[static_cast<std::size_t>(start + i)]);
      }
      // Forward.
      Eigen::MatrixXd z1 = (m.weights[0] * xb).colwise() + m.biases[0];
      Eigen::MatrixXd a1 = elu_mat(z1);
      Eigen::MatrixXd z2 = (m.weights[1] * a1).colwise() + m.biases[1];
      Eigen::MatrixXd a2 = elu_mat(z2);
      Eigen::MatrixXd z3 = (m.weights[2] * a2).colwise() + m.biases[2];
      Eigen::MatrixXd y = m.elu_output ? elu_mat(z3) : z3;
      // Backward (MSE).
      Eigen::MatrixXd dy = (2.0 / static_cast<double>(batch)) * (y - tb);
      Eigen::MatrixXd dz3 =
          m.elu_output ? (dy.array() * elu_grad_mat(z3).array()).matrix() : dy;
      Eigen::MatrixXd dw3 = dz3 * a2.transpose();
      Eigen::VectorXd db3 = dz3.rowwise().sum();
      Eigen::MatrixXd dz2 =
          ((m.weights[2].transpose() * dz3).array() * elu_grad_mat(z2).array()).matrix();
      Eigen::MatrixXd dw2 = dz2 * a1.transpose();
      Eigen::VectorXd db2 = dz2.rowwise().sum();
      Eigen::MatrixXd dz1 =
          ((m.weights[1].transpose() * dz2).array() * elu_grad_mat(z1).array()).matrix();
      Eigen::MatrixXd dw1 = dz1 * xb.transpose();
      Eigen::VectorXd db1 = dz1.rowwise().sum();

      ++adam.step;
      adam_update(m.weights[0], dw1, adam.mw[0], adam.vw[0]);
      adam_update(m.weights[1], dw2, adam.mw[1], adam.vw[1]);
      adam_update(m.weights[2], dw3, adam.mw[2], adam.vw[2]);
      adam_update(m.biases[0], db1, adam.mb[0], adam.vb[0]);
      adam_update(m.biases[1], db2, adam.mb[1], adam.vb[1]);
      adam_update(m.biases[2], db3, adam.mb[2], adam.vb[2]);
    }

    const double val = mse_on(m, va);
    if (!std::isfinite(val)) throw ConvergenceError("train: loss diverged");
    m.epochs_run = epoch;
    if (val < best_val - 1e-12) {
      best_val = val;
      best_w = m.weights;
      best_b = m.biases;
      best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs >= tc.patience) {
      break;
    }
  }

  m.weights = best_w;
  m.biases = best_b;
  (void)best_epoch;  // epochs_run reports epochs executed, not the best one
  m.train_mse = mse_on(m, tr);
  m.val_mse = mse_on(m, va);
  return m;
}

double predict_outage(const SurrogateModel& m, double snr_db, double rate, double k,
                      double waist, bool* extrapolated) {
  const double y = m.predict_transformed(snr_db, rate, k, waist, extrapolated);
  return target_to_outage(y);
}

double evaluate_mse(const SurrogateModel& m, const std::vector<Sample>& set) {
  if (set.empty()) throw std::invalid_argument("evaluate_mse: empty sample set");
  return mse_on(m, make_matrix(m, set));
}

void save_model_json(const SurrogateModel& m, const std::string& path) {
  json j;
  j["layer_sizes"] = m.layer_sizes;
  j["activation"] = {{"hidden", "elu"}, {"output", m.elu_output ? "elu" : "identity"}};
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(m.weights[l].size()));
    for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) w.push_back(m.weights[l](r, c));
    weights.push_back(w);
    std::vector<double> b(m.biases[l].data(), m.biases[l].data() + m.biases[l].size());
    biases.push_back(b);
  }
  j["weights"] = weights;
  j["biases"] = biases;
  j["normalization"] = {{"lo", m.input_lo}, {"hi", m.input_hi}};
  j["metadata"] = {{"seed", m.seed},
                   {"epochs_run", m.epochs_run},
                   {"train_mse", m.train_mse},
                   {"val_mse", m.val_mse},
                   {"version", kVersion}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

SurrogateModel load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  in >> j;
  SurrogateModel m;
  m.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  m.elu_output = j.at("activation").at("output").get<std::string>() == "elu";
  const auto& jw = j.at("weights");
  const auto& jb = j.at("biases");
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(m.layer_sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(m.layer_sizes[l]);
    const auto w = jw.at(l).get<std::vector<double>>();
    const auto b = jb.at(l).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != rows)
      throw std::runtime_error("model file has inconsistent shapes");
    Eigen::MatrixXd wm(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        wm(r, c) = w[static_cast<std::size_t>(r * cols + c)];
    m.weights.push_back(std::move(wm));
    m.biases.push_back(
        Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
  }
  const auto lo = j.at("normalization").at("lo").get<std::vector<double>>();
  const auto hi = j.at("normalization").at("hi").get<std::vector<double>>();
  std::copy(lo.begin(), lo.end(), m.input_lo.begin());
  std::copy(hi.begin(), hi.end(), m.input_hi.begin());
  const auto& meta = j.at("metadata");
  m.seed = meta.value("seed", 0ull);
  m.epochs_run = meta.value("epochs_run", 0);
  m.train_mse = meta.value("train_mse", 0.0);
  m.val_mse = meta.value("val_mse", 0.0);
  return m;
}

}  // namespace thzharq
