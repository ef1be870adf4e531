#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softclik/dataset.hpp"
#include "softclik/neuralop.hpp"

namespace softclik {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 32;
  double lr0 = 1e-3;
  double lr_final = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Geometric interpolation from lr0 (epoch 0) to lr_final (epoch == epochs).
double lr_at(const TrainConfig& cfg, int epoch);

/// One Adam update; t is the 1-based step count for bias correction, m and v
/// the running moment estimates (same shapes as the parameters).
void adam_step(MlpParams& p, const MlpGrads& g, MlpGrads& m, MlpGrads& v, std::int64_t t,
               double lr, double beta1, double beta2, double eps);

/// Sets the network's normalization from the generation box (inputs to
/// [-1,1]^m) and the training targets (per-coordinate standardization).
/// Rejects training data outside the box.
void fit_normalization(OperatorNet& net, const Dataset& train_ds,
                       const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  OperatorNet net;  // parameters of the best-validation epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_mse = 0.0;
};

/// Minibatch Adam over per-node examples (q_a, s_k, point_k) — every grid
/// node of every sample is one training triple. Seeded shuffle per epoch;
/// validation MSE after each epoch selects the returned parameters.
TrainResult train(OperatorNet net, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg);

struct Metrics {
  double mse_normalized = 0.0;
  double mse_physical = 0.0;
  double l2_relative = 0.0;  // mean over samples of ||pred - true|| / ||true||
};

Metrics evaluate(const OperatorNet& net, const Dataset& ds);

void save_checkpoint(const OperatorNet& net, const std::string& path);
OperatorNet load_checkpoint(const std::string& path);

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);

}  // namespace softclik
