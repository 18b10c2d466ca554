#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "findbench/numeric_expr.hpp"

namespace findbench {

// Two-layer ReLU network y = w2 . max(0, w1 x + b1) + b2, trained on
// standardized inputs/targets; forward() de-standardizes.
struct MlpWeights {
  int hidden = 64;
  std::vector<double> w1;  // hidden
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  double x_mean = 0.0, x_std = 1.0;
  double y_mean = 0.0, y_std = 1.0;

  int epochs_run = 0;
  double train_nmse = 0.0;
};

struct MlpTrainOptions {
  int hidden = 64;
  int epochs = 10000;
  int sample_count = 10000;
  double learning_rate = 1e-3;
  double early_stop_nmse = 1e-6;  // checked every 100 epochs
  double domain_lo = -100.0;
  double domain_hi = 100.0;
};

// Trains on points uniformly sampled from the defined subset of the
// domain; undefined targets are dropped. Throws std::runtime_error when
// fewer than 100 sampled points are defined. Single-threaded and
// bit-reproducible for a fixed (expr, seed, options) on one platform.
MlpWeights train_approximation(const NumericExpr& expr, std::uint64_t seed,
                               const MlpTrainOptions& opts = {});

// Pure, total forward pass (extrapolates outside the training domain).
double mlp_forward(const MlpWeights& net, double x);

// NMSE of the net against targets reproduced from (expr, seed, options);
// the recomputation the stored train_nmse must match.
double recompute_train_nmse(const MlpWeights& net, const NumericExpr& expr, std::uint64_t seed,
                            const MlpTrainOptions& opts = {});

void save_mlp(const MlpWeights& net, const std::string& path);
MlpWeights load_mlp(const std::string& path);

}  // namespace findbench
