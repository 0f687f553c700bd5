#pragma once

#include <cstdint>
#include <vector>

#include "kanlm/bayesopt.hpp"
#include "kanlm/dataset.hpp"
#include "kanlm/kan.hpp"
#include "kanlm/lbfgs.hpp"

namespace kanlm {

struct Metrics {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
};

Metrics metrics(const std::vector<double>& pred, const std::vector<double>& actual);

struct TrainConfig {
  std::vector<int> widths;  // empty selects [n_in, 2, 1]
  int grid_intervals = 5;
  int degree = 3;
  double reg_weight = 1e-3;
  LbfgsConfig lbfgs;
  double prune_threshold = 0.02;  // 0 disables the prune pass
  int finetune_iters = 100;      // LBFGS budget after pruning
  double hidden_domain = 2.5;    // initial grid half-width on hidden layers
  double coeff_scale = 0.1;
  std::uint64_t seed = 1;
};

struct TrainReport {
  // Concatenated loss histories of the LBFGS stages; stage_offsets[i] is
  // the index where stage i starts.
  std::vector<double> loss_history;
  std::vector<int> stage_offsets;
  int iterations = 0;
  StopReason reason = StopReason::MaxIters;
  int wolfe_failures = 0;
  int grid_refits = 0;
  bool pruned = false;
  std::vector<int> final_widths;
  Metrics train_norm;  // in the z-score space of the training target
  Metrics val_norm;
  Metrics val_phys;  // physical units
};

struct TrainResult {
  KanNetwork net;
  NormStats stats;
  TrainReport report;
};

// Fig-style staged pipeline: z-score from the training split only, seeded
// network, LBFGS, grid-domain expansion plus a second LBFGS pass when
// hidden activations leave the initial domain, then optional prune and
// fine-tune. Validation data is only ever evaluated, never fitted.
TrainResult train(const Dataset& train_data, const Dataset& val_data, const TrainConfig& cfg);

std::vector<double> predict(const KanNetwork& net, const std::vector<std::vector<double>>& inputs);

// Hyperparameter search space: architecture index over
// {[k,1],[k,2,1],[k,3,1],[k,5,1]}, grid index over {3,5,8,12}, and
// log-scale reg_weight / prune_threshold.
BoSpace make_kan_bo_space(int n_inputs);
TrainConfig config_from_bo_point(const BoPoint& p, const TrainConfig& base, int n_inputs);

struct TuneResult {
  BoResult bo;
  TrainConfig best_cfg;
  TrainResult best;
};

// Bayesian-optimizes the KAN hyperparameters against validation MSE
// (normalized). Each trial trains with seed derive(seed, 100 + trial).
TuneResult tune_kan(const Dataset& train_data, const Dataset& val_data, const TrainConfig& base,
                    int budget, std::uint64_t seed);

}  // namespace kanlm
