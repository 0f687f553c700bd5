#include "kanlm/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kanlm/errors.hpp"

namespace kanlm {

Metrics metrics(const std::vector<double>& pred, const std::vector<double>& actual) {
  if (pred.empty()) throw InvalidInput("metrics: empty input");
  if (pred.size() != actual.size()) throw InvalidInput("metrics: length mismatch");
  Metrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - actual[i];
    m.mse += e * e;
    m.mae += std::fabs(e);
  }
  m.mse /= static_cast<double>(pred.size());
  m.mae /= static_cast<double>(pred.size());
  m.rmse = std::sqrt(m.mse);
  return m;
}

std::vector<double> predict(const KanNetwork& net, const std::vector<std::vector<double>>& inputs) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(network_forward(net, x).front());
  return out;
}

namespace {

// Range of the values entering each layer over the batch: element 0 is the
// input range, element l > 0 the range of hidden node values feeding layer l.
std::vector<Interval> layer_input_ranges(const KanNetwork& net,
                                         const std::vector<std::vector<double>>& inputs) {
  const std::size_t n_layers = net.layers.size();
  std::vector<Interval> ranges(n_layers, Interval{std::numeric_limits<double>::infinity(),
                                                  -std::numeric_limits<double>::infinity()});
  for (const auto& x : inputs) {
    std::vector<double> act = x;
    for (std::size_t l = 0; l < n_layers; ++l) {
      for (double v : act) {
        ranges[l].lo = std::min(ranges[l].lo, v);
        ranges[l].hi = std::max(ranges[l].hi, v);
      }
      act = layer_forward(net.layers[l], act);
    }
  }
  return ranges;
}

// Expands any grid whose layer saw values outside its domain; returns the
// number of layers touched.
int expand_grids(KanNetwork& net, const std::vector<Interval>& observed) {
  int refits = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    KanLayer& layer = net.layers[l];
    if (layer.edges.empty()) continue;
    const KnotGrid& g0 = layer.edges.front().grid;
    const double lo = std::min(g0.domain_lo, observed[l].lo);
    const double hi = std::max(g0.domain_hi, observed[l].hi);
    if (lo >= g0.domain_lo && hi <= g0.domain_hi) continue;
    ++refits;
    for (ActivationEdge& e : layer.edges) {
      if (e.pruned || e.fixed) continue;
      KnotGrid ng = make_grid(lo, hi, e.grid.intervals, e.grid.degree);
      const int samples = std::max(4 * ng.basis_count(), 64);
      e.coeffs = refit_grid(e.grid, e.coeffs, ng, samples);
      e.grid = ng;
    }
  }
  return refits;
}

struct Stage {
  LbfgsReport report;
};

// Runs one LBFGS stage over the spline parameters, leaving the best
// parameters in the network, and appends to the combined report.
void run_stage(KanNetwork& net, const std::vector<std::vector<double>>& X,
               const std::vector<std::vector<double>>& Y, double reg_weight,
               const LbfgsConfig& lcfg, TrainReport& report) {
  Objective obj = [&](const std::vector<double>& p, std::vector<double>& grad) {
    unpack(net, p);
    LossGrad lg = network_backward(net, X, Y, reg_weight);
    grad = std::move(lg.grad);
    return lg.loss;
  };
  LbfgsResult res = lbfgs_minimize(obj, pack(net), lcfg);
  unpack(net, res.x);
  report.stage_offsets.push_back(static_cast<int>(report.loss_history.size()));
  report.loss_history.insert(report.loss_history.end(), res.report.loss_history.begin(),
                             res.report.loss_history.end());
  report.iterations += res.report.iterations;
  report.wolfe_failures += res.report.wolfe_failures;
  report.reason = res.report.reason;
}

}  // namespace

TrainResult train(const Dataset& train_data, const Dataset& val_data, const TrainConfig& cfg) {
  validate_dataset(train_data);
  validate_dataset(val_data);
  if (train_data.inputs != val_data.inputs || train_data.target != val_data.target)
    throw InvalidInput("train: train/validation channel contracts differ");
  if (cfg.grid_intervals < 1 || cfg.degree < 0) throw InvalidInput("train: bad grid settings");
  if (cfg.hidden_domain <= 0.0) throw InvalidInput("train: hidden_domain must be positive");

  const int n_in = static_cast<int>(train_data.inputs.size());
  std::vector<int> widths = cfg.widths.empty() ? std::vector<int>{n_in, 2, 1} : cfg.widths;
  if (widths.front() != n_in)
    throw InvalidInput("train: widths[0] must equal the input channel count");
  if (widths.back() != 1) throw InvalidInput("train: single-target network needs widths back 1");

  // Normalization comes from the training split alone.
  NormStats stats = zscore_fit(train_data);
  Dataset norm_train = zscore_apply(stats, train_data);
  Dataset norm_val = zscore_apply(stats, val_data);

  const auto X = input_matrix(norm_train);
  std::vector<std::vector<double>> Y;
  Y.reserve(norm_train.samples.size());
  for (double y : target_vector(norm_train)) Y.push_back({y});

  // Input-layer grids span the observed normalized inputs plus a 10%
  // margin, so evaluation points slightly outside the training range still
  // land on spline support instead of the bare silu tail. Hidden layers
  // start at +-hidden_domain and are expanded between stages if needed.
  double in_lo = std::numeric_limits<double>::infinity();
  double in_hi = -in_lo;
  for (const auto& row : X)
    for (double v : row) {
      in_lo = std::min(in_lo, v);
      in_hi = std::max(in_hi, v);
    }
  const double margin = 0.1 * (in_hi - in_lo);
  std::vector<Interval> domains(widths.size() - 1, Interval{-cfg.hidden_domain, cfg.hidden_domain});
  domains.front() = Interval{in_lo - margin, in_hi + margin};

  Rng rng(cfg.seed);
  KanNetwork net = make_network(widths, cfg.grid_intervals, cfg.degree, domains, rng,
                                cfg.coeff_scale);

  TrainReport report;
  run_stage(net, X, Y, cfg.reg_weight, cfg.lbfgs, report);

  report.grid_refits = expand_grids(net, layer_input_ranges(net, X));
  if (report.grid_refits > 0) run_stage(net, X, Y, cfg.reg_weight, cfg.lbfgs, report);

  if (cfg.prune_threshold > 0.0) {
    KanNetwork pruned_net = prune(net, X, cfg.prune_threshold);
    bool changed = pruned_net.widths != net.widths;
    if (!changed)
      for (std::size_t l = 0; l < net.layers.size() && !changed; ++l)
        for (std::size_t e = 0; e < net.layers[l].edges.size() && !changed; ++e)
          changed = pruned_net.layers[l].edges[e].pruned != net.layers[l].edges[e].pruned;
    if (changed) {
      net = std::move(pruned_net);
      report.pruned = true;
      if (cfg.finetune_iters > 0) {
        // The penalty already did its job selecting the structure; polish
        // the surviving edges against the plain MSE.
        LbfgsConfig ft = cfg.lbfgs;
        ft.max_iters = cfg.finetune_iters;
        run_stage(net, X, Y, 0.0, ft, report);
      }
    }
  }

  report.final_widths = net.widths;

  const auto Xv = input_matrix(norm_val);
  const std::vector<double> pred_train = predict(net, X);
  const std::vector<double> pred_val = predict(net, Xv);
  report.train_norm = metrics(pred_train, target_vector(norm_train));
  report.val_norm = metrics(pred_val, target_vector(norm_val));

  const ChannelStats& ts = stats.at(val_data.target);
  std::vector<double> pred_phys;
  pred_phys.reserve(pred_val.size());
  for (double z : pred_val) pred_phys.push_back(zscore_invert(ts, z));
  report.val_phys = metrics(pred_phys, target_vector(val_data));

  return TrainResult{std::move(net), std::move(stats), std::move(report)};
}

namespace {

std::vector<int> arch_widths(int n_inputs, int arch) {
  switch (arch) {
    case 0: return {n_inputs, 1};
    case 1: return {n_inputs, 2, 1};
    case 2: return {n_inputs, 3, 1};
    case 3: return {n_inputs, 5, 1};
  }
  throw InvalidInput("config_from_bo_point: architecture index out of range");
}

constexpr int kGridTable[] = {3, 5, 8, 12};

}  // namespace

BoSpace make_kan_bo_space(int n_inputs) {
  if (n_inputs < 1) throw InvalidInput("make_kan_bo_space: need at least one input");
  BoSpace space;
  space.dims.push_back(BoDim{"arch", 0, 3, true, false});
  space.dims.push_back(BoDim{"grid", 0, 3, true, false});
  space.dims.push_back(BoDim{"reg_weight", 1e-6, 1e-2, false, true});
  space.dims.push_back(BoDim{"prune_threshold", 1e-3, 1e-1, false, true});
  return space;
}

TrainConfig config_from_bo_point(const BoPoint& p, const TrainConfig& base, int n_inputs) {
  TrainConfig cfg = base;
  const int arch = static_cast<int>(std::nearbyint(p.at("arch")));
  const int grid = static_cast<int>(std::nearbyint(p.at("grid")));
  if (grid < 0 || grid > 3) throw InvalidInput("config_from_bo_point: grid index out of range");
  cfg.widths = arch_widths(n_inputs, arch);
  cfg.grid_intervals = kGridTable[grid];
  cfg.reg_weight = p.at("reg_weight");
  cfg.prune_threshold = p.at("prune_threshold");
  return cfg;
}

TuneResult tune_kan(const Dataset& train_data, const Dataset& val_data, const TrainConfig& base,
                    int budget, std::uint64_t seed) {
  const int n_in = static_cast<int>(train_data.inputs.size());
  BoSpace space = make_kan_bo_space(n_in);

  TuneResult out;
  double stash_obj = std::numeric_limits<double>::infinity();

  BoObjective obj = [&](const BoPoint& p, int trial) {
    TrainConfig cfg = config_from_bo_point(p, base, n_in);
    cfg.seed = Rng::derive(seed, 100 + static_cast<std::uint64_t>(trial));
    TrainResult res = train(train_data, val_data, cfg);
    const double score = res.report.val_norm.mse;
    if (score < stash_obj) {
      stash_obj = score;
      out.best_cfg = cfg;
      out.best = std::move(res);
    }
    return score;
  };

  out.bo = bayes_opt(space, obj, budget, std::min(budget, 6), seed);
  return out;
}

}  // namespace kanlm
