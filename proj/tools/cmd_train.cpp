#include <cstdio>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"
#include "kanlm/model_io.hpp"
#include "kanlm/rng.hpp"
#include "kanlm/train.hpp"

namespace kanlmcli {

using namespace kanlm;

namespace {

struct TrainArgs {
  std::uint64_t seed = 0;
  std::string train_csv, val_csv, out;
  std::string target = "both";
  std::string inputs = "V,f";
  std::string widths;  // empty keeps the [n_in, 2, 1] default
  int grid = 5;
  int degree = 3;
  double reg = 1e-3;
  double prune = 0.02;
  int finetune = 100;
  int max_iters = 500;
  int bo_budget = 0;
};

std::vector<Channel> targets_from_flag(const std::string& flag) {
  if (flag == "P") return {Channel::P};
  if (flag == "Q") return {Channel::Q};
  if (flag == "both") return {Channel::P, Channel::Q};
  throw InvalidInput("unknown --target '" + flag + "', expected P, Q or both");
}

void append_metrics(std::string& rep, const std::string& prefix, const Metrics& m) {
  rep += prefix + "_mse=" + fmt_g(m.mse) + "\n";
  rep += prefix + "_rmse=" + fmt_g(m.rmse) + "\n";
  rep += prefix + "_mae=" + fmt_g(m.mae) + "\n";
}

void append_bo_ledger(std::string& rep, const BoResult& bo) {
  for (std::size_t k = 0; k < bo.ledger.size(); ++k) {
    const BoTrial& t = bo.ledger[k];
    for (const auto& [name, value] : t.point)
      rep += "bo_" + std::to_string(k) + "_" + name + "=" + fmt_g(value) + "\n";
    rep += "bo_" + std::to_string(k) + "_failed=" + (t.failed ? "1" : "0") + "\n";
    rep += "bo_" + std::to_string(k) + "_objective=" + fmt_g(t.objective) + "\n";
  }
  rep += "bo_best_objective=" + fmt_g(bo.best_objective) + "\n";
}

void write_loss_csv(const std::string& path, const TrainReport& r) {
  std::string out = "iter,stage,loss\n";
  std::size_t stage = 0;
  for (std::size_t i = 0; i < r.loss_history.size(); ++i) {
    while (stage + 1 < r.stage_offsets.size() &&
           static_cast<int>(i) >= r.stage_offsets[stage + 1])
      ++stage;
    out += std::to_string(i) + "," + std::to_string(stage) + "," + fmt_g(r.loss_history[i]) +
           "\n";
  }
  write_text_file(path, out);
}

void run_train(const TrainArgs& a) {
  Dataset train_data = read_csv(a.train_csv, Role::Train);
  Dataset val_data = read_csv(a.val_csv, Role::Validation);
  const std::vector<Channel> inputs = parse_channel_list(a.inputs);
  const std::vector<Channel> targets = targets_from_flag(a.target);

  ensure_dir(a.out);
  ModelFile model;
  model.inputs = inputs;

  std::string rep;
  rep += "# kanlm train report: one key=value block per target.\n";
  rep += "# Metrics with suffix _norm are in the z-score space of the training\n";
  rep += "# target; _phys metrics are in original physical units.\n";
  rep += "command=train\n";
  rep += "seed=" + std::to_string(a.seed) + "\n";
  rep += "inputs=" + channel_list_name(inputs) + "\n";
  rep += "bo_budget=" + std::to_string(a.bo_budget) + "\n";

  for (std::size_t idx = 0; idx < targets.size(); ++idx) {
    const Channel ch = targets[idx];
    Dataset tr = train_data;
    tr.inputs = inputs;
    tr.target = ch;
    Dataset va = val_data;
    va.inputs = inputs;
    va.target = ch;

    TrainConfig cfg;
    if (!a.widths.empty()) cfg.widths = parse_int_list(a.widths);
    cfg.grid_intervals = a.grid;
    cfg.degree = a.degree;
    cfg.reg_weight = a.reg;
    cfg.prune_threshold = a.prune;
    cfg.finetune_iters = a.finetune;
    cfg.lbfgs.max_iters = a.max_iters;
    cfg.seed = Rng::derive(a.seed, idx + 1);

    rep += "\n";
    rep += std::string("target=") + channel_name(ch) + "\n";

    TrainResult res;
    if (a.bo_budget > 0) {
      TuneResult tune = tune_kan(tr, va, cfg, a.bo_budget, Rng::derive(a.seed, 50 + idx));
      res = std::move(tune.best);
      rep += "widths=" + int_list_name(tune.best_cfg.widths) + "\n";
      rep += "grid=" + std::to_string(tune.best_cfg.grid_intervals) + "\n";
      rep += "reg_weight=" + fmt_g(tune.best_cfg.reg_weight) + "\n";
      rep += "prune_threshold=" + fmt_g(tune.best_cfg.prune_threshold) + "\n";
      append_bo_ledger(rep, tune.bo);
    } else {
      res = train(tr, va, cfg);
      rep += "widths=" +
             int_list_name(cfg.widths.empty() ? std::vector<int>{static_cast<int>(inputs.size()),
                                                                 2, 1}
                                              : cfg.widths) +
             "\n";
      rep += "grid=" + std::to_string(cfg.grid_intervals) + "\n";
      rep += "reg_weight=" + fmt_g(cfg.reg_weight) + "\n";
      rep += "prune_threshold=" + fmt_g(cfg.prune_threshold) + "\n";
    }

    const TrainReport& r = res.report;
    rep += "iterations=" + std::to_string(r.iterations) + "\n";
    rep += std::string("reason=") + stop_reason_name(r.reason) + "\n";
    rep += "wolfe_failures=" + std::to_string(r.wolfe_failures) + "\n";
    rep += "grid_refits=" + std::to_string(r.grid_refits) + "\n";
    rep += std::string("pruned=") + (r.pruned ? "1" : "0") + "\n";
    rep += "final_widths=" + int_list_name(r.final_widths) + "\n";
    append_metrics(rep, "train_norm", r.train_norm);
    append_metrics(rep, "val_norm", r.val_norm);
    append_metrics(rep, "val_phys", r.val_phys);

    for (const auto& [sc, st] : res.stats.channels) model.stats.channels[sc] = st;
    model.targets[ch] = std::move(res.net);
    write_loss_csv(a.out + "/loss_" + channel_name(ch) + ".csv", r);
    std::printf("target %s: reason=%s iterations=%d val_norm_mse=%.6g\n", channel_name(ch),
                stop_reason_name(r.reason), r.iterations, r.val_norm.mse);
  }

  write_model(a.out + "/model.txt", model);
  write_text_file(a.out + "/train_report.txt", rep);
  std::printf("wrote %s/model.txt\n", a.out.c_str());
}

}  // namespace

void register_train(CLI::App& app) {
  auto args = std::make_shared<TrainArgs>();
  CLI::App* sub =
      app.add_subcommand("train", "Fit KAN load models to train/validation CSV splits");
  sub->add_option("--seed", args->seed, "Master seed for network init and BO")->required();
  sub->add_option("--train", args->train_csv, "Training CSV")->required();
  sub->add_option("--val", args->val_csv, "Validation CSV")->required();
  sub->add_option("--out", args->out, "Output directory (model.txt, train_report.txt, loss CSVs)")
      ->required();
  sub->add_option("--target", args->target, "P, Q or both")->default_str("both");
  sub->add_option("--inputs", args->inputs, "Comma-separated input channels")->default_str("V,f");
  sub->add_option("--widths", args->widths, "Layer widths, e.g. 2,2,1 (default n_in,2,1)");
  sub->add_option("--grid", args->grid, "Spline grid intervals")->default_str("5");
  sub->add_option("--degree", args->degree, "Spline degree")->default_str("3");
  sub->add_option("--reg", args->reg, "Sparsity regularization weight")->default_str("1e-3");
  sub->add_option("--prune-threshold", args->prune,
                  "Edge importance cutoff for the prune pass (0 disables)")
      ->default_str("0.02");
  sub->add_option("--finetune", args->finetune, "LBFGS iterations after pruning");
  sub->add_option("--max-iters", args->max_iters, "LBFGS iteration cap per stage");
  sub->add_option("--bo-budget", args->bo_budget,
                  "Bayesian-optimization trials before the final fit (0 disables)");
  sub->callback([args] { run_train(*args); });
}

}  // namespace kanlmcli
