#include <cstdio>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"
#include "kanlm/loadmodels.hpp"
#include "kanlm/rng.hpp"
#include "kanlm/train.hpp"

namespace kanlmcli {

using namespace kanlm;

namespace {

struct CompareArgs {
  std::uint64_t seed = 0;
  std::string train_csv, val_csv, test_csv, out;
  std::string inputs = "V,f";
  int bo_budget = 0;
  int max_iters = 500;
  double v0 = 1.0;
};

struct MethodResult {
  bool failed = false;
  std::string error;
  std::map<Channel, Metrics> norm, phys;
};

const Channel kTargets[] = {Channel::P, Channel::Q};

Metrics metrics_norm(const std::vector<double>& pred, const std::vector<double>& actual,
                     const ChannelStats& ts) {
  std::vector<double> zp, za;
  zp.reserve(pred.size());
  za.reserve(actual.size());
  for (double v : pred) zp.push_back(zscore_apply(ts, v));
  for (double v : actual) za.push_back(zscore_apply(ts, v));
  return metrics(zp, za);
}

Dataset with_contract(const Dataset& d, const std::vector<Channel>& inputs, Channel target) {
  Dataset out = d;
  out.inputs = inputs;
  out.target = target;
  return out;
}

void run_compare(const CompareArgs& a) {
  Dataset train_data = read_csv(a.train_csv, Role::Train);
  Dataset val_data = read_csv(a.val_csv, Role::Validation);
  Dataset test_data = read_csv(a.test_csv, Role::Test);
  const std::vector<Channel> inputs = parse_channel_list(a.inputs);

  std::map<Channel, ChannelStats> ts;
  std::map<Channel, std::vector<double>> actual;
  for (Channel ch : kTargets) {
    ts[ch] = zscore_fit(train_data, {ch}).at(ch);
    actual[ch] = channel_values(test_data, ch);
  }

  auto score = [&](MethodResult& r, Channel ch, const std::vector<double>& pred_phys) {
    r.phys[ch] = metrics(pred_phys, actual[ch]);
    r.norm[ch] = metrics_norm(pred_phys, actual[ch], ts[ch]);
  };

  const char* labels[] = {"KAN", "MLP", "ZIP", "Exponential"};
  const char* keys[] = {"kan", "mlp", "zip", "exponential"};
  MethodResult results[4];

  // KAN: trained per target, optionally after a BO hyperparameter search.
  try {
    MethodResult& r = results[0];
    for (int idx = 0; idx < 2; ++idx) {
      const Channel ch = kTargets[idx];
      Dataset tr = with_contract(train_data, inputs, ch);
      Dataset va = with_contract(val_data, inputs, ch);
      TrainConfig cfg;
      cfg.lbfgs.max_iters = a.max_iters;
      cfg.seed = Rng::derive(a.seed, idx + 1);
      TrainResult res;
      if (a.bo_budget > 0)
        res = tune_kan(tr, va, cfg, a.bo_budget, Rng::derive(a.seed, 50 + idx)).best;
      else
        res = train(tr, va, cfg);
      Dataset te = with_contract(test_data, inputs, ch);
      std::vector<double> z = predict(res.net, input_matrix(zscore_apply(res.stats, te)));
      std::vector<double> phys;
      phys.reserve(z.size());
      for (double v : z) phys.push_back(zscore_invert(res.stats.at(ch), v));
      score(r, ch, phys);
    }
  } catch (const std::exception& e) {
    results[0] = {true, e.what(), {}, {}};
  }

  try {
    MethodResult& r = results[1];
    for (int idx = 0; idx < 2; ++idx) {
      const Channel ch = kTargets[idx];
      Dataset tr = with_contract(train_data, inputs, ch);
      Dataset va = with_contract(val_data, inputs, ch);
      LbfgsConfig lcfg;
      lcfg.max_iters = a.max_iters;
      MlpResult res = mlp_baseline(tr, va, lcfg, Rng::derive(a.seed, 10 + idx));
      Dataset te = with_contract(test_data, inputs, ch);
      std::vector<double> z = mlp_predict(res.model, input_matrix(zscore_apply(res.stats, te)));
      std::vector<double> phys;
      phys.reserve(z.size());
      for (double v : z) phys.push_back(zscore_invert(res.stats.at(ch), v));
      score(r, ch, phys);
    }
  } catch (const std::exception& e) {
    results[1] = {true, e.what(), {}, {}};
  }

  try {
    MethodResult& r = results[2];
    ZipParams p = fit_zip_ls(train_data, a.v0);
    std::vector<double> pp, pq;
    for (const Sample& s : test_data.samples) {
      auto [vp, vq] = zip_eval(p, s.v);
      pp.push_back(vp);
      pq.push_back(vq);
    }
    score(r, Channel::P, pp);
    score(r, Channel::Q, pq);
  } catch (const std::exception& e) {
    results[2] = {true, e.what(), {}, {}};
  }

  try {
    MethodResult& r = results[3];
    ExpParams p = fit_exp_ls(train_data, a.v0);
    std::vector<double> pp, pq;
    for (const Sample& s : test_data.samples) {
      auto [vp, vq] = exp_eval(p, s.v);
      pp.push_back(vp);
      pq.push_back(vq);
    }
    score(r, Channel::P, pp);
    score(r, Channel::Q, pq);
  } catch (const std::exception& e) {
    results[3] = {true, e.what(), {}, {}};
  }

  std::string table;
  table += "                 -------- Active Power (P) --------"
           "  ------- Reactive Power (Q) -------\n";
  table += "Model                  MSE       RMSE        MAE   "
           "       MSE       RMSE        MAE\n";
  for (int m = 0; m < 4; ++m) {
    char line[256];
    if (results[m].failed) {
      std::snprintf(line, sizeof(line), "%-15s  FAILED: %s\n", labels[m],
                    results[m].error.c_str());
    } else {
      const Metrics& p = results[m].norm[Channel::P];
      const Metrics& q = results[m].norm[Channel::Q];
      std::snprintf(line, sizeof(line),
                    "%-15s %10.6f %10.6f %10.6f   %10.6f %10.6f %10.6f\n", labels[m], p.mse,
                    p.rmse, p.mae, q.mse, q.rmse, q.mae);
    }
    table += line;
  }
  std::fputs(table.c_str(), stdout);

  std::string rep;
  rep += "# kanlm compare report. Metrics with suffix _norm are z-scored with\n";
  rep += "# the training split's target statistics; _phys are physical units.\n";
  rep += "command=compare\n";
  rep += "seed=" + std::to_string(a.seed) + "\n";
  rep += "bo_budget=" + std::to_string(a.bo_budget) + "\n";
  for (int m = 0; m < 4; ++m) {
    rep += "\n";
    rep += std::string("method=") + keys[m] + "\n";
    rep += std::string(keys[m]) + "_failed=" + (results[m].failed ? "1" : "0") + "\n";
    if (results[m].failed) {
      rep += std::string(keys[m]) + "_error=" + results[m].error + "\n";
      continue;
    }
    for (Channel ch : kTargets) {
      const std::string base = std::string(keys[m]) + "_" + channel_name(ch);
      const Metrics& n = results[m].norm[ch];
      const Metrics& p = results[m].phys[ch];
      rep += base + "_mse_norm=" + fmt_g(n.mse) + "\n";
      rep += base + "_rmse_norm=" + fmt_g(n.rmse) + "\n";
      rep += base + "_mae_norm=" + fmt_g(n.mae) + "\n";
      rep += base + "_mse_phys=" + fmt_g(p.mse) + "\n";
      rep += base + "_rmse_phys=" + fmt_g(p.rmse) + "\n";
      rep += base + "_mae_phys=" + fmt_g(p.mae) + "\n";
    }
  }

  ensure_dir(a.out);
  write_text_file(a.out + "/compare_table.txt", table);
  write_text_file(a.out + "/compare_report.txt", rep);
  std::printf("wrote %s/compare_report.txt\n", a.out.c_str());
}

}  // namespace

void register_compare(CLI::App& app) {
  auto args = std::make_shared<CompareArgs>();
  CLI::App* sub = app.add_subcommand(
      "compare", "Benchmark KAN against MLP, ZIP and exponential fits on one split");
  sub->add_option("--seed", args->seed, "Master seed; every method derives its own stream")
      ->required();
  sub->add_option("--train", args->train_csv, "Training CSV")->required();
  sub->add_option("--val", args->val_csv, "Validation CSV")->required();
  sub->add_option("--test", args->test_csv, "Test CSV")->required();
  sub->add_option("--out", args->out, "Output directory")->required();
  sub->add_option("--inputs", args->inputs, "Comma-separated input channels for KAN and MLP")
      ->default_str("V,f");
  sub->add_option("--bo-budget", args->bo_budget, "BO trials for the KAN method (0 disables)");
  sub->add_option("--max-iters", args->max_iters, "LBFGS iteration cap");
  sub->add_option("--v0", args->v0, "Nominal voltage for the ZIP and exponential fits")
      ->default_str("1");
  sub->callback([args] { run_compare(*args); });
}

}  // namespace kanlmcli
