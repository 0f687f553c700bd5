#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"
#include "kanlm/expr.hpp"
#include "kanlm/model_io.hpp"
#include "kanlm/train.hpp"

namespace kanlmcli {

using namespace kanlm;

namespace {

struct EvalArgs {
  std::string data, out;
  std::string model_path, equations_path;
};

struct EquationsFile {
  NormStats stats;
  std::map<Channel, ExprPtr> targets;
};

EquationsFile parse_equations_file(const std::string& path) {
  EquationsFile out;
  std::istringstream ss(read_text_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash, key;
      ls >> hash >> key;
      if (key == "norm") {
        std::string ch;
        ChannelStats st;
        if (ls >> ch >> st.mean >> st.stddev) out.stats.channels[channel_from_name(ch)] = st;
      }
      continue;
    }
    ParsedEquation eq;
    try {
      eq = parse_equation(line);
    } catch (const InvalidInput& e) {
      throw InvalidInput(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    Channel ch = channel_from_name(eq.target);
    if (out.targets.count(ch))
      throw InvalidInput(path + " line " + std::to_string(line_no) + ": duplicate target " +
                         eq.target);
    out.targets[ch] = eq.expr;
  }
  if (out.targets.empty()) throw InvalidInput(path + ": no equations found");
  return out;
}

std::vector<double> eval_equation(const ExprPtr& expr, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    std::map<std::string, double> point{{"V", s.v}, {"f", s.f}};
    out.push_back(evaluate(expr, point));
  }
  return out;
}

std::vector<double> to_norm(const std::vector<double>& phys, const ChannelStats& st) {
  std::vector<double> out;
  out.reserve(phys.size());
  for (double v : phys) out.push_back(zscore_apply(st, v));
  return out;
}

void append_metrics(std::string& rep, const std::string& prefix, const Metrics& m) {
  rep += prefix + "_mse=" + fmt_g(m.mse) + "\n";
  rep += prefix + "_rmse=" + fmt_g(m.rmse) + "\n";
  rep += prefix + "_mae=" + fmt_g(m.mae) + "\n";
}

void run_eval(const EvalArgs& a) {
  if (a.model_path.empty() && a.equations_path.empty())
    throw InvalidInput("eval needs --model, --equations or both");
  Dataset data = read_csv(a.data, Role::Test);

  std::unique_ptr<ModelFile> model;
  std::unique_ptr<EquationsFile> eqs;
  if (!a.model_path.empty()) model = std::make_unique<ModelFile>(read_model(a.model_path));
  if (!a.equations_path.empty())
    eqs = std::make_unique<EquationsFile>(parse_equations_file(a.equations_path));

  std::vector<Channel> targets;
  if (model) {
    for (const auto& [ch, net] : model->targets) targets.push_back(ch);
    if (eqs)
      for (Channel ch : targets)
        if (!eqs->targets.count(ch))
          throw InvalidInput(std::string("equations file lacks target ") + channel_name(ch));
  } else {
    for (const auto& [ch, expr] : eqs->targets) targets.push_back(ch);
  }

  ensure_dir(a.out);
  std::string rep;
  rep += "# kanlm eval report. Metrics with suffix _norm use the z-score\n";
  rep += "# statistics stored with the model or equations (norm_source says\n";
  rep += "# which); _phys metrics are in original physical units.\n";
  rep += "command=eval\n";
  rep += std::string("predictor=") + (model ? (eqs ? "model+equations" : "model") : "equations") +
         "\n";

  std::vector<std::vector<double>> model_inputs;
  if (model) {
    Dataset with_contract = data;
    with_contract.inputs = model->inputs;
    model_inputs = input_matrix(zscore_apply(model->stats, with_contract));
  }

  for (Channel ch : targets) {
    const std::vector<double> actual = channel_values(data, ch);

    std::vector<double> pred_model_phys, pred_eq_phys;
    if (model) {
      const auto it = model->targets.find(ch);
      std::vector<double> norm_pred = predict(it->second, model_inputs);
      const ChannelStats& ts = model->stats.at(ch);
      pred_model_phys.reserve(norm_pred.size());
      for (double z : norm_pred) pred_model_phys.push_back(zscore_invert(ts, z));
    }
    if (eqs && eqs->targets.count(ch)) pred_eq_phys = eval_equation(eqs->targets.at(ch), data);

    const std::vector<double>& pred = model ? pred_model_phys : pred_eq_phys;

    // z-score convention: model stats win, then equations-file stats, then
    // statistics of the evaluation data itself.
    ChannelStats ts;
    std::string norm_source;
    if (model && model->stats.has(ch)) {
      ts = model->stats.at(ch);
      norm_source = "model";
    } else if (eqs && eqs->stats.has(ch)) {
      ts = eqs->stats.at(ch);
      norm_source = "equations";
    } else {
      ts = zscore_fit(data, {ch}).at(ch);
      norm_source = "data";
    }

    rep += "\n";
    rep += std::string("target=") + channel_name(ch) + "\n";
    rep += "norm_source=" + norm_source + "\n";
    const Metrics phys = metrics(pred, actual);
    const Metrics norm = metrics(to_norm(pred, ts), to_norm(actual, ts));
    append_metrics(rep, "test_norm", norm);
    append_metrics(rep, "test_phys", phys);
    if (model && !pred_eq_phys.empty()) {
      const Metrics gap = metrics(to_norm(pred_eq_phys, ts), to_norm(pred_model_phys, ts));
      rep += "agreement_rmse_norm=" + fmt_g(gap.rmse) + "\n";
      std::printf("target %s: equations agree with network within rmse_norm=%.6g\n",
                  channel_name(ch), gap.rmse);
    }
    std::printf("target %s: mse_norm=%.6g rmse_norm=%.6g mae_norm=%.6g\n", channel_name(ch),
                norm.mse, norm.rmse, norm.mae);

    std::string trace = "time,actual,predicted\n";
    for (std::size_t i = 0; i < data.samples.size(); ++i)
      trace += fmt_g(data.samples[i].t) + "," + fmt_g(actual[i]) + "," + fmt_g(pred[i]) + "\n";
    const std::string trace_path = a.out + "/trace_" + channel_name(ch) + ".csv";
    write_text_file(trace_path, trace);
    std::printf("wrote %s (%zu rows)\n", trace_path.c_str(), data.samples.size());
  }

  write_text_file(a.out + "/eval_report.txt", rep);
  std::printf("wrote %s/eval_report.txt\n", a.out.c_str());
}

}  // namespace

void register_eval(CLI::App& app) {
  auto args = std::make_shared<EvalArgs>();
  CLI::App* sub = app.add_subcommand(
      "eval", "Score a model and/or equations file on a CSV and emit prediction traces");
  sub->add_option("--data", args->data, "Evaluation CSV")->required();
  sub->add_option("--out", args->out, "Output directory (eval_report.txt, trace CSVs)")
      ->required();
  sub->add_option("--model", args->model_path, "Model file written by train");
  sub->add_option("--equations", args->equations_path, "Equations file written by extract");
  sub->callback([args] { run_eval(*args); });
}

}  // namespace kanlmcli
