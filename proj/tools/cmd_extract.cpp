#include <cstdio>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"
#include "kanlm/model_io.hpp"
#include "kanlm/symbolic.hpp"

namespace kanlmcli {

using namespace kanlm;

namespace {

struct ExtractArgs {
  std::string model, data, out;
  int decimals = 4;
  double threshold = 0.99;
  double prune_threshold = 0.0;
  int finetune = 200;
  bool no_expand = false;
  bool verbose = false;
};

void run_extract(const ExtractArgs& a) {
  if (a.decimals < 0) throw InvalidInput("--decimals must be >= 0");
  ModelFile model = read_model(a.model);
  Dataset data = read_csv(a.data, Role::Train);
  data.inputs = model.inputs;
  const Dataset norm = zscore_apply(model.stats, data);
  const auto X = input_matrix(norm);

  ExtractOptions opts;
  opts.r2_threshold = a.threshold;
  opts.finetune_iters = a.finetune;
  for (Channel c : model.inputs) opts.var_names.push_back(channel_name(c));
  const bool expand = !a.no_expand;

  std::string head = "# kanlm equations v1\n";
  head += "# inputs " + channel_list_name(model.inputs) + "\n";
  for (const auto& [ch, st] : model.stats.channels)
    head += std::string("# norm ") + channel_name(ch) + " " + fmt_g(st.mean) + " " +
            fmt_g(st.stddev) + "\n";
  std::string body;

  for (const auto& [ch, stored] : model.targets) {
    KanNetwork net = stored;
    if (a.prune_threshold > 0.0) net = prune(net, X, a.prune_threshold);
    Extraction ex = extract_network(net, X, opts);
    if (a.verbose)
      for (const std::string& note : ex.notes) std::printf("%s\n", note.c_str());

    int locked = 0, live = 0;
    for (const KanLayer& layer : ex.net.layers)
      for (const ActivationEdge& e : layer.edges)
        if (!e.pruned) {
          ++live;
          if (e.fixed) ++locked;
        }
    std::printf("target %s: locked %d/%d edges\n", channel_name(ch), locked, live);
    if (!ex.unresolved.empty())
      std::printf("warning: target %s left %zu edges unresolved below r2 threshold %g\n",
                  channel_name(ch), ex.unresolved.size(), a.threshold);

    ExprPtr phys = denormalize(ex.outputs[0], model.stats, ch, expand);
    ExprPtr rounded = simplify(phys, a.decimals, expand);
    head += std::string("# unresolved ") + channel_name(ch) + " " +
            std::to_string(ex.unresolved.size()) + "\n";
    body += std::string(channel_name(ch)) + " = " + render(rounded, a.decimals) + "\n";
  }

  write_text_file(a.out, head + body);
  std::printf("wrote %s\n", a.out.c_str());
}

}  // namespace

void register_extract(CLI::App& app) {
  auto args = std::make_shared<ExtractArgs>();
  CLI::App* sub = app.add_subcommand(
      "extract", "Turn a trained model into explicit equations in physical units");
  sub->add_option("--model", args->model, "Model file written by train")->required();
  sub->add_option("--data", args->data, "CSV whose inputs drive the candidate fits")->required();
  sub->add_option("--out", args->out, "Equations output file")->required();
  sub->add_option("--decimals", args->decimals, "Coefficient rounding in the rendered equations")
      ->default_str("4");
  sub->add_option("--threshold", args->threshold, "Minimum R^2 to lock an edge symbolically")
      ->default_str("0.99");
  sub->add_option("--prune-threshold", args->prune_threshold,
                  "Prune edges below this importance before extracting (0 disables)");
  sub->add_option("--finetune", args->finetune, "Affine fine-tune LBFGS iterations");
  sub->add_flag("--no-expand", args->no_expand,
                "Keep squared-affine factors instead of expanding to monomials");
  sub->add_flag("--verbose", args->verbose, "Print the per-edge fit log");
  sub->callback([args] { run_extract(*args); });
}

}  // namespace kanlmcli
