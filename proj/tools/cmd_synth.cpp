#include <cstdio>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"
#include "kanlm/loadmodels.hpp"
#include "kanlm/rng.hpp"

namespace kanlmcli {

using namespace kanlm;

namespace {

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string truth = "composite";
  std::string preset = "paper-split";
  double noise = -1.0;  // negative keeps the preset value
  double dip = -1.0;
  // zip / exponential truth parameters
  ZipParams zip;
  ExpParams expo;
};

void run_synth(const SynthArgs& a) {
  Truth truth;
  if (a.truth == "zip") {
    truth.kind = TruthKind::Zip;
    truth.zip = a.zip;
    validate(truth.zip);
  } else if (a.truth == "exp") {
    truth.kind = TruthKind::Exponential;
    truth.exp = a.expo;
    validate(truth.exp);
  } else if (a.truth == "composite") {
    truth.kind = TruthKind::Composite;
    truth.composite = default_composite_truth(Rng::derive(a.seed, 7));
  } else {
    throw InvalidInput("unknown truth model '" + a.truth + "', expected zip, exp or composite");
  }

  ensure_dir(a.out);
  const Role roles[] = {Role::Train, Role::Validation, Role::Test};
  const char* split_buses[] = {"busA", "busB", "busC"};
  for (int r = 0; r < 3; ++r) {
    Scenario sc = preset_scenario(a.preset == "paper-split" ? split_buses[r] : a.preset);
    sc.seed = Rng::derive(a.seed, static_cast<std::uint64_t>(r));
    if (a.noise >= 0.0) sc.noise_sigma = a.noise;
    if (a.dip >= 0.0) sc.dip_depth = a.dip;
    validate(sc);
    Dataset data = synth_dataset(sc, truth, roles[r]);
    const std::string path = a.out + "/" + role_name(roles[r]) + ".csv";
    write_csv(path, data);
    std::printf("wrote %s (%zu rows)\n", path.c_str(), data.samples.size());
  }
}

}  // namespace

void register_synth(CLI::App& app) {
  auto args = std::make_shared<SynthArgs>();
  CLI::App* sub = app.add_subcommand(
      "synth", "Generate train/validation/test fault-response CSVs from a ground-truth model");
  sub->add_option("--seed", args->seed, "Master seed; drives trajectories, noise and truth draws")
      ->required();
  sub->add_option("--out", args->out, "Output directory for the three CSVs")->required();
  sub->add_option("--truth", args->truth, "Ground truth: zip, exp or composite")
      ->default_str("composite");
  sub->add_option("--preset", args->preset,
                  "paper-split (busA/busB/busC per role) or a single bus for all roles")
      ->default_str("paper-split");
  sub->add_option("--noise", args->noise, "Measurement noise as a fraction of channel range");
  sub->add_option("--dip", args->dip, "Fault voltage dip depth override, fraction of v_pre");
  sub->add_option("--p0", args->zip.p0, "Nominal active power (zip truth)");
  sub->add_option("--q0", args->zip.q0, "Nominal reactive power (zip truth)");
  sub->add_option("--v0", args->zip.v0, "Nominal voltage (zip and exp truths)");
  sub->add_option("--az", args->zip.az, "ZIP constant-impedance fraction, P");
  sub->add_option("--ai", args->zip.ai, "ZIP constant-current fraction, P");
  sub->add_option("--ap", args->zip.ap, "ZIP constant-power fraction, P");
  sub->add_option("--bz", args->zip.bz, "ZIP constant-impedance fraction, Q");
  sub->add_option("--bi", args->zip.bi, "ZIP constant-current fraction, Q");
  sub->add_option("--bp", args->zip.bp, "ZIP constant-power fraction, Q");
  sub->add_option("--np", args->expo.np, "Exponential voltage exponent, P");
  sub->add_option("--nq", args->expo.nq, "Exponential voltage exponent, Q");
  sub->callback([args, sub] {
    // zip flags share the voltage base with the exponential truth
    args->expo.v0 = args->zip.v0;
    args->expo.p0 = args->zip.p0;
    args->expo.q0 = args->zip.q0;
    (void)sub;
    run_synth(*args);
  });
}

}  // namespace kanlmcli
