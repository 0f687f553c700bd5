#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "kanlm/errors.hpp"
#include "kanlm/loadmodels.hpp"
#include "kanlm/rng.hpp"

using namespace kanlm;

TEST_CASE("zip evaluation oracle") {
  ZipParams p;  // defaults: 0.4 / 0.35 / 0.25 and 0.5 / 0.3 / 0.2
  auto [pw, qw] = zip_eval(p, 1.05);
  CHECK(pw == doctest::Approx(100.0 * (0.4 * 1.1025 + 0.35 * 1.05 + 0.25)).epsilon(1e-14));
  auto [pw2, qw2] = zip_eval(p, 0.9);
  CHECK(qw2 == doctest::Approx(30.0 * (0.5 * 0.81 + 0.3 * 0.9 + 0.2)).epsilon(1e-14));
  CHECK(zip_eval(p, 1.0).first == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(zip_eval(p, 1.0).second == doctest::Approx(30.0).epsilon(1e-14));

  ZipParams bad = p;
  bad.az = 0.5;  // fractions no longer sum to one
  CHECK_THROWS_AS(validate(bad), InvalidInput);
}

TEST_CASE("exponential evaluation oracle") {
  ExpParams p;
  p.np = 2.0;
  p.nq = 1.0;
  CHECK(exp_eval(p, 0.5).first == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(exp_eval(p, 0.5).second == doctest::Approx(15.0).epsilon(1e-14));
  ExpParams d;
  CHECK(exp_eval(d, 0.9).first == doctest::Approx(100.0 * std::pow(0.9, 1.3)).epsilon(1e-14));
}

TEST_CASE("composite truth evaluates its closed form") {
  CompositeTarget t;
  t.f_lin = 2.0;
  t.exp_coeff = 3.0;
  t.exp_rate = 1.1;
  t.sq_coeff = -0.5;
  t.sq_scale = 2.0;
  t.sq_shift = -1.0;
  t.v_lin = 4.0;
  t.constant = 7.0;
  const double v = 0.93, f = 59.8;
  const double want = 2.0 * f + 3.0 * std::exp(1.1 * v) - 0.5 * (2.0 * v - 1.0) * (2.0 * v - 1.0) +
                      4.0 * v + 7.0;
  CHECK(composite_eval_one(t, v, f) == doctest::Approx(want).epsilon(1e-14));

  CompositeTruth truth = default_composite_truth(11);
  CompositeTruth again = default_composite_truth(11);
  CHECK(composite_eval(truth, v, f).first == composite_eval(again, v, f).first);
  CHECK(composite_eval(truth, v, f).second == composite_eval(again, v, f).second);
}

TEST_CASE("trajectory protocol") {
  Scenario s = preset_scenario("busA");
  Trajectory tr = synth_trajectory(s);
  CHECK(tr.t.size() == 1200);  // 120 samples/s for 10 s
  CHECK(tr.v.size() == tr.t.size());
  CHECK(tr.f.size() == tr.t.size());

  for (std::size_t i = 1; i < tr.t.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);

  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < s.fault_on) {
      // flat pre-fault segment at nominal conditions
      CHECK(tr.v[i] == s.v_pre);
      CHECK(tr.f[i] == s.f_nom);
    } else if (tr.t[i] < s.fault_clear) {
      CHECK(tr.v[i] == doctest::Approx(s.v_pre * (1.0 - s.dip_depth)).epsilon(1e-12));
    }
    CHECK(tr.v[i] > 0.3);
    CHECK(tr.v[i] < 1.5);
  }

  // recovery joins the faulted level continuously and decays back to v_pre
  std::size_t clear_idx = 0;
  while (tr.t[clear_idx] < s.fault_clear) ++clear_idx;
  CHECK(std::fabs(tr.v[clear_idx] - s.v_pre * (1.0 - s.dip_depth)) < 0.02);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (tr.t[i] < s.fault_clear) continue;
    double tau = tr.t[i] - s.fault_clear;
    double bound = s.v_pre * (s.dip_depth + s.osc_amplitude) * std::exp(-s.osc_damping * tau);
    CHECK(std::fabs(tr.v[i] - s.v_pre) <= bound + 1e-9);
  }
  CHECK(std::fabs(tr.v.back() - s.v_pre) < 1e-3);
}

TEST_CASE("trajectory seeds matter and are reproducible") {
  Scenario a = preset_scenario("busA");
  Trajectory t1 = synth_trajectory(a);
  Trajectory t2 = synth_trajectory(a);
  CHECK(t1.v == t2.v);
  CHECK(t1.f == t2.f);

  Scenario b = a;
  b.seed = a.seed + 1;
  Trajectory t3 = synth_trajectory(b);
  bool differs = false;
  for (std::size_t i = 0; i < t1.v.size(); ++i)
    if (t1.v[i] != t3.v[i]) {
      differs = true;
      break;
    }
  CHECK(differs);
}

TEST_CASE("synth_dataset applies the truth exactly when noiseless") {
  Scenario s = preset_scenario("busB");
  s.noise_sigma = 0.0;
  Truth truth;
  truth.kind = TruthKind::Zip;
  Dataset d = synth_dataset(s, truth, Role::Validation);
  CHECK(d.role == Role::Validation);
  CHECK(d.samples.size() == 1200);
  for (std::size_t i = 0; i < d.samples.size(); i += 113) {
    auto [pw, qw] = zip_eval(truth.zip, d.samples[i].v);
    CHECK(d.samples[i].p == pw);
    CHECK(d.samples[i].q == qw);
  }
}

TEST_CASE("measurement noise is seeded and bounded") {
  Scenario s = preset_scenario("busA");
  s.noise_sigma = 0.005;
  Truth truth;
  truth.kind = TruthKind::Zip;
  Dataset a = synth_dataset(s, truth, Role::Train);
  Dataset b = synth_dataset(s, truth, Role::Train);
  for (std::size_t i = 0; i < a.samples.size(); i += 97) {
    CHECK(a.samples[i].v == b.samples[i].v);
    CHECK(a.samples[i].p == b.samples[i].p);
  }
  // differs from the clean series, but only by a few noise scales
  Scenario clean = s;
  clean.noise_sigma = 0.0;
  Dataset c = synth_dataset(clean, truth, Role::Train);
  double p_lo = 1e300, p_hi = -1e300;
  for (const Sample& smp : c.samples) {
    p_lo = std::min(p_lo, smp.p);
    p_hi = std::max(p_hi, smp.p);
  }
  const double sigma_p = 0.005 * (p_hi - p_lo);
  bool moved = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    double dp = std::fabs(a.samples[i].p - c.samples[i].p);
    CHECK(dp < 6.0 * sigma_p);
    moved = moved || dp > 0.0;
  }
  CHECK(moved);
}

TEST_CASE("zip least squares round trips the generator") {
  Scenario s = preset_scenario("busA");
  s.noise_sigma = 0.0;
  Truth truth;
  truth.kind = TruthKind::Zip;
  truth.zip.az = 0.52;
  truth.zip.ai = 0.17;
  truth.zip.ap = 0.31;
  truth.zip.bz = 0.44;
  truth.zip.bi = 0.25;
  truth.zip.bp = 0.31;
  Dataset d = synth_dataset(s, truth, Role::Train);
  ZipParams fit = fit_zip_ls(d, 1.0);
  CHECK(std::fabs(fit.az - 0.52) < 1e-8);
  CHECK(std::fabs(fit.ai - 0.17) < 1e-8);
  CHECK(std::fabs(fit.ap - 0.31) < 1e-8);
  CHECK(std::fabs(fit.bz - 0.44) < 1e-8);
  CHECK(std::fabs(fit.bi - 0.25) < 1e-8);
  CHECK(std::fabs(fit.bp - 0.31) < 1e-8);
  CHECK(std::fabs(fit.p0 - truth.zip.p0) < 1e-6);
  CHECK(std::fabs(fit.q0 - truth.zip.q0) < 1e-6);
}

TEST_CASE("exponential least squares round trips the generator") {
  Scenario s = preset_scenario("busA");
  s.noise_sigma = 0.0;
  Truth truth;
  truth.kind = TruthKind::Exponential;
  truth.exp.np = 1.45;
  truth.exp.nq = 2.3;
  Dataset d = synth_dataset(s, truth, Role::Train);
  ExpParams fit = fit_exp_ls(d, 1.0);
  CHECK(std::fabs(fit.np - 1.45) < 1e-8);
  CHECK(std::fabs(fit.nq - 2.3) < 1e-8);
  CHECK(std::fabs(fit.p0 - 100.0) < 1e-6);
  CHECK(std::fabs(fit.q0 - 30.0) < 1e-6);
}

TEST_CASE("exponential fit falls back to the nonlinear path for negative targets") {
  // Q = -5 V^1.8 is all-negative, so the log-linear path cannot be used
  Dataset d;
  d.inputs = {Channel::V};
  Rng rng(3);
  for (int i = 0; i < 400; ++i) {
    Sample smp;
    smp.t = 0.01 * i;
    smp.v = 0.6 + 0.5 * rng.uniform01();
    smp.f = 60.0;
    smp.p = 100.0 * std::pow(smp.v, 1.3);
    smp.q = -5.0 * std::pow(smp.v, 1.8);
    d.samples.push_back(smp);
  }
  ExpParams fit = fit_exp_ls(d, 1.0);
  CHECK(std::fabs(fit.q0 - (-5.0)) < 1e-5);
  CHECK(std::fabs(fit.nq - 1.8) < 1e-5);
  CHECK(std::fabs(fit.np - 1.3) < 1e-8);
}

TEST_CASE("degenerate voltage data is rejected") {
  Dataset d;
  for (int i = 0; i < 20; ++i) {
    Sample smp;
    smp.t = 0.1 * i;
    smp.v = 1.0;  // a single voltage cannot identify three fractions
    smp.f = 60.0;
    smp.p = 100.0;
    smp.q = 30.0;
    d.samples.push_back(smp);
  }
  CHECK_THROWS_AS(fit_zip_ls(d, 1.0), NumericalFailure);
}

TEST_CASE("mlp parameter layout and gradient") {
  CHECK(mlp_param_count(2) == 2 * 16 + 16 + 16 * 16 + 16 + 16 + 1);
  CHECK(mlp_param_count(1) == 16 + 16 + 256 + 16 + 16 + 1);

  MlpModel m;
  m.n_in = 2;
  Rng rng(13);
  m.params.resize(mlp_param_count(2));
  for (double& p : m.params) p = rng.normal(0.0, 0.4);

  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int i = 0; i < 12; ++i) {
    X.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    y.push_back(rng.normal(0.0, 1.0));
  }
  LossGrad lg = mlp_loss_grad(m, X, y);
  REQUIRE(lg.grad.size() == m.params.size());
  const double h = 1e-6;
  for (std::size_t k = 0; k < m.params.size(); k += 7) {
    MlpModel mp = m, mm = m;
    mp.params[k] += h;
    mm.params[k] -= h;
    double fd = (mlp_loss_grad(mp, X, y).loss - mlp_loss_grad(mm, X, y).loss) / (2.0 * h);
    double tol = std::max(1e-8, 1e-5 * std::max(std::fabs(fd), std::fabs(lg.grad[k])));
    CHECK(std::fabs(lg.grad[k] - fd) <= tol);
  }
}

TEST_CASE("mlp baseline learns a smooth target") {
  Rng rng(17);
  Dataset tr, va;
  tr.inputs = va.inputs = {Channel::V, Channel::F};
  for (int i = 0; i < 400; ++i) {
    Sample s;
    s.t = 0.01 * i;
    s.v = 0.7 + 0.5 * rng.uniform01();
    s.f = 59.5 + rng.uniform01();
    s.p = 40.0 * s.v * s.v + 2.0 * (s.f - 60.0) + 20.0;
    s.q = 0.0;
    (i % 4 == 0 ? va : tr).samples.push_back(s);
  }
  va.role = Role::Validation;
  LbfgsConfig cfg;
  cfg.max_iters = 300;
  MlpResult res = mlp_baseline(tr, va, cfg, 5);
  CHECK(res.report.val_norm.mse < 1e-3);
  MlpResult res2 = mlp_baseline(tr, va, cfg, 5);
  CHECK(res.report.val_norm.mse == res2.report.val_norm.mse);
}

TEST_CASE("csv serialization is byte stable and errors cite the line") {
  Scenario s = preset_scenario("busC");
  s.noise_sigma = 0.002;
  Truth truth;
  truth.kind = TruthKind::Composite;
  truth.composite = default_composite_truth(5);
  Dataset d = synth_dataset(s, truth, Role::Test);

  std::string text = csv_text(d);
  CHECK(text.rfind("time,V,f,P,Q\n", 0) == 0);
  Dataset back = parse_csv(text, Role::Test, "mem");
  CHECK(csv_text(back) == text);
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    CHECK(back.samples[i].v == d.samples[i].v);
    CHECK(back.samples[i].p == d.samples[i].p);
  }

  CHECK_THROWS_WITH_AS(parse_csv("time,V,f,P,Q\n0,1,60,100,30\nbroken line\n", Role::Train, "mem"),
                       doctest::Contains("3"), InvalidInput);
}
