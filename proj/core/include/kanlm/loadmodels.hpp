#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kanlm/dataset.hpp"
#include "kanlm/lbfgs.hpp"
#include "kanlm/train.hpp"

namespace kanlm {

// Static ZIP load model: P = P0 (aZ (V/V0)^2 + aI (V/V0) + aP), same shape
// for Q with the b fractions.
struct ZipParams {
  double p0 = 100.0;
  double q0 = 30.0;
  double v0 = 1.0;
  double az = 0.4, ai = 0.35, ap = 0.25;
  double bz = 0.5, bi = 0.3, bp = 0.2;
};

// Fraction sums must be 1 within 1e-9 and v0 > 0.
void validate(const ZipParams& p);
std::pair<double, double> zip_eval(const ZipParams& p, double v);

// Exponential load model: P = P0 (V/V0)^np, Q = Q0 (V/V0)^nq.
struct ExpParams {
  double p0 = 100.0;
  double q0 = 30.0;
  double v0 = 1.0;
  double np = 1.3;
  double nq = 2.1;
};

void validate(const ExpParams& p);
std::pair<double, double> exp_eval(const ExpParams& p, double v);

// One target of the composite ground truth:
// y = f_lin*f + exp_coeff*exp(exp_rate*V)
//   + sq_coeff*(sq_scale*V + sq_shift)^2 + v_lin*V + constant.
struct CompositeTarget {
  double f_lin = 0.0;
  double exp_coeff = 0.0;
  double exp_rate = 0.0;
  double sq_coeff = 0.0;
  double sq_scale = 1.0;
  double sq_shift = 0.0;
  double v_lin = 0.0;
  double constant = 0.0;
};

struct CompositeTruth {
  CompositeTarget p;
  CompositeTarget q;
};

double composite_eval_one(const CompositeTarget& t, double v, double f);
std::pair<double, double> composite_eval(const CompositeTruth& t, double v, double f);

// Seeded coefficients shaped like a composite-load response: an exp term
// and frequency dependence on P, a squared-affine voltage term and
// frequency dependence on Q.
CompositeTruth default_composite_truth(std::uint64_t seed);

// Fault-response scenario for the parametric trajectory generator.
struct Scenario {
  double duration = 10.0;     // seconds
  double sample_rate = 120.0; // samples per second
  double fault_on = 1.0;
  double fault_clear = 1.2;
  double v_pre = 1.0;         // pre-fault voltage, per unit
  double dip_depth = 0.35;    // fault-on voltage sag, fraction of v_pre
  double osc_freq_hz = 1.4;   // recovery swing frequency
  double osc_damping = 4.2;    // recovery envelope decay, 1/s
  double osc_amplitude = 0.12; // sin mix of the recovery swing, relative to v_pre
  double f_nom = 60.0;
  double freq_dip_hz = 0.35;  // frequency excursion depth
  double freq_osc_hz = 0.7;
  double freq_damping = 0.7;
  double noise_sigma = 0.0;   // measurement noise as a fraction of each
                              // channel's clean range (applied by
                              // synth_dataset after the truth evaluation)
  std::uint64_t seed = 1;
};

void validate(const Scenario& s);

// Named presets emulating a train/validation/test fault split: busA
// (train, 0.45 pu dip), busB (validation, 0.25), busC (test, 0.35), with
// distinct swing frequencies and seeds. The training fault is the most
// severe one so the other splits stay inside the fitted voltage envelope.
Scenario preset_scenario(const std::string& name);

struct Trajectory {
  std::vector<double> t, v, f;
};

// Clean (t, V, f) series: flat pre-fault, depressed during the fault,
// damped-cosine recovery afterwards. The seed perturbs the recovery phase
// and frequency so distinct seeds give distinct series. Noise is not
// applied here.
Trajectory synth_trajectory(const Scenario& s);

enum class TruthKind { Zip, Exponential, Composite };

struct Truth {
  TruthKind kind = TruthKind::Zip;
  ZipParams zip;
  ExpParams exp;
  CompositeTruth composite;
};

std::pair<double, double> truth_eval(const Truth& t, double v, double f);

// Trajectory + truth evaluation + measurement noise. Noise draws come
// from Rng(derive(s.seed, 11)) in sample order, channels V, f, P, Q per
// sample, each with sigma = noise_sigma * (clean channel range).
Dataset synth_dataset(const Scenario& s, const Truth& truth, Role role);

// Least-squares ZIP fit on regressors {(V/v0)^2, V/v0, 1} for P and Q.
// Needs 3 distinct voltages; rank-deficient systems raise
// NumericalFailure mentioning the degenerate fit.
ZipParams fit_zip_ls(const Dataset& data, double v0);

// Log-linear exponential fit; any non-positive target value switches that
// target to a direct LBFGS fit of (P0, n).
ExpParams fit_exp_ls(const Dataset& data, double v0);

// --- MLP baseline ---------------------------------------------------------

inline constexpr int kMlpWidth = 16;

// Flat parameter layout: w1[16*n_in], b1[16], w2[16*16], b2[16], w3[16],
// b3[1]; tanh hidden layers, linear output.
struct MlpModel {
  int n_in = 0;
  std::vector<double> params;
};

int mlp_param_count(int n_in);
double mlp_forward(const MlpModel& m, const std::vector<double>& x);
LossGrad mlp_loss_grad(const MlpModel& m, const std::vector<std::vector<double>>& inputs,
                       const std::vector<double>& targets);

struct MlpReport {
  std::vector<double> loss_history;
  int iterations = 0;
  StopReason reason = StopReason::MaxIters;
  Metrics train_norm;
  Metrics val_norm;
  Metrics val_phys;
};

struct MlpResult {
  MlpModel model;
  NormStats stats;
  MlpReport report;
};

// Same z-score + LBFGS pipeline as the KAN path, fixed 2x16 tanh
// architecture, hand-derived backprop.
MlpResult mlp_baseline(const Dataset& train_data, const Dataset& val_data,
                       const LbfgsConfig& lcfg, std::uint64_t seed);

std::vector<double> mlp_predict(const MlpModel& m, const std::vector<std::vector<double>>& inputs);

}  // namespace kanlm
