#include "kanlm/loadmodels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "kanlm/errors.hpp"
#include "kanlm/rng.hpp"

namespace kanlm {

void validate(const ZipParams& p) {
  if (!(p.v0 > 0.0)) throw InvalidInput("zip params: v0 must be positive");
  if (std::fabs(p.az + p.ai + p.ap - 1.0) > 1e-9)
    throw InvalidInput("zip params: P fractions must sum to 1");
  if (std::fabs(p.bz + p.bi + p.bp - 1.0) > 1e-9)
    throw InvalidInput("zip params: Q fractions must sum to 1");
}

std::pair<double, double> zip_eval(const ZipParams& p, double v) {
  if (!(v > 0.0)) throw InvalidInput("zip_eval: non-positive voltage");
  const double r = v / p.v0;
  return {p.p0 * (p.az * r * r + p.ai * r + p.ap), p.q0 * (p.bz * r * r + p.bi * r + p.bp)};
}

void validate(const ExpParams& p) {
  if (!(p.v0 > 0.0)) throw InvalidInput("exp params: v0 must be positive");
}

std::pair<double, double> exp_eval(const ExpParams& p, double v) {
  if (!(v > 0.0)) throw InvalidInput("exp_eval: non-positive voltage");
  const double r = v / p.v0;
  return {p.p0 * std::pow(r, p.np), p.q0 * std::pow(r, p.nq)};
}

double composite_eval_one(const CompositeTarget& t, double v, double f) {
  const double sq = t.sq_scale * v + t.sq_shift;
  return t.f_lin * f + t.exp_coeff * std::exp(t.exp_rate * v) + t.sq_coeff * sq * sq +
         t.v_lin * v + t.constant;
}

std::pair<double, double> composite_eval(const CompositeTruth& t, double v, double f) {
  return {composite_eval_one(t.p, v, f), composite_eval_one(t.q, v, f)};
}

CompositeTruth default_composite_truth(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 5));
  CompositeTruth t;
  // Active power: frequency droop plus an exponential voltage term.
  t.p.f_lin = -rng.uniform(4.0, 6.0);
  t.p.exp_coeff = rng.uniform(10.0, 20.0);
  t.p.exp_rate = rng.uniform(1.2, 1.6);
  t.p.constant = rng.uniform(1400.0, 1700.0);
  // Reactive power: frequency droop plus a squared-affine voltage term.
  t.q.f_lin = -rng.uniform(30.0, 40.0);
  t.q.sq_coeff = -rng.uniform(100.0, 130.0);
  t.q.sq_scale = -1.0;
  t.q.sq_shift = -rng.uniform(0.4, 0.6);
  t.q.constant = rng.uniform(450.0, 550.0);
  return t;
}

void validate(const Scenario& s) {
  if (!(s.duration > 0.0) || !(s.sample_rate > 0.0))
    throw InvalidInput("scenario: duration and sample_rate must be positive");
  if (!(s.fault_on > 0.0 && s.fault_on < s.fault_clear && s.fault_clear < s.duration))
    throw InvalidInput("scenario: need 0 < fault_on < fault_clear < duration");
  if (!(s.dip_depth > 0.0 && s.dip_depth < 1.0))
    throw InvalidInput("scenario: dip_depth must be in (0, 1)");
  if (!(s.v_pre > 0.0)) throw InvalidInput("scenario: v_pre must be positive");
  if (s.osc_amplitude < 0.0 || s.osc_damping < 0.0 || s.osc_freq_hz < 0.0)
    throw InvalidInput("scenario: oscillation parameters must be non-negative");
  if (s.noise_sigma < 0.0) throw InvalidInput("scenario: noise_sigma must be non-negative");
}

Scenario preset_scenario(const std::string& name) {
  Scenario s;
  if (name == "busA") {
    s.dip_depth = 0.45;
    s.osc_freq_hz = 1.4;
    s.osc_damping = 3.8;
    s.freq_osc_hz = 0.7;
    s.seed = 101;
  } else if (name == "busB") {
    s.dip_depth = 0.25;
    s.osc_freq_hz = 1.1;
    s.osc_damping = 4.8;
    s.freq_osc_hz = 0.55;
    s.seed = 202;
  } else if (name == "busC") {
    s.dip_depth = 0.35;
    s.osc_freq_hz = 1.7;
    s.osc_damping = 4.2;
    s.freq_osc_hz = 0.85;
    s.seed = 303;
  } else {
    throw InvalidInput("unknown scenario preset: " + name + " (expected busA, busB, or busC)");
  }
  return s;
}

Trajectory synth_trajectory(const Scenario& s) {
  validate(s);
  const int n = static_cast<int>(std::lround(s.duration * s.sample_rate));

  // Seeded jitter keeps same-seed runs bit-identical while distinct seeds
  // produce distinct recoveries.
  Rng rng(Rng::derive(s.seed, 3));
  const double v_mix = rng.uniform(0.5, 1.0);
  const double v_freq = s.osc_freq_hz * (1.0 + 0.08 * rng.uniform(-1.0, 1.0));
  const double f_mix = rng.uniform(0.5, 1.0);
  const double f_freq = s.freq_osc_hz * (1.0 + 0.08 * rng.uniform(-1.0, 1.0));

  const double two_pi = 6.283185307179586476925286766559;
  Trajectory out;
  out.t.reserve(n);
  out.v.reserve(n);
  out.f.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / s.sample_rate;
    double v, f;
    if (t < s.fault_on) {
      v = s.v_pre;
      f = s.f_nom;
    } else if (t < s.fault_clear) {
      v = s.v_pre * (1.0 - s.dip_depth);
      const double ramp = (t - s.fault_on) / (s.fault_clear - s.fault_on);
      f = s.f_nom - s.freq_dip_hz * ramp;
    } else {
      // Damped swing that starts exactly at the faulted value, so the
      // series is continuous at the clearing instant and the recovery
      // sweeps the whole band between the dip and the overshoot.
      const double tau = t - s.fault_clear;
      const double v_arg = two_pi * v_freq * tau;
      v = s.v_pre - s.v_pre * std::exp(-s.osc_damping * tau) *
                        (s.dip_depth * std::cos(v_arg) +
                         s.osc_amplitude * v_mix * std::sin(v_arg));
      const double f_arg = two_pi * f_freq * tau;
      f = s.f_nom - s.freq_dip_hz * std::exp(-s.freq_damping * tau) *
                        (std::cos(f_arg) + 0.4 * f_mix * std::sin(f_arg));
    }
    out.t.push_back(t);
    out.v.push_back(v);
    out.f.push_back(f);
  }
  return out;
}

std::pair<double, double> truth_eval(const Truth& t, double v, double f) {
  switch (t.kind) {
    case TruthKind::Zip: return zip_eval(t.zip, v);
    case TruthKind::Exponential: return exp_eval(t.exp, v);
    case TruthKind::Composite: return composite_eval(t.composite, v, f);
  }
  throw InvalidInput("truth_eval: unknown truth kind");
}

Dataset synth_dataset(const Scenario& s, const Truth& truth, Role role) {
  if (truth.kind == TruthKind::Zip) validate(truth.zip);
  if (truth.kind == TruthKind::Exponential) validate(truth.exp);
  Trajectory traj = synth_trajectory(s);

  Dataset data;
  data.role = role;
  data.samples.reserve(traj.t.size());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const auto [p, q] = truth_eval(truth, traj.v[k], traj.f[k]);
    data.samples.push_back(Sample{traj.t[k], traj.v[k], traj.f[k], p, q});
  }

  if (s.noise_sigma > 0.0) {
    double range[4] = {0, 0, 0, 0};
    for (int c = 0; c < 4; ++c) {
      const Channel ch = static_cast<Channel>(c);
      double lo = data.samples.front().get(ch), hi = lo;
      for (const Sample& smp : data.samples) {
        lo = std::min(lo, smp.get(ch));
        hi = std::max(hi, smp.get(ch));
      }
      range[c] = hi - lo;
    }
    Rng rng(Rng::derive(s.seed, 11));
    for (Sample& smp : data.samples)
      for (int c = 0; c < 4; ++c) {
        const Channel ch = static_cast<Channel>(c);
        smp.set(ch, smp.get(ch) + rng.normal(0.0, s.noise_sigma * range[c]));
      }
  }
  validate_dataset(data);
  return data;
}

namespace {

// Quadratic-in-(V/v0) least squares for one target column; returns the
// three polynomial coefficients (quadratic, linear, constant).
std::array<double, 3> quad_ls(const std::vector<double>& v, const std::vector<double>& y,
                              double v0, const char* what) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double r = v[i] / v0;
    A(i, 0) = r * r;
    A(i, 1) = r;
    A(i, 2) = 1.0;
    b(i) = y[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3)
    throw NumericalFailure(std::string(what) + ": degenerate fit, voltage lacks variation");
  const Eigen::VectorXd x = qr.solve(b);
  return {x(0), x(1), x(2)};
}

}  // namespace

ZipParams fit_zip_ls(const Dataset& data, double v0) {
  validate_dataset(data);
  if (!(v0 > 0.0)) throw InvalidInput("fit_zip_ls: v0 must be positive");
  std::set<double> distinct;
  for (const Sample& s : data.samples) distinct.insert(s.v);
  if (distinct.size() < 3)
    throw NumericalFailure("fit_zip_ls: degenerate fit, need at least 3 distinct voltages");

  const std::vector<double> v = channel_values(data, Channel::V);
  const auto cp = quad_ls(v, channel_values(data, Channel::P), v0, "fit_zip_ls[P]");
  const auto cq = quad_ls(v, channel_values(data, Channel::Q), v0, "fit_zip_ls[Q]");

  ZipParams out;
  out.v0 = v0;
  out.p0 = cp[0] + cp[1] + cp[2];
  out.q0 = cq[0] + cq[1] + cq[2];
  if (std::fabs(out.p0) < 1e-9 || std::fabs(out.q0) < 1e-9)
    throw NumericalFailure("fit_zip_ls: degenerate fit, zero nominal power");
  out.az = cp[0] / out.p0;
  out.ai = cp[1] / out.p0;
  out.ap = cp[2] / out.p0;
  out.bz = cq[0] / out.q0;
  out.bi = cq[1] / out.q0;
  out.bp = cq[2] / out.q0;
  return out;
}

namespace {

// Fits y ~ c0 * r^n for one target, r = V/v0. Log-linear when every y is
// positive, otherwise direct LBFGS on (c0, n).
std::pair<double, double> exp_fit_one(const std::vector<double>& v, const std::vector<double>& y,
                                      double v0, const char* what) {
  const int n = static_cast<int>(v.size());
  double lr_min = std::numeric_limits<double>::infinity(), lr_max = -lr_min;
  std::vector<double> lr(n);
  for (int i = 0; i < n; ++i) {
    lr[i] = std::log(v[i] / v0);
    lr_min = std::min(lr_min, lr[i]);
    lr_max = std::max(lr_max, lr[i]);
  }
  if (!(lr_max - lr_min > 1e-12))
    throw NumericalFailure(std::string(what) + ": degenerate fit, voltage lacks variation");

  bool all_positive = true;
  for (double yi : y) all_positive = all_positive && yi > 0.0;

  if (all_positive) {
    // ln y = ln c0 + n * ln r
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double ly = std::log(y[i]);
      sx += lr[i];
      sy += ly;
      sxx += lr[i] * lr[i];
      sxy += lr[i] * ly;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / n;
    return {std::exp(inter), slope};
  }

  double y_mean = 0.0;
  for (double yi : y) y_mean += yi;
  y_mean /= n;
  Objective obj = [&](const std::vector<double>& p, std::vector<double>& grad) {
    const double c0 = p[0], expo = p[1];
    double loss = 0.0;
    grad.assign(2, 0.0);
    for (int i = 0; i < n; ++i) {
      const double rn = std::exp(expo * lr[i]);
      const double e = c0 * rn - y[i];
      loss += e * e;
      grad[0] += 2.0 * e * rn;
      grad[1] += 2.0 * e * c0 * rn * lr[i];
    }
    const double inv = 1.0 / n;
    loss *= inv;
    grad[0] *= inv;
    grad[1] *= inv;
    return loss;
  };
  LbfgsConfig cfg;
  cfg.max_iters = 300;
  LbfgsResult res = lbfgs_minimize(obj, {y_mean == 0.0 ? 1.0 : y_mean, 1.0}, cfg);
  return {res.x[0], res.x[1]};
}

}  // namespace

ExpParams fit_exp_ls(const Dataset& data, double v0) {
  validate_dataset(data);
  if (!(v0 > 0.0)) throw InvalidInput("fit_exp_ls: v0 must be positive");
  for (const Sample& s : data.samples)
    if (!(s.v > 0.0)) throw InvalidInput("fit_exp_ls: non-positive voltage sample");

  const std::vector<double> v = channel_values(data, Channel::V);
  const auto [p0, np] = exp_fit_one(v, channel_values(data, Channel::P), v0, "fit_exp_ls[P]");
  const auto [q0, nq] = exp_fit_one(v, channel_values(data, Channel::Q), v0, "fit_exp_ls[Q]");

  ExpParams out;
  out.v0 = v0;
  out.p0 = p0;
  out.np = np;
  out.q0 = q0;
  out.nq = nq;
  return out;
}

}  // namespace kanlm
