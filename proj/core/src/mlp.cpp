#include <cmath>

#include "kanlm/errors.hpp"
#include "kanlm/loadmodels.hpp"
#include "kanlm/rng.hpp"

namespace kanlm {

namespace {

constexpr int W = kMlpWidth;

struct Layout {
  int n_in;
  int w1, b1, w2, b2, w3, b3;  // offsets into the flat vector

  explicit Layout(int n) : n_in(n) {
    w1 = 0;
    b1 = w1 + W * n;
    w2 = b1 + W;
    b2 = w2 + W * W;
    w3 = b2 + W;
    b3 = w3 + W;
  }
  int total() const { return b3 + 1; }
};

struct Trace {
  double u1[W], h1[W];  // pre/post activation, first hidden layer
  double u2[W], h2[W];
  double out;
};

void forward_trace(const Layout& lo, const std::vector<double>& p, const std::vector<double>& x,
                   Trace& tr) {
  for (int j = 0; j < W; ++j) {
    double u = p[lo.b1 + j];
    for (int i = 0; i < lo.n_in; ++i) u += p[lo.w1 + j * lo.n_in + i] * x[i];
    tr.u1[j] = u;
    tr.h1[j] = std::tanh(u);
  }
  for (int j = 0; j < W; ++j) {
    double u = p[lo.b2 + j];
    for (int i = 0; i < W; ++i) u += p[lo.w2 + j * W + i] * tr.h1[i];
    tr.u2[j] = u;
    tr.h2[j] = std::tanh(u);
  }
  double out = p[lo.b3];
  for (int i = 0; i < W; ++i) out += p[lo.w3 + i] * tr.h2[i];
  tr.out = out;
}

}  // namespace

int mlp_param_count(int n_in) { return Layout(n_in).total(); }

double mlp_forward(const MlpModel& m, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.n_in) throw InvalidInput("mlp_forward: input width mismatch");
  Layout lo(m.n_in);
  if (static_cast<int>(m.params.size()) != lo.total())
    throw InvalidInput("mlp_forward: parameter vector length mismatch");
  Trace tr;
  forward_trace(lo, m.params, x, tr);
  return tr.out;
}

LossGrad mlp_loss_grad(const MlpModel& m, const std::vector<std::vector<double>>& inputs,
                       const std::vector<double>& targets) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw InvalidInput("mlp_loss_grad: bad batch");
  Layout lo(m.n_in);
  if (static_cast<int>(m.params.size()) != lo.total())
    throw InvalidInput("mlp_loss_grad: parameter vector length mismatch");

  LossGrad out;
  out.grad.assign(lo.total(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  Trace tr;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const std::vector<double>& x = inputs[s];
    if (static_cast<int>(x.size()) != m.n_in)
      throw InvalidInput("mlp_loss_grad: input width mismatch");
    forward_trace(lo, m.params, x, tr);
    const double err = tr.out - targets[s];
    out.loss += err * err * inv_n;
    const double g_out = 2.0 * err * inv_n;

    out.grad[lo.b3] += g_out;
    double d2[W];
    for (int j = 0; j < W; ++j) {
      out.grad[lo.w3 + j] += g_out * tr.h2[j];
      d2[j] = g_out * m.params[lo.w3 + j] * (1.0 - tr.h2[j] * tr.h2[j]);
    }
    double d1[W] = {0};
    for (int j = 0; j < W; ++j) {
      out.grad[lo.b2 + j] += d2[j];
      for (int i = 0; i < W; ++i) {
        out.grad[lo.w2 + j * W + i] += d2[j] * tr.h1[i];
        d1[i] += d2[j] * m.params[lo.w2 + j * W + i];
      }
    }
    for (int i = 0; i < W; ++i) {
      const double di = d1[i] * (1.0 - tr.h1[i] * tr.h1[i]);
      out.grad[lo.b1 + i] += di;
      for (int k = 0; k < m.n_in; ++k) out.grad[lo.w1 + i * m.n_in + k] += di * x[k];
    }
  }
  if (!std::isfinite(out.loss)) throw NumericalFailure("mlp_loss_grad: non-finite loss");
  return out;
}

std::vector<double> mlp_predict(const MlpModel& m, const std::vector<std::vector<double>>& inputs) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(mlp_forward(m, x));
  return out;
}

MlpResult mlp_baseline(const Dataset& train_data, const Dataset& val_data,
                       const LbfgsConfig& lcfg, std::uint64_t seed) {
  validate_dataset(train_data);
  validate_dataset(val_data);
  if (train_data.inputs != val_data.inputs || train_data.target != val_data.target)
    throw InvalidInput("mlp_baseline: train/validation channel contracts differ");

  MlpResult res;
  res.stats = zscore_fit(train_data);
  Dataset norm_train = zscore_apply(res.stats, train_data);
  Dataset norm_val = zscore_apply(res.stats, val_data);

  const auto X = input_matrix(norm_train);
  const auto y = target_vector(norm_train);

  const int n_in = static_cast<int>(train_data.inputs.size());
  Layout lo(n_in);
  res.model.n_in = n_in;
  res.model.params.assign(lo.total(), 0.0);
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(n_in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(W));
  for (int i = 0; i < W * n_in; ++i) res.model.params[lo.w1 + i] = rng.normal(0.0, s1);
  for (int i = 0; i < W * W; ++i) res.model.params[lo.w2 + i] = rng.normal(0.0, s2);
  for (int i = 0; i < W; ++i) res.model.params[lo.w3 + i] = rng.normal(0.0, s2);

  Objective obj = [&](const std::vector<double>& p, std::vector<double>& grad) {
    MlpModel probe{n_in, p};
    LossGrad lg = mlp_loss_grad(probe, X, y);
    grad = std::move(lg.grad);
    return lg.loss;
  };
  LbfgsResult opt = lbfgs_minimize(obj, res.model.params, lcfg);
  res.model.params = opt.x;
  res.report.loss_history = std::move(opt.report.loss_history);
  res.report.iterations = opt.report.iterations;
  res.report.reason = opt.report.reason;

  const auto Xv = input_matrix(norm_val);
  const std::vector<double> pred_train = mlp_predict(res.model, X);
  const std::vector<double> pred_val = mlp_predict(res.model, Xv);
  res.report.train_norm = metrics(pred_train, y);
  res.report.val_norm = metrics(pred_val, target_vector(norm_val));

  const ChannelStats& ts = res.stats.at(val_data.target);
  std::vector<double> pred_phys;
  pred_phys.reserve(pred_val.size());
  for (double z : pred_val) pred_phys.push_back(zscore_invert(ts, z));
  res.report.val_phys = metrics(pred_phys, target_vector(val_data));
  return res;
}

}  // namespace kanlm
