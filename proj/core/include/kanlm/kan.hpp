#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kanlm/candidates.hpp"
#include "kanlm/rng.hpp"
#include "kanlm/spline.hpp"

namespace kanlm {

/// x / (1 + e^-x), stable for large |x|.
double silu(double x);
double silu_grad(double x);

/// Symbolic lock: forward becomes c * g(a*x + b) + d and the spline
/// parameters are frozen.
struct FixedForm {
  CandidateId cid = CandidateId::X;
  double a = 1.0, b = 0.0, c = 1.0, d = 0.0;
};

/// One trainable activation: w_b * silu(x) + w_s * sum_i coeffs[i] * B_i(x),
/// unless locked to a fixed form or pruned to the constant-zero edge.
struct ActivationEdge {
  KnotGrid grid;
  std::vector<double> coeffs;
  double w_b = 1.0;
  double w_s = 1.0;
  std::optional<FixedForm> fixed;
  bool pruned = false;
};

struct KanLayer {
  int n_in = 0;
  int n_out = 0;
  std::vector<ActivationEdge> edges;  // row-major, edges[j * n_in + i]

  ActivationEdge& edge(int j, int i) { return edges[static_cast<std::size_t>(j) * n_in + i]; }
  const ActivationEdge& edge(int j, int i) const {
    return edges[static_cast<std::size_t>(j) * n_in + i];
  }
};

struct KanNetwork {
  std::vector<int> widths;  // [n_0, ..., n_L]
  std::vector<KanLayer> layers;

  int n_inputs() const { return widths.front(); }
  int n_outputs() const { return widths.back(); }
};

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Seeded construction: w_b = w_s = 1, spline coefficients drawn from a
/// zero-mean normal with the given scale. One initial grid domain per layer.
KanNetwork make_network(const std::vector<int>& widths, int grid_intervals, int degree,
                        const std::vector<Interval>& layer_domains, Rng& rng,
                        double coeff_scale = 0.1);

double edge_forward(const ActivationEdge& edge, double x);
/// d(edge_forward)/dx.
double edge_forward_grad(const ActivationEdge& edge, double x);

std::vector<double> layer_forward(const KanLayer& layer, const std::vector<double>& x);
std::vector<double> network_forward(const KanNetwork& net, const std::vector<double>& x);

using ParamVector = std::vector<double>;

/// Which parameter set pack/unpack and the backward pass address.
/// Spline: w_b, w_s and spline coefficients of every edge that is neither
/// pruned nor locked. Affine: the (a, b, c, d) of every locked edge.
enum class GradMode { Spline, Affine };

/// Flattening order (both modes): layers in order; within a layer j-major
/// then i; per Spline edge w_b, w_s, coeffs[0..]; per Affine edge a, b, c, d.
ParamVector pack(const KanNetwork& net, GradMode mode = GradMode::Spline);
void unpack(KanNetwork& net, const ParamVector& params, GradMode mode = GradMode::Spline);

struct LossGrad {
  double loss = 0.0;
  ParamVector grad;
};

/// Mean squared error over the batch (averaged over samples and outputs)
/// plus reg_weight times the sparsity penalty: sum over edges of the mean
/// absolute post-activation. The gradient is the exact reverse-mode
/// derivative with respect to pack(net, mode), including the penalty path.
LossGrad network_backward(const KanNetwork& net, const std::vector<std::vector<double>>& inputs,
                          const std::vector<std::vector<double>>& targets, double reg_weight,
                          GradMode mode = GradMode::Spline);

/// Mean absolute post-activation per edge, flattened in pack order over all
/// edges (pruned edges report 0).
std::vector<double> edge_importance(const KanNetwork& net,
                                    const std::vector<std::vector<double>>& inputs);

/// Replaces edges with mean |post-activation| < threshold by constant-zero
/// edges; hidden nodes whose incoming and outgoing edges are all zero are
/// removed. Throws StructuralFailure if an output loses every incoming edge
/// or a hidden layer empties.
KanNetwork prune(const KanNetwork& net, const std::vector<std::vector<double>>& inputs,
                 double threshold);

}  // namespace kanlm
