#include "kanlm/kan.hpp"

#include <cmath>
#include <string>

#include "kanlm/errors.hpp"

namespace kanlm {

double silu(double x) {
  if (x >= 0.0) return x / (1.0 + std::exp(-x));
  const double e = std::exp(x);  // underflows to 0 for very negative x
  return x * e / (1.0 + e);
}

double silu_grad(double x) {
  const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return s * (1.0 + x * (1.0 - s));
}

KanNetwork make_network(const std::vector<int>& widths, int grid_intervals, int degree,
                        const std::vector<Interval>& layer_domains, Rng& rng,
                        double coeff_scale) {
  if (widths.size() < 2) throw InvalidInput("make_network: need at least two widths");
  for (int w : widths)
    if (w < 1) throw InvalidInput("make_network: widths must be positive");
  const std::size_t n_layers = widths.size() - 1;
  if (layer_domains.size() != n_layers)
    throw InvalidInput("make_network: one grid domain per layer required");

  KanNetwork net;
  net.widths = widths;
  net.layers.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    KanLayer& layer = net.layers[l];
    layer.n_in = widths[l];
    layer.n_out = widths[l + 1];
    const KnotGrid grid =
        make_grid(layer_domains[l].lo, layer_domains[l].hi, grid_intervals, degree);
    layer.edges.resize(static_cast<std::size_t>(layer.n_in) * layer.n_out);
    for (ActivationEdge& e : layer.edges) {
      e.grid = grid;
      e.coeffs.resize(grid.basis_count());
      for (double& c : e.coeffs) c = rng.normal(0.0, coeff_scale);
      e.w_b = 1.0;
      e.w_s = 1.0;
    }
  }
  return net;
}

double edge_forward(const ActivationEdge& edge, double x) {
  if (edge.pruned) return 0.0;
  if (edge.fixed) {
    const FixedForm& f = *edge.fixed;
    return f.c * candidate_eval(f.cid, f.a * x + f.b).value + f.d;
  }
  double spline = 0.0;
  const std::vector<double> row = basis_row(edge.grid, x);
  for (std::size_t i = 0; i < row.size(); ++i) spline += edge.coeffs[i] * row[i];
  return edge.w_b * silu(x) + edge.w_s * spline;
}

double edge_forward_grad(const ActivationEdge& edge, double x) {
  if (edge.pruned) return 0.0;
  if (edge.fixed) {
    const FixedForm& f = *edge.fixed;
    return f.c * f.a * candidate_eval(f.cid, f.a * x + f.b).deriv;
  }
  std::vector<double> values, derivs;
  basis_row(edge.grid, x, values, derivs);
  double spline_d = 0.0;
  for (std::size_t i = 0; i < derivs.size(); ++i) spline_d += edge.coeffs[i] * derivs[i];
  return edge.w_b * silu_grad(x) + edge.w_s * spline_d;
}

std::vector<double> layer_forward(const KanLayer& layer, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != layer.n_in)
    throw InvalidInput("layer_forward: expected " + std::to_string(layer.n_in) +
                       " inputs, got " + std::to_string(x.size()));
  std::vector<double> out(layer.n_out, 0.0);
  for (int j = 0; j < layer.n_out; ++j)
    for (int i = 0; i < layer.n_in; ++i) out[j] += edge_forward(layer.edge(j, i), x[i]);
  return out;
}

std::vector<double> network_forward(const KanNetwork& net, const std::vector<double>& x) {
  std::vector<double> cur = x;
  for (const KanLayer& layer : net.layers) cur = layer_forward(layer, cur);
  return cur;
}

namespace {

bool edge_in_mode(const ActivationEdge& e, GradMode mode) {
  if (mode == GradMode::Spline) return !e.pruned && !e.fixed;
  return !e.pruned && e.fixed.has_value();
}

int edge_param_count(const ActivationEdge& e, GradMode mode) {
  if (!edge_in_mode(e, mode)) return 0;
  return mode == GradMode::Spline ? 2 + static_cast<int>(e.coeffs.size()) : 4;
}

}  // namespace

ParamVector pack(const KanNetwork& net, GradMode mode) {
  ParamVector v;
  for (const KanLayer& layer : net.layers) {
    for (const ActivationEdge& e : layer.edges) {
      if (!edge_in_mode(e, mode)) continue;
      if (mode == GradMode::Spline) {
        v.push_back(e.w_b);
        v.push_back(e.w_s);
        v.insert(v.end(), e.coeffs.begin(), e.coeffs.end());
      } else {
        v.push_back(e.fixed->a);
        v.push_back(e.fixed->b);
        v.push_back(e.fixed->c);
        v.push_back(e.fixed->d);
      }
    }
  }
  return v;
}

void unpack(KanNetwork& net, const ParamVector& params, GradMode mode) {
  std::size_t pos = 0;
  for (KanLayer& layer : net.layers) {
    for (ActivationEdge& e : layer.edges) {
      if (!edge_in_mode(e, mode)) continue;
      const std::size_t need = static_cast<std::size_t>(edge_param_count(e, mode));
      if (pos + need > params.size()) throw InvalidInput("unpack: parameter vector too short");
      if (mode == GradMode::Spline) {
        e.w_b = params[pos++];
        e.w_s = params[pos++];
        for (double& c : e.coeffs) c = params[pos++];
      } else {
        e.fixed->a = params[pos++];
        e.fixed->b = params[pos++];
        e.fixed->c = params[pos++];
        e.fixed->d = params[pos++];
      }
    }
  }
  if (pos != params.size()) throw InvalidInput("unpack: parameter vector length mismatch");
}

LossGrad network_backward(const KanNetwork& net, const std::vector<std::vector<double>>& inputs,
                          const std::vector<std::vector<double>>& targets, double reg_weight,
                          GradMode mode) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw InvalidInput("network_backward: empty batch or input/target count mismatch");
  const int n_out = net.n_outputs();
  const std::size_t n = inputs.size();
  const std::size_t n_layers = net.layers.size();

  // Parameter offsets per edge in pack order.
  std::vector<std::vector<int>> offsets(n_layers);
  int total = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l].resize(net.layers[l].edges.size(), -1);
    for (std::size_t k = 0; k < net.layers[l].edges.size(); ++k) {
      const ActivationEdge& e = net.layers[l].edges[k];
      if (!edge_in_mode(e, mode)) continue;
      offsets[l][k] = total;
      total += edge_param_count(e, mode);
    }
  }

  LossGrad out;
  out.grad.assign(total, 0.0);
  double sq_sum = 0.0;
  double penalty = 0.0;
  const double inv_nm = 1.0 / (static_cast<double>(n) * n_out);
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<double> values, derivs;
  for (std::size_t s = 0; s < n; ++s) {
    if (static_cast<int>(targets[s].size()) != n_out)
      throw InvalidInput("network_backward: target dimension mismatch");
    acts[0] = inputs[s];
    for (std::size_t l = 0; l < n_layers; ++l) acts[l + 1] = layer_forward(net.layers[l], acts[l]);

    std::vector<double> delta(n_out);
    for (int j = 0; j < n_out; ++j) {
      const double err = acts[n_layers][j] - targets[s][j];
      sq_sum += err * err;
      delta[j] = 2.0 * inv_nm * err;
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const KanLayer& layer = net.layers[l];
      std::vector<double> delta_prev(layer.n_in, 0.0);
      for (int j = 0; j < layer.n_out; ++j) {
        for (int i = 0; i < layer.n_in; ++i) {
          const ActivationEdge& e = layer.edge(j, i);
          if (e.pruned) continue;
          const double u = acts[l][i];
          const int off = offsets[l][static_cast<std::size_t>(j) * layer.n_in + i];

          if (e.fixed) {
            const FixedForm& f = *e.fixed;
            const CandidateEval g = candidate_eval(f.cid, f.a * u + f.b);
            const double phi = f.c * g.value + f.d;
            penalty += inv_n * std::fabs(phi);
            double g_out = delta[j];
            if (reg_weight != 0.0 && phi != 0.0)
              g_out += reg_weight * inv_n * (phi > 0.0 ? 1.0 : -1.0);
            if (mode == GradMode::Affine && off >= 0) {
              out.grad[off + 0] += g_out * f.c * u * g.deriv;
              out.grad[off + 1] += g_out * f.c * g.deriv;
              out.grad[off + 2] += g_out * g.value;
              out.grad[off + 3] += g_out;
            }
            delta_prev[i] += g_out * f.c * f.a * g.deriv;
            continue;
          }

          basis_row(e.grid, u, values, derivs);
          double sv = 0.0, sd = 0.0;
          for (std::size_t m = 0; m < values.size(); ++m) {
            sv += e.coeffs[m] * values[m];
            sd += e.coeffs[m] * derivs[m];
          }
          const double si = silu(u);
          const double phi = e.w_b * si + e.w_s * sv;
          penalty += inv_n * std::fabs(phi);
          double g_out = delta[j];
          if (reg_weight != 0.0 && phi != 0.0)
            g_out += reg_weight * inv_n * (phi > 0.0 ? 1.0 : -1.0);
          if (mode == GradMode::Spline && off >= 0) {
            out.grad[off + 0] += g_out * si;
            out.grad[off + 1] += g_out * sv;
            for (std::size_t m = 0; m < values.size(); ++m)
              out.grad[off + 2 + m] += g_out * e.w_s * values[m];
          }
          delta_prev[i] += g_out * (e.w_b * silu_grad(u) + e.w_s * sd);
        }
      }
      delta.swap(delta_prev);
    }
  }

  out.loss = inv_nm * sq_sum + reg_weight * penalty;
  if (!std::isfinite(out.loss)) throw NumericalFailure("network_backward: non-finite loss");
  return out;
}

std::vector<double> edge_importance(const KanNetwork& net,
                                    const std::vector<std::vector<double>>& inputs) {
  if (inputs.empty()) throw InvalidInput("edge_importance: empty sample set");
  std::vector<double> importance;
  for (const KanLayer& layer : net.layers)
    importance.resize(importance.size() + layer.edges.size(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  for (const std::vector<double>& x : inputs) {
    std::vector<double> cur = x;
    std::size_t base = 0;
    for (const KanLayer& layer : net.layers) {
      std::vector<double> next(layer.n_out, 0.0);
      for (int j = 0; j < layer.n_out; ++j) {
        for (int i = 0; i < layer.n_in; ++i) {
          const double phi = edge_forward(layer.edge(j, i), cur[i]);
          next[j] += phi;
          importance[base + static_cast<std::size_t>(j) * layer.n_in + i] += inv_n * std::fabs(phi);
        }
      }
      base += layer.edges.size();
      cur.swap(next);
    }
  }
  return importance;
}

KanNetwork prune(const KanNetwork& net, const std::vector<std::vector<double>>& inputs,
                 double threshold) {
  if (threshold < 0.0) throw InvalidInput("prune: threshold must be >= 0");
  KanNetwork result = net;
  const std::vector<double> importance = edge_importance(net, inputs);

  std::size_t base = 0;
  for (KanLayer& layer : result.layers) {
    for (std::size_t k = 0; k < layer.edges.size(); ++k) {
      if (importance[base + k] < threshold) {
        ActivationEdge& e = layer.edges[k];
        e.pruned = true;
        e.w_b = 0.0;
        e.w_s = 0.0;
        std::fill(e.coeffs.begin(), e.coeffs.end(), 0.0);
        e.fixed.reset();
      }
    }
    base += layer.edges.size();
  }

  // Remove hidden nodes whose incoming and outgoing edges are all zero.
  for (std::size_t b = 1; b + 1 < result.widths.size(); ++b) {
    KanLayer& below = result.layers[b - 1];  // produces node values at boundary b
    KanLayer& above = result.layers[b];      // consumes them
    for (int h = below.n_out - 1; h >= 0; --h) {
      bool all_in = true, all_out = true;
      for (int i = 0; i < below.n_in && all_in; ++i) all_in = below.edge(h, i).pruned;
      for (int j = 0; j < above.n_out && all_out; ++j) all_out = above.edge(j, h).pruned;
      if (!(all_in && all_out)) continue;
      below.edges.erase(below.edges.begin() + static_cast<std::ptrdiff_t>(h) * below.n_in,
                        below.edges.begin() + (static_cast<std::ptrdiff_t>(h) + 1) * below.n_in);
      below.n_out -= 1;
      for (int j = above.n_out - 1; j >= 0; --j)
        above.edges.erase(above.edges.begin() + static_cast<std::ptrdiff_t>(j) * above.n_in + h);
      above.n_in -= 1;
      result.widths[b] -= 1;
    }
    if (result.widths[b] == 0)
      throw StructuralFailure("prune: hidden layer " + std::to_string(b) + " lost every node");
  }

  const KanLayer& last = result.layers.back();
  for (int j = 0; j < last.n_out; ++j) {
    bool any = false;
    for (int i = 0; i < last.n_in && !any; ++i) any = !last.edge(j, i).pruned;
    if (!any)
      throw StructuralFailure("prune: output " + std::to_string(j) + " lost every incoming edge");
  }
  return result;
}

}  // namespace kanlm
