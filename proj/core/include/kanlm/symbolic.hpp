#pragma once

#include <limits>
#include <string>
#include <vector>

#include "kanlm/dataset.hpp"
#include "kanlm/expr.hpp"
#include "kanlm/kan.hpp"

namespace kanlm {

struct CandidateFit {
  CandidateId cid = CandidateId::Const;
  // c * g(a*x + b) + d
  double a = 1.0, b = 0.0, c = 0.0, d = 0.0;
  double r2 = -std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Fits one candidate to (x, y) samples: (a, b) by a coarse-to-fine grid
// over [-5, 5]^2 (step 0.5, then two refinement rounds at 0.05 and 0.005
// around the incumbent), (c, d) in closed form per grid point. Candidates
// whose domain excludes some sample at every (a, b) come back infeasible
// with r2 = -inf. Constant targets score 1 for the const candidate and
// -inf for all others.
CandidateFit fit_candidate(const std::vector<double>& xs, const std::vector<double>& ys,
                           CandidateId cid);

// Evaluates the edge on the observed inputs (thinned to at most 400
// stride-spaced points) and returns the best-R2 fit over the library.
// Fits within 1e-4 R2 of the best count as ties and the earliest library
// entry wins, so near-indistinguishable shapes resolve to the simpler form.
CandidateFit symbolify_edge(const ActivationEdge& edge, const std::vector<double>& observed_inputs,
                            const std::vector<CandidateId>& library);

struct ExtractOptions {
  double r2_threshold = 0.99;
  int finetune_iters = 200;
  std::vector<CandidateId> library = default_library();
  // Input variable names in network order; empty falls back to x0, x1, ...
  std::vector<std::string> var_names;
};

struct UnresolvedEdge {
  int layer = 0;
  int j = 0;
  int i = 0;
  double r2 = 0.0;
};

struct Extraction {
  std::vector<ExprPtr> outputs;  // one per network output, normalized space
  KanNetwork net;                // the locked network
  std::vector<UnresolvedEdge> unresolved;
  std::vector<std::string> notes;  // per-edge fit log
};

// Locks edges layer by layer against activations recomputed through the
// already-locked layers, fine-tunes the affine parameters by LBFGS against
// the original network's outputs, then composes one expression per output.
// Edges under the R2 threshold stay numeric and appear as spline marker
// nodes. Expressions are raw (unrounded); run simplify for presentation.
Extraction extract_network(const KanNetwork& net,
                           const std::vector<std::vector<double>>& train_inputs,
                           const ExtractOptions& opts = {});

// Canonical algebraic cleanup: expands affine-polynomial composition,
// collects like terms, rounds coefficients half-to-even at `decimals` and
// drops the ones that round to zero. Transcendental nodes keep their inner
// affine argument; with expand_powers false, powers of polynomial
// arguments also stay unexpanded (squared-affine style).
ExprPtr simplify(const ExprPtr& e, int decimals, bool expand_powers = true);

// Maps an expression over z-scored variables back to physical units:
// substitutes v -> (v - mu_v)/sigma_v, wraps sigma_y * expr + mu_y, and
// re-simplifies at high precision. Evaluating the result on raw inputs
// equals un-normalizing the original's value on normalized inputs.
ExprPtr denormalize(const ExprPtr& e, const NormStats& stats, Channel target,
                    bool expand_powers = true);

}  // namespace kanlm
