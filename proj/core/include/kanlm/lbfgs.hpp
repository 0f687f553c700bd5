#pragma once

#include <functional>
#include <vector>

namespace kanlm {

/// Objective fills `grad` and returns the function value.
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

struct LbfgsConfig {
  int max_iters = 500;
  int history = 10;       // number of (s, y) correction pairs kept
  double grad_tol = 1e-7; // max-norm stopping test
  double c1 = 1e-4;       // sufficient-decrease coefficient
  double c2 = 0.9;        // curvature coefficient, c1 < c2 < 1
  int max_line_search = 40;
};

enum class StopReason { Converged, MaxIters, LineSearchFailure };
const char* stop_reason_name(StopReason r);

struct LbfgsReport {
  /// Objective at x0 followed by the value at each accepted iterate.
  std::vector<double> loss_history;
  int iterations = 0;
  StopReason reason = StopReason::MaxIters;
  /// Accepted steps that violated the strong Wolfe inequalities. Stays 0
  /// unless the search terminated abnormally.
  int wolfe_failures = 0;
  double final_grad_norm = 0.0;
};

struct LbfgsResult {
  std::vector<double> x;
  double fx = 0.0;
  LbfgsReport report;
};

/// Two-loop-recursion L-BFGS with a strong-Wolfe bracketing line search.
/// Returns the best iterate seen across all objective evaluations.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& cfg = {});

}  // namespace kanlm
