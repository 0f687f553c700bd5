#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace kanlm {

// One search dimension. `log10` dims are explored in log space (lo > 0
// required); `integer` dims are rounded to the nearest whole value after
// mapping back from the unit cube.
struct BoDim {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool integer = false;
  bool log10 = false;
};

struct BoSpace {
  std::vector<BoDim> dims;
};

using BoPoint = std::map<std::string, double>;

struct BoTrial {
  BoPoint point;
  double objective = 0.0;
  bool failed = false;
};

struct BoDiagnostics {
  double lengthscale = 0.0;
  double noise = 0.0;
  int surrogate_fits = 0;
  int failed_trials = 0;
};

struct BoResult {
  std::vector<BoTrial> ledger;
  BoPoint best_point;
  double best_objective = 0.0;
  BoDiagnostics diagnostics;
};

// Receives the candidate point and the 0-based trial index (useful for
// deriving per-trial seeds). Throwing marks the trial failed (+inf).
using BoObjective = std::function<double(const BoPoint& point, int trial_index)>;

// Van der Corput radical inverse in the given base, 1-based index.
// Dimension i of the quasi-random stream uses the i-th prime base.
// Trial j of the initial design is stream index seed%997 + j + 1, which
// is the whole contract a reimplementation needs.
double halton(std::uint64_t index, int base);

// Gaussian-process Bayesian minimization with expected-improvement
// acquisition. The first init_count trials come from the seeded Halton
// design; subsequent candidates are drawn from the continuation of the
// same stream and scored under the surrogate.
BoResult bayes_opt(const BoSpace& space, const BoObjective& objective, int budget, int init_count,
                   std::uint64_t seed);

}  // namespace kanlm
