#include "kanlm/bayesopt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "kanlm/errors.hpp"

namespace kanlm {

double halton(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  std::uint64_t i = index;
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f /= base;
  }
  return result;
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
constexpr double kLengthscale = 0.25;
constexpr double kXi = 0.01;  // EI exploration margin
constexpr int kCandidatePool = 512;

double from_unit(const BoDim& d, double u) {
  double v;
  if (d.log10) {
    const double llo = std::log10(d.lo), lhi = std::log10(d.hi);
    v = std::pow(10.0, llo + u * (lhi - llo));
  } else {
    v = d.lo + u * (d.hi - d.lo);
  }
  if (d.integer) v = std::nearbyint(v);
  return std::clamp(v, d.lo, d.hi);
}

double to_unit(const BoDim& d, double v) {
  if (d.log10) {
    const double llo = std::log10(d.lo), lhi = std::log10(d.hi);
    return (std::log10(v) - llo) / (lhi - llo);
  }
  return (v - d.lo) / (d.hi - d.lo);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

BoResult bayes_opt(const BoSpace& space, const BoObjective& objective, int budget, int init_count,
                   std::uint64_t seed) {
  const int d = static_cast<int>(space.dims.size());
  if (d == 0) throw InvalidInput("bayes_opt: empty search space");
  if (d > static_cast<int>(sizeof kPrimes / sizeof kPrimes[0]))
    throw InvalidInput("bayes_opt: too many dimensions");
  if (init_count < 1 || budget < init_count)
    throw InvalidInput("bayes_opt: need budget >= init_count >= 1");
  for (const BoDim& dim : space.dims) {
    if (!(dim.lo < dim.hi)) throw InvalidInput("bayes_opt: dim '" + dim.name + "' needs lo < hi");
    if (dim.log10 && !(dim.lo > 0.0))
      throw InvalidInput("bayes_opt: log dim '" + dim.name + "' needs lo > 0");
  }

  const std::uint64_t offset = seed % 997;
  std::uint64_t stream = offset;  // last consumed Halton index

  auto next_unit = [&]() {
    ++stream;
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = halton(stream, kPrimes[i]);
    return u;
  };

  auto materialize = [&](const std::vector<double>& u) {
    BoPoint p;
    for (int i = 0; i < d; ++i) p[space.dims[i].name] = from_unit(space.dims[i], u[i]);
    return p;
  };

  // Unit-cube coordinates of a realized point (integer rounding applied).
  auto coords_of = [&](const BoPoint& p) {
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = to_unit(space.dims[i], p.at(space.dims[i].name));
    return u;
  };

  BoResult result;
  result.diagnostics.lengthscale = kLengthscale;

  auto same_point = [&](const BoPoint& a, const BoPoint& b) {
    for (const BoDim& dim : space.dims) {
      const double x = a.at(dim.name), y = b.at(dim.name);
      if (dim.integer ? std::nearbyint(x) != std::nearbyint(y) : std::fabs(x - y) > 1e-12)
        return false;
    }
    return true;
  };
  auto already_tried = [&](const BoPoint& p) {
    for (const BoTrial& t : result.ledger)
      if (same_point(t.point, p)) return true;
    return false;
  };

  auto run_trial = [&](const BoPoint& p, int index) {
    BoTrial trial;
    trial.point = p;
    try {
      trial.objective = objective(p, index);
      if (!std::isfinite(trial.objective)) trial.failed = true;
    } catch (const std::exception&) {
      trial.failed = true;
    }
    if (trial.failed) {
      trial.objective = std::numeric_limits<double>::infinity();
      ++result.diagnostics.failed_trials;
    }
    result.ledger.push_back(std::move(trial));
  };

  for (int t = 0; t < init_count; ++t) run_trial(materialize(next_unit()), t);

  for (int t = init_count; t < budget; ++t) {
    // Collect successful observations for the surrogate.
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (const BoTrial& tr : result.ledger)
      if (!tr.failed) {
        xs.push_back(coords_of(tr.point));
        ys.push_back(tr.objective);
      }

    std::vector<std::vector<double>> cand_units;
    std::vector<BoPoint> cand_points;
    cand_units.reserve(kCandidatePool);
    for (int j = 0; j < kCandidatePool; ++j) {
      std::vector<double> u = next_unit();
      cand_points.push_back(materialize(u));
      cand_units.push_back(std::move(u));
    }

    int pick = -1;
    if (xs.size() >= 2) {
      const int n = static_cast<int>(xs.size());
      double y_mean = 0.0;
      for (double y : ys) y_mean += y;
      y_mean /= n;
      double y_var = 0.0;
      for (double y : ys) y_var += (y - y_mean) * (y - y_mean);
      double y_sd = std::sqrt(y_var / n);
      if (!(y_sd > 1e-12)) y_sd = 1.0;

      auto kernel = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s2 = 0.0;
        for (int i = 0; i < d; ++i) s2 += (a[i] - b[i]) * (a[i] - b[i]);
        return std::exp(-s2 / (2.0 * kLengthscale * kLengthscale));
      };

      Eigen::MatrixXd K(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) K(r, c) = kernel(xs[r], xs[c]);
      Eigen::VectorXd yz(n);
      for (int r = 0; r < n; ++r) yz(r) = (ys[r] - y_mean) / y_sd;

      double jitter = 1e-6;
      Eigen::LLT<Eigen::MatrixXd> llt;
      while (true) {
        Eigen::MatrixXd Kj = K + jitter * Eigen::MatrixXd::Identity(n, n);
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) break;
        jitter *= 10.0;
        if (jitter > 1e-2) throw NumericalFailure("bayes_opt: surrogate factorization failed");
      }
      result.diagnostics.noise = jitter;
      ++result.diagnostics.surrogate_fits;

      const Eigen::VectorXd alpha = llt.solve(yz);
      double f_best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n; ++r) f_best = std::min(f_best, yz(r));

      double best_ei = -1.0;
      int best_dup = -1;
      double best_dup_ei = -1.0;
      for (int j = 0; j < kCandidatePool; ++j) {
        Eigen::VectorXd kv(n);
        for (int r = 0; r < n; ++r) kv(r) = kernel(xs[r], cand_units[j]);
        const double mu = kv.dot(alpha);
        const Eigen::VectorXd w = llt.solve(kv);
        double var = 1.0 + jitter - kv.dot(w);
        if (var < 0.0) var = 0.0;
        const double sd = std::sqrt(var);
        double ei = 0.0;
        if (sd > 1e-12) {
          const double z = (f_best - mu - kXi) / sd;
          ei = (f_best - mu - kXi) * norm_cdf(z) + sd * norm_pdf(z);
        }
        if (already_tried(cand_points[j])) {
          if (ei > best_dup_ei) {
            best_dup_ei = ei;
            best_dup = j;
          }
        } else if (ei > best_ei) {
          best_ei = ei;
          pick = j;
        }
      }
      if (pick < 0) pick = best_dup;  // every candidate collided; accept one
    } else {
      // Too few successes to fit a surrogate; continue quasi-random search.
      for (int j = 0; j < kCandidatePool && pick < 0; ++j)
        if (!already_tried(cand_points[j])) pick = j;
      if (pick < 0) pick = 0;
    }

    run_trial(cand_points[pick], t);
  }

  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (std::size_t i = 0; i < result.ledger.size(); ++i)
    if (!result.ledger[i].failed && result.ledger[i].objective < best) {
      best = result.ledger[i].objective;
      best_idx = static_cast<int>(i);
    }
  if (best_idx < 0) throw NumericalFailure("bayes_opt: every trial failed");
  result.best_point = result.ledger[best_idx].point;
  result.best_objective = best;
  return result;
}

}  // namespace kanlm
