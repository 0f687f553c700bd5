#include "kanlm/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "kanlm/errors.hpp"

namespace kanlm {

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::MaxIters: return "max-iters";
    case StopReason::LineSearchFailure: return "line-search-failure";
  }
  return "?";
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& cfg) {
  if (!(cfg.c1 > 0.0 && cfg.c1 < cfg.c2 && cfg.c2 < 1.0))
    throw InvalidInput("lbfgs: require 0 < c1 < c2 < 1");
  if (cfg.history < 1 || cfg.max_iters < 0 || cfg.max_line_search < 1)
    throw InvalidInput("lbfgs: bad configuration");
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidInput("lbfgs: non-finite start point");

  const std::size_t dim = x0.size();

  // Best point seen over every objective evaluation, trial steps included.
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();

  auto eval = [&](const std::vector<double>& x, std::vector<double>& g) {
    g.assign(dim, 0.0);
    const double f = objective(x, g);
    if (std::isfinite(f) && f < best_f) {
      best_f = f;
      best_x = x;
    }
    return f;
  };

  std::vector<double> x = std::move(x0);
  std::vector<double> g;
  double fx = eval(x, g);
  if (!std::isfinite(fx)) throw NumericalFailure("lbfgs: objective non-finite at start point");

  LbfgsReport report;
  report.loss_history.push_back(fx);
  report.reason = StopReason::MaxIters;

  std::deque<Pair> pairs;
  std::vector<double> d(dim), x_new(dim), g_new;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (max_norm(g) < cfg.grad_tol) {
      report.reason = StopReason::Converged;
      break;
    }

    // Search direction via the two-loop recursion.
    d = g;
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      alpha[k] = pairs[k].rho * dot(pairs[k].s, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] -= alpha[k] * pairs[k].y[i];
    }
    if (!pairs.empty()) {
      const Pair& last = pairs.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double beta = pairs[k].rho * dot(pairs[k].y, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] += (alpha[k] - beta) * pairs[k].s[i];
    }
    for (double& v : d) v = -v;

    double dphi0 = dot(g, d);
    if (dphi0 >= 0.0) {  // stale curvature; restart from steepest descent
      pairs.clear();
      for (std::size_t i = 0; i < dim; ++i) d[i] = -g[i];
      dphi0 = dot(g, d);
      if (dphi0 >= 0.0) {
        report.reason = StopReason::Converged;
        break;
      }
    }

    const double phi0 = fx;
    double ls_best_a = 0.0, ls_best_f = phi0;
    std::vector<double> ls_best_g;

    struct Eval {
      double f, dphi;
    };
    auto phi = [&](double a) -> Eval {
      for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] + a * d[i];
      const double f = eval(x_new, g_new);
      if (std::isfinite(f) && f < ls_best_f) {
        ls_best_a = a;
        ls_best_f = f;
        ls_best_g = g_new;
      }
      return {f, std::isfinite(f) ? dot(g_new, d) : 0.0};
    };
    auto armijo_ok = [&](double a, double f) {
      return std::isfinite(f) && f <= phi0 + cfg.c1 * a * dphi0;
    };
    auto curvature_ok = [&](double dphi) { return std::fabs(dphi) <= -cfg.c2 * dphi0; };

    // Minimizer of the quadratic through (lo, f_lo) with slope d_lo and
    // (hi, f_hi); bisection when the fit is degenerate or leaves the bracket.
    auto interp = [&](double lo, double f_lo, double d_lo, double hi, double f_hi) {
      const double h = hi - lo;
      const double denom = 2.0 * (f_hi - f_lo - d_lo * h);
      double a = lo + 0.5 * h;
      if (std::isfinite(denom) && denom != 0.0 && std::isfinite(f_hi)) {
        const double cand = lo - d_lo * h * h / denom;
        const double lo_b = std::min(lo, hi), hi_b = std::max(lo, hi);
        const double margin = 1e-3 * std::fabs(h);
        if (std::isfinite(cand) && cand > lo_b + margin && cand < hi_b - margin) a = cand;
      }
      return a;
    };

    int evals = 0;
    bool accepted = false;
    bool wolfe_met = false;
    double a_acc = 0.0, f_acc = fx, d_acc = dphi0;

    double a_prev = 0.0, f_prev = phi0, d_prev = dphi0;
    double a_cur = iter == 0 && pairs.empty() ? 1.0 / std::max(1.0, std::sqrt(dot(d, d))) : 1.0;
    double a_lo = 0.0, f_lo = 0.0, d_lo = 0.0, a_hi = 0.0, f_hi = 0.0;
    bool bracketed = false;

    // Bracketing phase: expand until the minimizer is straddled or Wolfe holds.
    while (evals < cfg.max_line_search) {
      Eval e = phi(a_cur);
      ++evals;
      if (!armijo_ok(a_cur, e.f) || (evals > 1 && e.f >= f_prev)) {
        a_lo = a_prev;
        f_lo = f_prev;
        d_lo = d_prev;
        a_hi = a_cur;
        f_hi = e.f;
        bracketed = true;
        break;
      }
      if (curvature_ok(e.dphi)) {
        accepted = wolfe_met = true;
        a_acc = a_cur;
        f_acc = e.f;
        d_acc = e.dphi;
        break;
      }
      if (e.dphi >= 0.0) {
        a_lo = a_cur;
        f_lo = e.f;
        d_lo = e.dphi;
        a_hi = a_prev;
        f_hi = f_prev;
        bracketed = true;
        break;
      }
      a_prev = a_cur;
      f_prev = e.f;
      d_prev = e.dphi;
      a_cur = std::min(2.0 * a_cur, 1e20);
    }

    // Zoom phase: shrink the bracket around a strong-Wolfe point.
    while (!accepted && bracketed && evals < cfg.max_line_search) {
      if (std::fabs(a_hi - a_lo) < 1e-18 * (1.0 + std::fabs(a_lo))) break;
      const double a_j = interp(a_lo, f_lo, d_lo, a_hi, f_hi);
      Eval e = phi(a_j);
      ++evals;
      if (!armijo_ok(a_j, e.f) || e.f >= f_lo) {
        a_hi = a_j;
        f_hi = e.f;
      } else {
        if (curvature_ok(e.dphi)) {
          accepted = wolfe_met = true;
          a_acc = a_j;
          f_acc = e.f;
          d_acc = e.dphi;
          break;
        }
        if (e.dphi * (a_hi - a_lo) >= 0.0) {
          a_hi = a_lo;
          f_hi = f_lo;
        }
        a_lo = a_j;
        f_lo = e.f;
        d_lo = e.dphi;
      }
    }

    // Secant polish: the strong Wolfe test with a loose c2 accepts steps
    // whose slope is far from zero, which costs exact termination on
    // quadratics. One secant step toward the slope's zero fixes that (it IS
    // the minimizer when phi is quadratic) and helps any convex stretch.
    if (accepted && wolfe_met && evals < cfg.max_line_search &&
        std::fabs(d_acc) > 1e-6 * std::fabs(dphi0) && d_acc > dphi0) {
      const double a_s = a_acc * -dphi0 / (d_acc - dphi0);
      if (std::isfinite(a_s) && a_s > 0.0 && a_s < 1e20) {
        std::vector<double> g_keep = g_new;
        Eval e = phi(a_s);
        ++evals;
        if (armijo_ok(a_s, e.f) && e.f <= f_acc && std::fabs(e.dphi) <= std::fabs(d_acc)) {
          a_acc = a_s;
          f_acc = e.f;
        } else {
          g_new = std::move(g_keep);
        }
      }
    }

    if (!accepted) {
      // Fall back to the best simple-decrease step from this search; a run
      // that cannot even decrease f has genuinely stalled.
      if (ls_best_a > 0.0 && ls_best_f < phi0) {
        accepted = true;
        a_acc = ls_best_a;
        f_acc = ls_best_f;
        g_new = ls_best_g;
        ++report.wolfe_failures;
      } else {
        report.reason = StopReason::LineSearchFailure;
        break;
      }
    } else if (!wolfe_met) {
      ++report.wolfe_failures;
    }

    // phi() evaluated points after the accepted one only in the fallback
    // path, where g_new was restored above; x_new must be recomputed.
    for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] + a_acc * d[i];

    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      p.s[i] = x_new[i] - x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-10 * std::sqrt(dot(p.s, p.s)) * std::sqrt(dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      pairs.push_back(std::move(p));
      if (static_cast<int>(pairs.size()) > cfg.history) pairs.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    fx = f_acc;
    report.loss_history.push_back(fx);
    report.iterations = iter + 1;
  }

  if (report.reason == StopReason::MaxIters && max_norm(g) < cfg.grad_tol)
    report.reason = StopReason::Converged;
  report.final_grad_norm = max_norm(g);

  LbfgsResult result;
  result.report = std::move(report);
  if (best_x.empty() || fx <= best_f) {
    result.x = std::move(x);
    result.fx = fx;
  } else {
    result.x = std::move(best_x);
    result.fx = best_f;
  }
  return result;
}

}  // namespace kanlm
