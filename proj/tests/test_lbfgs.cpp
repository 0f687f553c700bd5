#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kanlm/lbfgs.hpp"
#include "kanlm/rng.hpp"

using namespace kanlm;

namespace {

// Gaussian elimination with partial pivoting for the tiny oracle solves.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double m = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= m * A[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
    x[r] = s / A[r][r];
  }
  return x;
}

}  // namespace

TEST_CASE("convex quadratic converges within the dimension") {
  // f(x) = 1/2 sum d_i (x_i - p_i)^2 with distinct curvatures
  const std::vector<double> d{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> p{0.4, -1.2, 2.0, 0.0, -0.7};
  Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
    double v = 0.0;
    g.assign(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      v += 0.5 * d[i] * (x[i] - p[i]) * (x[i] - p[i]);
      g[i] = d[i] * (x[i] - p[i]);
    }
    return v;
  };
  LbfgsConfig cfg;
  cfg.grad_tol = 1e-8;
  LbfgsResult res = lbfgs_minimize(f, std::vector<double>(5, 1.0), cfg);
  CHECK(res.report.reason == StopReason::Converged);
  CHECK(res.report.iterations <= 5);
  CHECK(res.report.wolfe_failures == 0);
  CHECK(res.report.final_grad_norm <= 1e-8);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(res.x[i] - p[i]) < 1e-7);
  // history starts at f(x0) and ends at the reported minimum
  REQUIRE(!res.report.loss_history.empty());
  std::vector<double> scratch;
  CHECK(res.report.loss_history.front() ==
        doctest::Approx(f(std::vector<double>(5, 1.0), scratch)).epsilon(1e-12));
  CHECK(res.report.loss_history.back() == doctest::Approx(res.fx).epsilon(1e-12));
}

TEST_CASE("rosenbrock reaches the global minimum") {
  Objective f = [](const std::vector<double>& x, std::vector<double>& g) {
    const double a = x[0], b = x[1];
    g.assign(2, 0.0);
    double t1 = b - a * a;
    g[0] = -400.0 * t1 * a - 2.0 * (1.0 - a);
    g[1] = 200.0 * t1;
    return 100.0 * t1 * t1 + (1.0 - a) * (1.0 - a);
  };
  LbfgsConfig cfg;
  cfg.max_iters = 300;
  cfg.grad_tol = 1e-10;
  LbfgsResult res = lbfgs_minimize(f, {-1.2, 1.0}, cfg);
  CHECK(std::fabs(res.x[0] - 1.0) < 1e-6);
  CHECK(std::fabs(res.x[1] - 1.0) < 1e-6);
}

TEST_CASE("least squares agrees with the normal equations") {
  const std::size_t m = 12, n = 3;
  Rng rng(31);
  std::vector<std::vector<double>> A(m, std::vector<double>(n));
  std::vector<double> b(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) A[r][c] = rng.normal(0.0, 1.0);
    b[r] = rng.normal(0.0, 1.0);
  }

  Objective f = [&](const std::vector<double>& x, std::vector<double>& g) {
    g.assign(n, 0.0);
    double v = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      double e = -b[r];
      for (std::size_t c = 0; c < n; ++c) e += A[r][c] * x[c];
      v += e * e;
      for (std::size_t c = 0; c < n; ++c) g[c] += 2.0 * e * A[r][c];
    }
    return v;
  };
  LbfgsResult res = lbfgs_minimize(f, std::vector<double>(n, 0.0));

  // oracle: x = (A^T A)^{-1} A^T b
  std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
  std::vector<double> atb(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < n; ++i) {
      atb[i] += A[r][i] * b[r];
      for (std::size_t j = 0; j < n; ++j) ata[i][j] += A[r][i] * A[r][j];
    }
  std::vector<double> xstar = solve_dense(ata, atb);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(res.x[i] - xstar[i]) < 1e-6);
}

TEST_CASE("best iterate is returned even when the search stalls") {
  // |x|-like valley with a kink: the line search eventually fails, but the
  // result must still be the best point seen
  Objective f = [](const std::vector<double>& x, std::vector<double>& g) {
    g.assign(1, x[0] >= 0.0 ? 1.0 : -1.0);
    return std::fabs(x[0]);
  };
  LbfgsResult res = lbfgs_minimize(f, {0.7});
  CHECK(res.fx <= 0.7);
  for (double v : res.report.loss_history) CHECK(res.fx <= v + 1e-15);
}
