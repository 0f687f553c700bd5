#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "kanlm/errors.hpp"
#include "kanlm/rng.hpp"
#include "kanlm/symbolic.hpp"

using namespace kanlm;

namespace {

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

// Least-squares spline coefficients approximating fn over the grid domain,
// so tests can plant a known shape inside an unlocked edge.
template <typename Fn>
ActivationEdge planted_edge(double lo, double hi, int intervals, Fn fn) {
  ActivationEdge e;
  e.grid = make_grid(lo, hi, intervals, 3);
  const int nb = e.grid.basis_count();
  const int m = 40 * nb;
  std::vector<std::vector<double>> ata(nb, std::vector<double>(nb, 0.0));
  std::vector<double> atb(nb, 0.0);
  for (int s = 0; s < m; ++s) {
    double x = lo + (hi - lo) * s / (m - 1.0);
    std::vector<double> row = basis_row(e.grid, x);
    double y = fn(x);
    for (int i = 0; i < nb; ++i) {
      atb[i] += row[i] * y;
      for (int j = 0; j < nb; ++j) ata[i][j] += row[i] * row[j];
    }
  }
  e.coeffs = solve_dense(ata, atb);
  e.w_b = 0.0;
  e.w_s = 1.0;
  return e;
}

double eval1(const ExprPtr& e, double v) {
  std::map<std::string, double> at{{"x0", v}, {"V", v}};
  return evaluate(e, at);
}

}  // namespace

TEST_CASE("fit_candidate recovers a planted quadratic") {
  Rng rng(3);
  std::vector<double> xs, ys;
  for (int i = 0; i < 300; ++i) {
    double x = rng.uniform(-2.0, 2.0);
    xs.push_back(x);
    double u = 1.5 * x - 0.5;
    ys.push_back(2.0 * u * u + 3.0);
  }
  CandidateFit quad = fit_candidate(xs, ys, CandidateId::X2);
  REQUIRE(quad.feasible);
  CHECK(quad.r2 > 0.99999);
  for (std::size_t i = 0; i < xs.size(); i += 37) {
    double u = quad.a * xs[i] + quad.b;
    CHECK(std::fabs(quad.c * u * u + quad.d - ys[i]) < 1e-5 * std::max(1.0, std::fabs(ys[i])));
  }
  // the wrong shapes score clearly lower
  CHECK(fit_candidate(xs, ys, CandidateId::X).r2 < quad.r2 - 1e-3);
  CHECK(fit_candidate(xs, ys, CandidateId::X3).r2 < quad.r2 - 1e-4);
  CHECK(fit_candidate(xs, ys, CandidateId::Exp).r2 < quad.r2 - 1e-4);
}

TEST_CASE("fit_candidate recovers a planted exponential") {
  Rng rng(5);
  std::vector<double> xs, ys;
  for (int i = 0; i < 300; ++i) {
    double x = rng.uniform(-1.5, 1.5);
    xs.push_back(x);
    ys.push_back(0.8 * std::exp(0.9 * x + 0.1) - 2.0);
  }
  CandidateFit f = fit_candidate(xs, ys, CandidateId::Exp);
  REQUIRE(f.feasible);
  CHECK(f.r2 > 0.999999);
  for (std::size_t i = 0; i < xs.size(); i += 29) {
    double pred = f.c * std::exp(f.a * xs[i] + f.b) + f.d;
    CHECK(std::fabs(pred - ys[i]) < 1e-4 * std::max(1.0, std::fabs(ys[i])));
  }
}

TEST_CASE("fit_candidate on a constant target") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(0.1 * i);
    ys.push_back(7.25);
  }
  CandidateFit c = fit_candidate(xs, ys, CandidateId::Const);
  CHECK(c.feasible);
  CHECK(c.r2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.d == doctest::Approx(7.25).epsilon(1e-12));
  CHECK_FALSE(fit_candidate(xs, ys, CandidateId::X2).feasible);
}

TEST_CASE("log cannot fake a symmetric target over a huge range") {
  // only a = 0 keeps a*x + b positive across +-100, which flattens log to a
  // constant; either the fit is infeasible or it explains nothing
  std::vector<double> xs, ys;
  for (int i = 0; i < 60; ++i) {
    double x = -100.0 + 200.0 * i / 59.0;
    xs.push_back(x);
    ys.push_back(x * x);
  }
  CandidateFit f = fit_candidate(xs, ys, CandidateId::Log);
  CHECK((!f.feasible || f.r2 < 0.5));
}

TEST_CASE("symbolify_edge picks the planted sine") {
  ActivationEdge e = planted_edge(-3.0, 3.0, 12, [](double x) { return std::sin(x); });
  Rng rng(9);
  std::vector<double> obs;
  for (int i = 0; i < 700; ++i) obs.push_back(rng.uniform(-3.0, 3.0));
  CandidateFit f = symbolify_edge(e, obs, default_library());
  CHECK(f.cid == CandidateId::Sin);
  CHECK(f.r2 > 0.999);
}

TEST_CASE("symbolify_edge prefers the simpler form on a near tie") {
  // a straight line: X must win even though many candidates fit it almost
  // perfectly on a short arc
  ActivationEdge e = planted_edge(-1.0, 1.0, 8, [](double x) { return 0.4 * x - 0.2; });
  Rng rng(11);
  std::vector<double> obs;
  for (int i = 0; i < 500; ++i) obs.push_back(rng.uniform(-1.0, 1.0));
  CandidateFit f = symbolify_edge(e, obs, default_library());
  CHECK(f.cid == CandidateId::X);
}

TEST_CASE("simplify expands an affine square") {
  // 2 (x + 1)^2 + 3 = 2 x^2 + 4 x + 5
  ExprPtr e = make_unary(CandidateId::X2, make_var("V"), 1.0, 1.0, 2.0, 3.0);
  ExprPtr flat = simplify(e, 4);
  CHECK(render(flat, 4) == "2.0000V^2 + 4.0000V + 5.0000");

  // without expansion the squared-affine form survives
  ExprPtr keep = simplify(e, 4, false);
  std::string kept = render(keep, 4);
  CHECK(kept.find("^2") != std::string::npos);
  CHECK(kept.find("V^2") == std::string::npos);
  for (double v : {-1.2, 0.0, 0.8}) {
    CHECK(eval1(flat, v) == doctest::Approx(2.0 * (v + 1) * (v + 1) + 3.0).epsilon(1e-12));
    CHECK(eval1(keep, v) == doctest::Approx(eval1(flat, v)).epsilon(1e-12));
  }
}

TEST_CASE("simplify drops terms that round to zero") {
  ExprPtr e = make_sum({make_product({make_const(1e-9), make_power(make_var("V"), 2)}),
                        make_product({make_const(2.5), make_var("V")}), make_const(1.0)});
  CHECK(render(simplify(e, 4), 4) == "2.5000V + 1.0000");
}

TEST_CASE("simplify canonicalizes term order and is idempotent") {
  // ascending input order must come out descending by degree
  ExprPtr e = make_sum({make_const(1.0), make_product({make_const(3.0), make_var("V")}),
                        make_product({make_const(2.0), make_power(make_var("V"), 2)})});
  ExprPtr s1 = simplify(e, 4);
  CHECK(render(s1, 4) == "2.0000V^2 + 3.0000V + 1.0000");
  ExprPtr s2 = simplify(s1, 4);
  CHECK(render(s2, 4) == render(s1, 4));
}

TEST_CASE("denormalize matches the two-step path") {
  NormStats stats;
  stats.channels[Channel::V] = {0.9904, 0.0592};
  stats.channels[Channel::P] = {99.07, 6.057};

  ExprPtr e = make_sum({make_product({make_const(0.8), make_power(make_var("V"), 2)}),
                        make_unary(CandidateId::Tanh, make_var("V"), 0.7, -0.1, 1.3, 0.2),
                        make_product({make_const(-0.45), make_var("V")}), make_const(0.05)});

  for (bool expand : {true, false}) {
    ExprPtr phys = denormalize(e, stats, Channel::P, expand);
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
      double v = rng.uniform(0.55, 1.15);
      double z = (v - 0.9904) / 0.0592;
      std::map<std::string, double> zp{{"V", z}};
      double two_step = 6.057 * evaluate(e, zp) + 99.07;
      std::map<std::string, double> vp{{"V", v}};
      double direct = evaluate(phys, vp);
      CHECK(std::fabs(direct - two_step) <= 1e-9 * std::max(1.0, std::fabs(two_step)));
    }
  }
}

TEST_CASE("extraction reproduces a planted single-layer network") {
  // [2, 1]: output = exp-shaped edge on x0 plus quadratic edge on x1
  KanNetwork net;
  net.widths = {2, 1};
  KanLayer layer;
  layer.n_in = 2;
  layer.n_out = 1;
  // fine grids keep the planting residual well under the fidelity bound
  layer.edges.push_back(planted_edge(-1.5, 1.5, 96, [](double x) { return std::exp(0.8 * x); }));
  layer.edges.push_back(planted_edge(-1.5, 1.5, 96, [](double x) { return x * x - 0.5 * x; }));
  net.layers.push_back(layer);

  Rng rng(31);
  std::vector<std::vector<double>> X;
  for (int i = 0; i < 1000; ++i)
    X.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});

  Extraction ex = extract_network(net, X);
  REQUIRE(ex.outputs.size() == 1);
  CHECK(ex.unresolved.empty());
  CHECK_FALSE(has_spline_marker(ex.outputs[0]));

  double worst = 0.0;
  for (const auto& x : X) {
    std::map<std::string, double> at{{"x0", x[0]}, {"x1", x[1]}};
    worst = std::max(worst, std::fabs(evaluate(ex.outputs[0], at) - network_forward(net, x)[0]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("extraction composes through a hidden layer") {
  KanNetwork net;
  net.widths = {1, 2, 1};
  KanLayer l0;
  l0.n_in = 1;
  l0.n_out = 2;
  l0.edges.push_back(planted_edge(-1.5, 1.5, 96, [](double x) { return x * x; }));
  l0.edges.push_back(planted_edge(-1.5, 1.5, 96, [](double x) { return std::sin(1.3 * x); }));
  KanLayer l1;
  l1.n_in = 2;
  l1.n_out = 1;
  l1.edges.push_back(planted_edge(-2.5, 2.5, 96, [](double x) { return std::tanh(x); }));
  l1.edges.push_back(planted_edge(-2.5, 2.5, 96, [](double x) { return 0.5 * x; }));
  net.layers.push_back(l0);
  net.layers.push_back(l1);

  Rng rng(33);
  std::vector<std::vector<double>> X;
  for (int i = 0; i < 1000; ++i) X.push_back({rng.uniform(-1.5, 1.5)});

  ExtractOptions opts;
  opts.var_names = {"V"};
  Extraction ex = extract_network(net, X, opts);
  CHECK(ex.unresolved.empty());
  double worst = 0.0;
  for (const auto& x : X) {
    std::map<std::string, double> at{{"V", x[0]}};
    worst = std::max(worst, std::fabs(evaluate(ex.outputs[0], at) - network_forward(net, x)[0]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("an edge matching no candidate stays numeric") {
  KanNetwork net;
  net.widths = {1, 1};
  KanLayer layer;
  layer.n_in = 1;
  layer.n_out = 1;
  layer.edges.push_back(planted_edge(
      -2.0, 2.0, 12, [](double x) { return std::sin(4.0 * x) + 0.4 * std::sin(9.7 * x); }));
  net.layers.push_back(layer);

  Rng rng(35);
  std::vector<std::vector<double>> X;
  for (int i = 0; i < 800; ++i) X.push_back({rng.uniform(-2.0, 2.0)});

  Extraction ex = extract_network(net, X);
  REQUIRE(ex.unresolved.size() == 1);
  CHECK(has_spline_marker(ex.outputs[0]));
  // the marker evaluates the retained edge, so the expression still agrees
  for (const auto& x : X) {
    std::map<std::string, double> at{{"x0", x[0]}};
    CHECK(std::fabs(evaluate(ex.outputs[0], at) - network_forward(net, x)[0]) < 1e-9);
  }
}
