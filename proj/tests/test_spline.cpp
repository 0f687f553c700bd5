#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kanlm/rng.hpp"
#include "kanlm/spline.hpp"

using namespace kanlm;

TEST_CASE("make_grid layout") {
  KnotGrid g = make_grid(-1.0, 2.0, 5, 3);
  CHECK(g.basis_count() == 8);
  REQUIRE(g.knots.size() == 5 + 2 * 3 + 1);
  CHECK(g.knots[3] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(g.knots[3 + 5] == doctest::Approx(2.0).epsilon(1e-15));
  // uniform spacing, including the extension knots
  const double h = 3.0 / 5.0;
  for (std::size_t i = 1; i < g.knots.size(); ++i)
    CHECK(g.knots[i] - g.knots[i - 1] == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("frozen cubic values at the interval midpoint") {
  // Single-interval cubic grid on [0, 1]: the four active basis functions
  // at x = 0.5 take the classic uniform B-spline weights {1, 23, 23, 1}/48.
  KnotGrid g = make_grid(0.0, 1.0, 1, 3);
  std::vector<double> row = basis_row(g, 0.5);
  REQUIRE(row.size() == 4);
  CHECK(row[0] == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
  CHECK(row[1] == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
  CHECK(row[2] == doctest::Approx(23.0 / 48.0).epsilon(1e-12));
  CHECK(row[3] == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
}

TEST_CASE("partition of unity across degrees and grid sizes") {
  Rng rng(7);
  for (int degree = 0; degree <= 3; ++degree)
    for (int intervals : {1, 3, 5, 10}) {
      KnotGrid g = make_grid(-2.0, 1.5, intervals, degree);
      for (int rep = 0; rep < 50; ++rep) {
        double x = rng.uniform(-2.0, 1.5);
        std::vector<double> row = basis_row(g, x);
        double sum = 0.0;
        for (double b : row) sum += b;
        CHECK(std::fabs(sum - 1.0) < 1e-9);
      }
      // both domain endpoints included
      for (double x : {-2.0, 1.5}) {
        double sum = 0.0;
        for (double b : basis_row(g, x)) sum += b;
        CHECK(std::fabs(sum - 1.0) < 1e-9);
      }
    }
}

TEST_CASE("local support is exact") {
  KnotGrid g = make_grid(0.0, 1.0, 5, 3);
  for (int i = 0; i < g.basis_count(); ++i) {
    const double lo = g.knots[i];
    const double hi = g.knots[i + g.degree + 1];
    CHECK(basis_value(g, i, lo - 0.01) == 0.0);
    CHECK(basis_value(g, i, hi + 0.01) == 0.0);
    CHECK(basis_value(g, i, 0.5 * (lo + hi)) > 0.0);
  }
}

TEST_CASE("basis_row matches basis_value bit for bit") {
  Rng rng(3);
  for (int degree = 0; degree <= 3; ++degree) {
    KnotGrid g = make_grid(-1.0, 1.0, 5, degree);
    for (int rep = 0; rep < 20; ++rep) {
      double x = rng.uniform(-1.0, 1.0);
      std::vector<double> row = basis_row(g, x);
      for (int i = 0; i < g.basis_count(); ++i) CHECK(row[i] == basis_value(g, i, x));
    }
  }
}

TEST_CASE("derivatives agree with central differences") {
  Rng rng(11);
  const double h = 1e-6;
  for (int degree = 1; degree <= 3; ++degree)
    for (int intervals : {1, 3, 5, 10}) {
      KnotGrid g = make_grid(-1.0, 1.0, intervals, degree);
      std::vector<double> vals, ders;
      for (int rep = 0; rep < 30; ++rep) {
        // keep clear of the knots, where the derivative may jump for low degree
        double x = rng.uniform(-0.999, 0.999);
        basis_row(g, x, vals, ders);
        std::vector<double> up = basis_row(g, x + h);
        std::vector<double> dn = basis_row(g, x - h);
        for (int i = 0; i < g.basis_count(); ++i) {
          double fd = (up[i] - dn[i]) / (2.0 * h);
          CHECK(std::fabs(ders[i] - fd) < 1e-6 * std::max(1.0, std::fabs(fd)));
        }
      }
    }
}

TEST_CASE("spline_eval is the coefficient dot product") {
  KnotGrid g = make_grid(-1.0, 1.0, 4, 3);
  Rng rng(5);
  std::vector<double> c;
  for (int i = 0; i < g.basis_count(); ++i) c.push_back(rng.normal(0.0, 1.0));
  for (int rep = 0; rep < 20; ++rep) {
    double x = rng.uniform(-1.0, 1.0);
    std::vector<double> row = basis_row(g, x);
    double dot = 0.0;
    for (int i = 0; i < g.basis_count(); ++i) dot += c[i] * row[i];
    CHECK(std::fabs(spline_eval(g, c, x) - dot) < 1e-12);
  }
}

TEST_CASE("refit_grid onto the same grid is the identity in values") {
  KnotGrid g = make_grid(-1.0, 1.0, 5, 3);
  Rng rng(17);
  std::vector<double> c;
  for (int i = 0; i < g.basis_count(); ++i) c.push_back(rng.normal(0.0, 1.0));
  std::vector<double> c2 = refit_grid(g, c, g, 64);
  for (int rep = 0; rep < 40; ++rep) {
    double x = rng.uniform(-1.0, 1.0);
    CHECK(std::fabs(spline_eval(g, c2, x) - spline_eval(g, c, x)) < 1e-8);
  }
}

TEST_CASE("refit_grid onto a doubled grid reproduces the spline") {
  KnotGrid g = make_grid(-1.0, 1.0, 5, 3);
  Rng rng(23);
  std::vector<double> c;
  for (int i = 0; i < g.basis_count(); ++i) c.push_back(rng.normal(0.0, 1.0));

  // a cubic space on the doubled grid contains the original space, so the
  // least-squares refit is exact up to conditioning
  KnotGrid fine = make_grid(-1.0, 1.0, 10, 3);
  std::vector<double> cf = refit_grid(g, c, fine, 256);
  for (int rep = 0; rep < 60; ++rep) {
    double x = rng.uniform(-1.0, 1.0);
    CHECK(std::fabs(spline_eval(fine, cf, x) - spline_eval(g, c, x)) < 1e-6);
  }

  // constants refit to the all-equal coefficient vector (partition of unity)
  std::vector<double> ones(g.basis_count(), 1.0);
  std::vector<double> of = refit_grid(g, ones, fine, 256);
  for (double v : of) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("refit_grid onto a wider domain tracks the old spline inside it") {
  KnotGrid g = make_grid(-1.0, 1.0, 5, 3);
  Rng rng(29);
  std::vector<double> c;
  for (int i = 0; i < g.basis_count(); ++i) c.push_back(rng.normal(0.0, 1.0));

  // Outside its knots the old spline decays to zero, so samples beyond the
  // old boundary drag the fit there; interior agreement stays loose but real.
  KnotGrid wide = make_grid(-1.2, 1.3, 10, 3);
  std::vector<double> cw = refit_grid(g, c, wide, 256);
  REQUIRE(static_cast<int>(cw.size()) == wide.basis_count());
  for (int rep = 0; rep < 60; ++rep) {
    double x = rng.uniform(-0.9, 0.9);
    CHECK(std::fabs(spline_eval(wide, cw, x) - spline_eval(g, c, x)) < 0.1);
  }
}
