#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kanlm/bayesopt.hpp"

using namespace kanlm;

namespace {

// Independent radical-inverse oracle.
double radical_inverse(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

TEST_CASE("halton matches the radical inverse") {
  CHECK(halton(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(halton(2, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(halton(3, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(halton(4, 3) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  for (std::uint64_t i = 1; i < 200; ++i)
    for (int b : {2, 3, 5, 7})
      CHECK(halton(i, b) == doctest::Approx(radical_inverse(i, b)).epsilon(1e-15));
}

TEST_CASE("integer dimension search finds the minimum") {
  BoSpace space;
  space.dims.push_back({"g", 3.0, 12.0, true, false});
  auto obj = [](const BoPoint& p, int) {
    double g = p.at("g");
    return (g - 5.0) * (g - 5.0);
  };
  BoResult res = bayes_opt(space, obj, 15, 6, 42);
  CHECK(res.best_point.at("g") == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(res.best_objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(static_cast<int>(res.ledger.size()) == 15);
}

TEST_CASE("initial design is the documented seeded Halton stream") {
  BoSpace space;
  space.dims.push_back({"a", -2.0, 4.0, false, false});
  space.dims.push_back({"lam", 1e-6, 1e-2, false, true});
  space.dims.push_back({"g", 3.0, 12.0, true, false});
  auto obj = [](const BoPoint& p, int) { return p.at("a") * p.at("a"); };
  const std::uint64_t seed = 1234;
  const int budget = 5;
  BoResult res = bayes_opt(space, obj, budget, budget, seed);
  REQUIRE(static_cast<int>(res.ledger.size()) == budget);

  const int primes[] = {2, 3, 5};
  for (int j = 0; j < budget; ++j) {
    const std::uint64_t idx = seed % 997 + static_cast<std::uint64_t>(j) + 1;
    // dim 0: linear
    double u0 = radical_inverse(idx, primes[0]);
    CHECK(res.ledger[j].point.at("a") == doctest::Approx(-2.0 + 6.0 * u0).epsilon(1e-12));
    // dim 1: log10 scale
    double u1 = radical_inverse(idx, primes[1]);
    double lam = std::pow(10.0, -6.0 + u1 * 4.0);
    CHECK(res.ledger[j].point.at("lam") == doctest::Approx(lam).epsilon(1e-12));
    // dim 2: integer rounding
    double u2 = radical_inverse(idx, primes[2]);
    CHECK(res.ledger[j].point.at("g") ==
          doctest::Approx(std::nearbyint(3.0 + 9.0 * u2)).epsilon(1e-12));
  }
}

TEST_CASE("best objective equals the ledger minimum and reruns are identical") {
  BoSpace space;
  space.dims.push_back({"x", -3.0, 3.0, false, false});
  auto obj = [](const BoPoint& p, int) {
    double x = p.at("x");
    return std::sin(3.0 * x) + 0.5 * x * x;
  };
  BoResult a = bayes_opt(space, obj, 18, 6, 9);
  BoResult b = bayes_opt(space, obj, 18, 6, 9);

  double lo = 1e300;
  for (const BoTrial& t : a.ledger)
    if (!t.failed) lo = std::min(lo, t.objective);
  CHECK(a.best_objective == doctest::Approx(lo).epsilon(1e-15));

  REQUIRE(a.ledger.size() == b.ledger.size());
  for (std::size_t i = 0; i < a.ledger.size(); ++i) {
    CHECK(a.ledger[i].objective == b.ledger[i].objective);
    CHECK(a.ledger[i].point.at("x") == b.ledger[i].point.at("x"));
  }
}

TEST_CASE("throwing trials are recorded as failures and skipped for best") {
  BoSpace space;
  space.dims.push_back({"x", 0.0, 1.0, false, false});
  int calls = 0;
  auto obj = [&](const BoPoint& p, int trial) {
    ++calls;
    if (trial % 2 == 0) throw std::runtime_error("unstable");
    return p.at("x");
  };
  BoResult res = bayes_opt(space, obj, 8, 4, 5);
  CHECK(calls == 8);
  int failed = 0;
  for (const BoTrial& t : res.ledger) failed += t.failed ? 1 : 0;
  CHECK(failed == 4);
  CHECK(res.diagnostics.failed_trials == 4);
  for (const BoTrial& t : res.ledger)
    if (!t.failed) CHECK(res.best_objective <= t.objective);
  CHECK(std::isfinite(res.best_objective));
}
