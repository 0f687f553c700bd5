#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "kanlm/errors.hpp"
#include "kanlm/expr.hpp"

using namespace kanlm;

namespace {

ExprPtr quadratic() {
  // 2 V^2 + 3 V + 1
  return make_sum({make_product({make_const(2.0), make_power(make_var("V"), 2)}),
                   make_product({make_const(3.0), make_var("V")}), make_const(1.0)});
}

}  // namespace

TEST_CASE("render golden strings") {
  CHECK(render(make_const(5.0), 4) == "5.0000");
  CHECK(render(quadratic(), 4) == "2.0000V^2 + 3.0000V + 1.0000");
  CHECK(render(make_const(-2.25), 2) == "-2.25");
}

TEST_CASE("evaluate") {
  std::map<std::string, double> at{{"V", 2.0}};
  CHECK(evaluate(quadratic(), at) == doctest::Approx(15.0).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate(make_var("f"), at), InvalidInput);

  // log of a negative argument names the offending candidate
  ExprPtr bad = make_unary(CandidateId::Log, make_var("V"), 1.0, -5.0, 1.0, 0.0);
  CHECK_THROWS_AS(evaluate(bad, at), EvalDomainError);
}

TEST_CASE("rendered equations parse back") {
  std::string line = "P = " + render(quadratic(), 4);
  ParsedEquation pe = parse_equation(line);
  CHECK(pe.target == "P");
  for (double v : {-1.5, 0.0, 0.3, 2.0}) {
    std::map<std::string, double> at{{"V", v}};
    CHECK(evaluate(pe.expr, at) == doctest::Approx(evaluate(quadratic(), at)).epsilon(1e-12));
  }
  // and the round trip is string-stable
  CHECK("P = " + render(pe.expr, 4) == line);
}

TEST_CASE("transcendental terms round trip through the equation grammar") {
  ExprPtr e = make_sum({make_unary(CandidateId::Sin, make_var("V"), -2.3219, 1.25, 4.5, 0.0),
                        make_unary(CandidateId::Exp, make_var("f"), 0.51, -0.02, -1.75, 0.0),
                        make_const(60.25)});
  std::string line = "Q = " + render(e, 4);
  ParsedEquation pe = parse_equation(line);
  CHECK(pe.target == "Q");
  for (double v : {-1.0, 0.2, 1.4}) {
    std::map<std::string, double> at{{"V", v}, {"f", 0.8 * v + 0.1}};
    CHECK(evaluate(pe.expr, at) == doctest::Approx(evaluate(e, at)).epsilon(1e-9));
  }
}

TEST_CASE("s-expression serialization is exact") {
  ExprPtr e = make_sum({make_product({make_const(0.1234567890123456789), make_var("V")}),
                        make_unary(CandidateId::Tanh, make_var("f"), 1.5, -0.25, 2.0, 3.0),
                        make_power(make_var("V"), 3)});
  std::string text = expr_to_text(e);
  ExprPtr back = expr_from_text(text);
  CHECK(expr_to_text(back) == text);
  for (double v : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    std::map<std::string, double> at{{"V", v}, {"f", v * 0.5}};
    // bit-exact evaluation after the round trip
    CHECK(evaluate(back, at) == evaluate(e, at));
  }
}

TEST_CASE("variables are collected once") {
  ExprPtr e = quadratic();
  std::vector<std::string> vars = expr_variables(e);
  REQUIRE(vars.size() == 1);
  CHECK(vars[0] == "V");
  CHECK_FALSE(has_spline_marker(e));
}

TEST_CASE("spline markers are rejected by the equation parser") {
  CHECK_THROWS_AS(parse_equation("P = 2.0000spline[0.0.0](1.0000V + 0.5000) + 1.0000"),
                  InvalidInput);
  // and a marker-free parse failure cites the problem
  CHECK_THROWS_AS(parse_equation("no equals sign here"), InvalidInput);
  CHECK_THROWS_AS(parse_equation("P = 2.0 $ 3.0"), InvalidInput);
}
