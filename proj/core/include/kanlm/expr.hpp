#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kanlm/candidates.hpp"
#include "kanlm/kan.hpp"

namespace kanlm {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Numeric leftover for an edge whose activation matched no candidate well
// enough: the edge is kept verbatim and evaluated numerically. layer/j/i
// say where it came from.
struct SplinePayload {
  ActivationEdge edge;
  int layer = 0;
  int j = 0;
  int i = 0;
};

// Immutable expression tree. Sum/Product hold >= 1 children; Power is
// kids[0] raised to a non-negative integer exponent; Unary evaluates
// c * g(a * kids[0] + b) + d for library candidate g; Spline evaluates the
// retained numeric edge on kids[0].
struct Expr {
  enum class Kind { Constant, Variable, Sum, Product, Power, Unary, Spline };

  Kind kind = Kind::Constant;
  double value = 0.0;       // Constant
  std::string name;         // Variable
  std::vector<ExprPtr> kids;
  int exponent = 0;         // Power
  CandidateId cid = CandidateId::X;  // Unary
  double a = 1.0, b = 0.0, c = 1.0, d = 0.0;  // Unary affine wrap
  std::shared_ptr<const SplinePayload> payload;  // Spline
};

ExprPtr make_const(double v);
ExprPtr make_var(const std::string& name);
ExprPtr make_sum(std::vector<ExprPtr> kids);
ExprPtr make_product(std::vector<ExprPtr> kids);
ExprPtr make_power(ExprPtr base, int exponent);
ExprPtr make_unary(CandidateId cid, ExprPtr arg, double a, double b, double c, double d);
ExprPtr make_spline(std::shared_ptr<const SplinePayload> payload, ExprPtr arg);

bool has_spline_marker(const ExprPtr& e);
std::vector<std::string> expr_variables(const ExprPtr& e);

// Total deterministic evaluation; candidate domain violations raise
// EvalDomainError naming the offending node.
double evaluate(const ExprPtr& e, const std::map<std::string, double>& point);

// Fixed-decimal text in equation style: descending-degree polynomial
// terms, transcendental terms, then the constant, e.g.
// "32.5940V^2 + 464.0080V + 1663.8610". Renders any tree; canonical
// ordering is simplify's job.
std::string render(const ExprPtr& e, int decimals);

// Versioned s-expression serialization with exact round trip.
std::string expr_to_text(const ExprPtr& e);
ExprPtr expr_from_text(const std::string& text);

// Parses one "<target> = <expression>" line in the rendered grammar back
// into a tree. Spline markers are rejected with a clear message.
struct ParsedEquation {
  std::string target;
  ExprPtr expr;
};
ParsedEquation parse_equation(const std::string& line);

}  // namespace kanlm
