#pragma once

#include <string>
#include <vector>

namespace kanlm {

/// Unary candidate functions a spline activation can be locked to.
/// The enum order is the library order and the documented tie-break
/// order during fitting.
enum class CandidateId : int {
  X = 0,
  X2,
  X3,
  X4,
  Exp,
  Log,
  Sqrt,
  Abs,
  Sin,
  Tanh,
  Sigmoid,
  Inv,
  Const,
};

struct CandidateEval {
  double value = 0.0;
  double deriv = 0.0;
};

/// All candidates, in fitting order.
const std::vector<CandidateId>& default_library();

const char* candidate_name(CandidateId id);
bool candidate_from_name(const std::string& name, CandidateId& out);

/// True when g(u) is finite and real (log needs u > 0, sqrt u >= 0,
/// 1/u needs u != 0, exp is capped before overflow).
bool candidate_in_domain(CandidateId id, double u);

/// g(u) and g'(u). Throws EvalDomainError naming the candidate when u is
/// outside its domain.
CandidateEval candidate_eval(CandidateId id, double u);

/// Polynomial degree for x, x^2, x^3, x^4 and const; -1 for the rest.
int candidate_poly_degree(CandidateId id);

}  // namespace kanlm
