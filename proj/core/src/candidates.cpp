#include "kanlm/candidates.hpp"

#include <cmath>

#include "kanlm/errors.hpp"

namespace kanlm {

const std::vector<CandidateId>& default_library() {
  static const std::vector<CandidateId> lib = {
      CandidateId::X,    CandidateId::X2,  CandidateId::X3,      CandidateId::X4,
      CandidateId::Exp,  CandidateId::Log, CandidateId::Sqrt,    CandidateId::Abs,
      CandidateId::Sin,  CandidateId::Tanh, CandidateId::Sigmoid, CandidateId::Inv,
      CandidateId::Const,
  };
  return lib;
}

const char* candidate_name(CandidateId id) {
  switch (id) {
    case CandidateId::X: return "x";
    case CandidateId::X2: return "x^2";
    case CandidateId::X3: return "x^3";
    case CandidateId::X4: return "x^4";
    case CandidateId::Exp: return "exp";
    case CandidateId::Log: return "log";
    case CandidateId::Sqrt: return "sqrt";
    case CandidateId::Abs: return "abs";
    case CandidateId::Sin: return "sin";
    case CandidateId::Tanh: return "tanh";
    case CandidateId::Sigmoid: return "sigmoid";
    case CandidateId::Inv: return "1/x";
    case CandidateId::Const: return "const";
  }
  return "?";
}

bool candidate_from_name(const std::string& name, CandidateId& out) {
  for (CandidateId id : default_library()) {
    if (name == candidate_name(id)) {
      out = id;
      return true;
    }
  }
  return false;
}

bool candidate_in_domain(CandidateId id, double u) {
  if (!std::isfinite(u)) return false;
  switch (id) {
    case CandidateId::Log: return u > 0.0;
    case CandidateId::Sqrt: return u >= 0.0;
    case CandidateId::Inv: return u != 0.0;
    case CandidateId::Exp: return u <= 709.0;  // exp overflows just past this
    default: return true;
  }
}

CandidateEval candidate_eval(CandidateId id, double u) {
  if (!candidate_in_domain(id, u)) {
    throw EvalDomainError(std::string("candidate '") + candidate_name(id) +
                          "' evaluated outside its domain (argument " + std::to_string(u) + ")");
  }
  switch (id) {
    case CandidateId::X: return {u, 1.0};
    case CandidateId::X2: return {u * u, 2.0 * u};
    case CandidateId::X3: return {u * u * u, 3.0 * u * u};
    case CandidateId::X4: return {u * u * u * u, 4.0 * u * u * u};
    case CandidateId::Exp: {
      const double e = std::exp(u);
      return {e, e};
    }
    case CandidateId::Log: return {std::log(u), 1.0 / u};
    case CandidateId::Sqrt: {
      const double s = std::sqrt(u);
      return {s, u > 0.0 ? 0.5 / s : 0.0};
    }
    case CandidateId::Abs: return {std::fabs(u), u >= 0.0 ? 1.0 : -1.0};
    case CandidateId::Sin: return {std::sin(u), std::cos(u)};
    case CandidateId::Tanh: {
      const double t = std::tanh(u);
      return {t, 1.0 - t * t};
    }
    case CandidateId::Sigmoid: {
      const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
      return {s, s * (1.0 - s)};
    }
    case CandidateId::Inv: return {1.0 / u, -1.0 / (u * u)};
    case CandidateId::Const: return {1.0, 0.0};
  }
  throw InvalidInput("candidate_eval: unknown candidate");
}

int candidate_poly_degree(CandidateId id) {
  switch (id) {
    case CandidateId::X: return 1;
    case CandidateId::X2: return 2;
    case CandidateId::X3: return 3;
    case CandidateId::X4: return 4;
    case CandidateId::Const: return 0;
    default: return -1;
  }
}

}  // namespace kanlm
