#include "kanlm/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "kanlm/errors.hpp"

namespace kanlm {

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

}  // namespace

ExprPtr make_const(double v) {
  Expr e;
  e.kind = Expr::Kind::Constant;
  e.value = v;
  return node(std::move(e));
}

ExprPtr make_var(const std::string& name) {
  if (name.empty()) throw InvalidInput("variable name must be non-empty");
  Expr e;
  e.kind = Expr::Kind::Variable;
  e.name = name;
  return node(std::move(e));
}

ExprPtr make_sum(std::vector<ExprPtr> kids) {
  if (kids.empty()) return make_const(0.0);
  if (kids.size() == 1) return kids.front();
  Expr e;
  e.kind = Expr::Kind::Sum;
  e.kids = std::move(kids);
  return node(std::move(e));
}

ExprPtr make_product(std::vector<ExprPtr> kids) {
  if (kids.empty()) return make_const(1.0);
  if (kids.size() == 1) return kids.front();
  Expr e;
  e.kind = Expr::Kind::Product;
  e.kids = std::move(kids);
  return node(std::move(e));
}

ExprPtr make_power(ExprPtr base, int exponent) {
  if (exponent < 0) throw InvalidInput("power exponent must be non-negative");
  Expr e;
  e.kind = Expr::Kind::Power;
  e.kids = {std::move(base)};
  e.exponent = exponent;
  return node(std::move(e));
}

ExprPtr make_unary(CandidateId cid, ExprPtr arg, double a, double b, double c, double d) {
  Expr e;
  e.kind = Expr::Kind::Unary;
  e.cid = cid;
  e.kids = {std::move(arg)};
  e.a = a;
  e.b = b;
  e.c = c;
  e.d = d;
  return node(std::move(e));
}

ExprPtr make_spline(std::shared_ptr<const SplinePayload> payload, ExprPtr arg) {
  if (!payload) throw InvalidInput("spline node needs a payload");
  Expr e;
  e.kind = Expr::Kind::Spline;
  e.payload = std::move(payload);
  e.kids = {std::move(arg)};
  return node(std::move(e));
}

bool has_spline_marker(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Spline) return true;
  for (const ExprPtr& k : e->kids)
    if (has_spline_marker(k)) return true;
  return false;
}

namespace {

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == Expr::Kind::Variable) out.insert(e->name);
  for (const ExprPtr& k : e->kids) collect_vars(k, out);
}

}  // namespace

std::vector<std::string> expr_variables(const ExprPtr& e) {
  std::set<std::string> s;
  collect_vars(e, s);
  return {s.begin(), s.end()};
}

double evaluate(const ExprPtr& e, const std::map<std::string, double>& point) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      return e->value;
    case Expr::Kind::Variable: {
      auto it = point.find(e->name);
      if (it == point.end()) throw InvalidInput("evaluate: no value for variable " + e->name);
      return it->second;
    }
    case Expr::Kind::Sum: {
      double s = 0.0;
      for (const ExprPtr& k : e->kids) s += evaluate(k, point);
      return s;
    }
    case Expr::Kind::Product: {
      double p = 1.0;
      for (const ExprPtr& k : e->kids) p *= evaluate(k, point);
      return p;
    }
    case Expr::Kind::Power: {
      const double base = evaluate(e->kids[0], point);
      double p = 1.0;
      for (int i = 0; i < e->exponent; ++i) p *= base;
      return p;
    }
    case Expr::Kind::Unary: {
      const double u = e->a * evaluate(e->kids[0], point) + e->b;
      return e->c * candidate_eval(e->cid, u).value + e->d;
    }
    case Expr::Kind::Spline:
      return edge_forward(e->payload->edge, evaluate(e->kids[0], point));
  }
  throw InvalidInput("evaluate: unknown node kind");
}

namespace {

std::string fmt(double x, int decimals) {
  if (x == 0.0) x = 0.0;  // clears the sign of -0
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  bool nonzero_digit = false;
  for (char ch : s)
    if (ch >= '1' && ch <= '9') nonzero_digit = true;
  if (!nonzero_digit && !s.empty() && s[0] == '-') s.erase(s.begin());
  return s;
}

// True when the string has a top-level binary +/- and would need parens as
// a product factor or power base.
bool loose(const std::string& s) {
  int depth = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '[') ++depth;
    if (s[i] == ')' || s[i] == ']') --depth;
    if (depth == 0 && s[i] == ' ' && (s[i + 1] == '+' || s[i + 1] == '-')) return true;
  }
  return false;
}

bool starts_with_digit(const std::string& s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) != 0);
}

struct Renderer {
  int decimals;

  std::string sum(const ExprPtr& e) const {
    std::string out;
    bool first = true;
    for (const ExprPtr& k : e->kids) {
      auto [neg, body] = signed_term(k);
      if (first) {
        out += neg ? "-" + body : body;
        first = false;
      } else {
        out += neg ? " - " : " + ";
        out += body;
      }
    }
    return out.empty() ? fmt(0.0, decimals) : out;
  }

  // Splits an additive term into sign and magnitude text.
  std::pair<bool, std::string> signed_term(const ExprPtr& e) const {
    if (e->kind == Expr::Kind::Constant && e->value < 0.0)
      return {true, fmt(-e->value, decimals)};
    if (e->kind == Expr::Kind::Product && e->kids[0]->kind == Expr::Kind::Constant &&
        e->kids[0]->value < 0.0)
      return {true, product(e, true)};
    if (e->kind == Expr::Kind::Unary && e->d == 0.0 && e->c < 0.0) {
      Expr flipped = *e;
      flipped.c = -flipped.c;
      return {true, unary(node_of(flipped))};
    }
    return {false, term(e)};
  }

  static ExprPtr node_of(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

  std::string term(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::Constant: return fmt(e->value, decimals);
      case Expr::Kind::Variable: return e->name;
      case Expr::Kind::Sum: return "(" + sum(e) + ")";
      case Expr::Kind::Product: return product(e, false);
      case Expr::Kind::Power: return power(e);
      case Expr::Kind::Unary: return unary(e);
      case Expr::Kind::Spline: return spline(e);
    }
    return "?";
  }

  std::string factor(const ExprPtr& e) const {
    std::string s = term(e);
    if (loose(s)) s = "(" + s + ")";
    return s;
  }

  std::string product(const ExprPtr& e, bool negate_leading) const {
    double coeff = 1.0;
    std::size_t begin = 0;
    if (e->kids[0]->kind == Expr::Kind::Constant) {
      coeff = e->kids[0]->value;
      begin = 1;
    }
    if (negate_leading) coeff = -coeff;

    std::vector<std::string> inv_parts;
    std::vector<std::string> parts;
    for (std::size_t i = begin; i < e->kids.size(); ++i) {
      const ExprPtr& k = e->kids[i];
      if (k->kind == Expr::Kind::Unary && k->cid == CandidateId::Inv && k->c == 1.0 &&
          k->d == 0.0) {
        inv_parts.push_back(affine(k->a, k->kids[0], k->b));
      } else {
        parts.push_back(factor(k));
      }
    }

    std::string body;
    for (const std::string& p : parts) {
      if (!body.empty()) body += "*";
      body += p;
    }

    std::string out;
    if (body.empty()) {
      out = fmt(coeff, decimals);
    } else if (coeff == 1.0) {
      out = body;
    } else if (coeff == -1.0) {
      out = "-" + body;
    } else {
      out = fmt(coeff, decimals);
      if (starts_with_digit(body)) out += "*";
      out += body;
    }
    for (const std::string& inner : inv_parts) out += "/(" + inner + ")";
    return out;
  }

  std::string power(const ExprPtr& e) const {
    if (e->exponent == 0) return fmt(1.0, decimals);
    const std::string base = e->kids[0]->kind == Expr::Kind::Variable
                                 ? e->kids[0]->name
                                 : "(" + term_root(e->kids[0]) + ")";
    if (e->exponent == 1) return base;
    return base + "^" + std::to_string(e->exponent);
  }

  // Renders a subtree at top level (no outer parens), for use inside ().
  std::string term_root(const ExprPtr& e) const {
    if (e->kind == Expr::Kind::Sum) return sum(e);
    auto [neg, body] = signed_term(e);
    return neg ? "-" + body : body;
  }

  // a*arg + b rendered as flat affine text.
  std::string affine(double a, const ExprPtr& arg, double b) const {
    std::string s;
    if (a == 0.0) return fmt(b, decimals);
    std::string arg_s = factor(arg);
    if (arg->kind == Expr::Kind::Sum && a != 1.0) arg_s = "(" + term_root(arg) + ")";
    if (arg->kind == Expr::Kind::Sum && a == 1.0) arg_s = term_root(arg);
    if (a == 1.0) {
      s = arg_s;
    } else if (a == -1.0) {
      s = loose(arg_s) ? "-(" + arg_s + ")" : "-" + arg_s;
    } else {
      s = fmt(a, decimals);
      if (starts_with_digit(arg_s)) s += "*";
      s += arg_s;
    }
    if (b > 0.0) s += " + " + fmt(b, decimals);
    if (b < 0.0) s += " - " + fmt(-b, decimals);
    return s;
  }

  std::string unary(const ExprPtr& e) const {
    std::string core;
    switch (e->cid) {
      case CandidateId::Const:
        return fmt(e->c + e->d, decimals);
      case CandidateId::X:
        core = affine(e->a, e->kids[0], e->b);
        if (loose(core)) core = "(" + core + ")";
        break;
      case CandidateId::X2:
      case CandidateId::X3:
      case CandidateId::X4: {
        const int n = e->cid == CandidateId::X2 ? 2 : e->cid == CandidateId::X3 ? 3 : 4;
        const bool bare =
            e->kids[0]->kind == Expr::Kind::Variable && e->a == 1.0 && e->b == 0.0;
        core = bare ? e->kids[0]->name + "^" + std::to_string(n)
                    : "(" + affine(e->a, e->kids[0], e->b) + ")^" + std::to_string(n);
        break;
      }
      case CandidateId::Inv: {
        std::string inner = affine(e->a, e->kids[0], e->b);
        std::string num = e->c == 1.0 ? "1" : fmt(e->c, decimals);
        std::string out = num + "/(" + inner + ")";
        if (e->d > 0.0) out = "(" + out + " + " + fmt(e->d, decimals) + ")";
        if (e->d < 0.0) out = "(" + out + " - " + fmt(-e->d, decimals) + ")";
        return out;
      }
      default:
        core = std::string(candidate_name(e->cid)) + "(" + affine(e->a, e->kids[0], e->b) + ")";
        break;
    }

    std::string out;
    if (e->c == 1.0) {
      out = core;
    } else if (e->c == -1.0) {
      out = "-" + core;
    } else {
      out = fmt(e->c, decimals);
      if (starts_with_digit(core)) out += "*";
      out += core;
    }
    if (e->d > 0.0) out = "(" + out + " + " + fmt(e->d, decimals) + ")";
    if (e->d < 0.0) out = "(" + out + " - " + fmt(-e->d, decimals) + ")";
    return out;
  }

  std::string spline(const ExprPtr& e) const {
    const SplinePayload& p = *e->payload;
    return "spline[" + std::to_string(p.layer) + "." + std::to_string(p.j) + "." +
           std::to_string(p.i) + "](" + term_root(e->kids[0]) + ")";
  }
};

}  // namespace

std::string render(const ExprPtr& e, int decimals) {
  if (decimals < 0) throw InvalidInput("render: decimals must be non-negative");
  Renderer r{decimals};
  return r.term_root(e);
}

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void to_sexpr(const ExprPtr& e, std::string& out) {
  switch (e->kind) {
    case Expr::Kind::Constant:
      out += "(const " + num17(e->value) + ")";
      return;
    case Expr::Kind::Variable:
      out += "(var " + e->name + ")";
      return;
    case Expr::Kind::Sum:
    case Expr::Kind::Product:
      out += e->kind == Expr::Kind::Sum ? "(sum" : "(prod";
      for (const ExprPtr& k : e->kids) {
        out += ' ';
        to_sexpr(k, out);
      }
      out += ')';
      return;
    case Expr::Kind::Power:
      out += "(pow " + std::to_string(e->exponent) + " ";
      to_sexpr(e->kids[0], out);
      out += ')';
      return;
    case Expr::Kind::Unary:
      out += "(unary ";
      out += candidate_name(e->cid);
      out += ' ' + num17(e->a) + ' ' + num17(e->b) + ' ' + num17(e->c) + ' ' + num17(e->d) + ' ';
      to_sexpr(e->kids[0], out);
      out += ')';
      return;
    case Expr::Kind::Spline: {
      const SplinePayload& p = *e->payload;
      const KnotGrid& g = p.edge.grid;
      out += "(spline " + std::to_string(g.degree) + ' ' + std::to_string(g.intervals) + ' ' +
             num17(g.domain_lo) + ' ' + num17(g.domain_hi) + ' ' + num17(p.edge.w_b) + ' ' +
             num17(p.edge.w_s) + " (";
      for (std::size_t i = 0; i < p.edge.coeffs.size(); ++i) {
        if (i) out += ' ';
        out += num17(p.edge.coeffs[i]);
      }
      out += ") " + std::to_string(p.layer) + ' ' + std::to_string(p.j) + ' ' +
             std::to_string(p.i) + ' ';
      to_sexpr(e->kids[0], out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string expr_to_text(const ExprPtr& e) {
  std::string out = "kanlm-expr v1\n";
  to_sexpr(e, out);
  out += '\n';
  return out;
}

}  // namespace kanlm
