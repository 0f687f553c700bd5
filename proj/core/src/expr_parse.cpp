#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "kanlm/errors.hpp"
#include "kanlm/expr.hpp"

namespace kanlm {

namespace {

// --- s-expression reader for expr_from_text ------------------------------

struct SexprLexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit SexprLexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw InvalidInput("expr text: unexpected end of input");
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c)
      throw InvalidInput(std::string("expr text: expected '") + c + "' at offset " +
                         std::to_string(pos));
    ++pos;
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (pos == start) throw InvalidInput("expr text: expected token at offset " +
                                         std::to_string(pos));
    return text.substr(start, pos - start);
  }

  double number() {
    const std::string t = token();
    const char* begin = t.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + t.size()) throw InvalidInput("expr text: bad number '" + t + "'");
    return v;
  }

  int integer() {
    const double v = number();
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw InvalidInput("expr text: expected integer");
    return i;
  }

  bool at_end() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return pos >= text.size();
  }
};

ExprPtr read_sexpr(SexprLexer& lx) {
  lx.expect('(');
  const std::string head = lx.token();
  ExprPtr out;
  if (head == "const") {
    out = make_const(lx.number());
  } else if (head == "var") {
    out = make_var(lx.token());
  } else if (head == "sum" || head == "prod") {
    std::vector<ExprPtr> kids;
    while (lx.peek() == '(') kids.push_back(read_sexpr(lx));
    out = head == "sum" ? make_sum(std::move(kids)) : make_product(std::move(kids));
  } else if (head == "pow") {
    const int n = lx.integer();
    out = make_power(read_sexpr(lx), n);
  } else if (head == "unary") {
    const std::string cname = lx.token();
    CandidateId cid;
    if (!candidate_from_name(cname, cid))
      throw InvalidInput("expr text: unknown candidate '" + cname + "'");
    const double a = lx.number(), b = lx.number(), c = lx.number(), d = lx.number();
    out = make_unary(cid, read_sexpr(lx), a, b, c, d);
  } else if (head == "spline") {
    auto payload = std::make_shared<SplinePayload>();
    const int degree = lx.integer();
    const int intervals = lx.integer();
    const double lo = lx.number(), hi = lx.number();
    payload->edge.w_b = lx.number();
    payload->edge.w_s = lx.number();
    payload->edge.grid = make_grid(lo, hi, intervals, degree);
    lx.expect('(');
    while (lx.peek() != ')') payload->edge.coeffs.push_back(lx.number());
    lx.expect(')');
    if (static_cast<int>(payload->edge.coeffs.size()) != payload->edge.grid.basis_count())
      throw InvalidInput("expr text: spline coefficient count mismatch");
    payload->layer = lx.integer();
    payload->j = lx.integer();
    payload->i = lx.integer();
    out = make_spline(std::move(payload), read_sexpr(lx));
  } else {
    throw InvalidInput("expr text: unknown node kind '" + head + "'");
  }
  lx.expect(')');
  return out;
}

}  // namespace

ExprPtr expr_from_text(const std::string& text) {
  const std::size_t nl = text.find('\n');
  if (nl == std::string::npos || text.substr(0, nl) != "kanlm-expr v1")
    throw InvalidInput("expr text: missing 'kanlm-expr v1' header");
  SexprLexer lx(text);
  lx.pos = nl + 1;
  ExprPtr e = read_sexpr(lx);
  if (!lx.at_end()) throw InvalidInput("expr text: trailing content after expression");
  return e;
}

// --- rendered-equation parser --------------------------------------------

namespace {

struct Token {
  enum class Kind { Number, Ident, Op, End };
  Kind kind = Kind::End;
  double number = 0.0;
  std::string text;
  char op = 0;
};

struct EqLexer {
  const std::string& src;
  std::size_t pos = 0;
  Token cur;

  explicit EqLexer(const std::string& s) : src(s) { advance(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("equation parse at offset " + std::to_string(pos) + ": " + msg);
  }

  void advance() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    if (pos >= src.size()) {
      cur = Token{};
      return;
    }
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      cur = Token{Token::Kind::Number, v, src.substr(pos, end - begin), 0};
      pos += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                  src[pos] == '_'))
        ++pos;
      cur = Token{Token::Kind::Ident, 0.0, src.substr(start, pos - start), 0};
      return;
    }
    if (std::string("+-*/^()=").find(c) != std::string::npos) {
      cur = Token{Token::Kind::Op, 0.0, std::string(1, c), c};
      ++pos;
      return;
    }
    if (c == '[')
      fail("unresolved spline markers cannot be parsed back; re-extract with a lower threshold");
    fail(std::string("unexpected character '") + c + "'");
  }

  bool is_op(char c) const { return cur.kind == Token::Kind::Op && cur.op == c; }
};

bool is_function_name(const std::string& s) {
  return s == "exp" || s == "log" || s == "sqrt" || s == "abs" || s == "sin" || s == "tanh" ||
         s == "sigmoid";
}

CandidateId function_cid(const std::string& s) {
  if (s == "exp") return CandidateId::Exp;
  if (s == "log") return CandidateId::Log;
  if (s == "sqrt") return CandidateId::Sqrt;
  if (s == "abs") return CandidateId::Abs;
  if (s == "sin") return CandidateId::Sin;
  if (s == "tanh") return CandidateId::Tanh;
  return CandidateId::Sigmoid;
}

struct EqParser {
  EqLexer& lx;

  ExprPtr expr() {
    bool neg = false;
    if (lx.is_op('-')) {
      neg = true;
      lx.advance();
    }
    ExprPtr first = term();
    if (neg) first = negate(first);
    std::vector<ExprPtr> kids{first};
    while (lx.is_op('+') || lx.is_op('-')) {
      const bool minus = lx.is_op('-');
      lx.advance();
      ExprPtr t = term();
      kids.push_back(minus ? negate(t) : t);
    }
    return make_sum(std::move(kids));
  }

  static ExprPtr negate(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Constant) return make_const(-e->value);
    if (e->kind == Expr::Kind::Product && e->kids[0]->kind == Expr::Kind::Constant) {
      std::vector<ExprPtr> kids = e->kids;
      kids[0] = make_const(-kids[0]->value);
      return make_product(std::move(kids));
    }
    return make_product({make_const(-1.0), e});
  }

  ExprPtr term() {
    std::vector<ExprPtr> kids{factor()};
    while (true) {
      if (lx.is_op('*')) {
        lx.advance();
        kids.push_back(factor());
      } else if (lx.is_op('/')) {
        lx.advance();
        kids.push_back(make_unary(CandidateId::Inv, factor(), 1.0, 0.0, 1.0, 0.0));
      } else if (lx.cur.kind == Token::Kind::Ident || lx.is_op('(')) {
        kids.push_back(factor());  // juxtaposition
      } else {
        break;
      }
    }
    return make_product(std::move(kids));
  }

  ExprPtr factor() {
    ExprPtr base = primary();
    if (lx.is_op('^')) {
      lx.advance();
      if (lx.cur.kind != Token::Kind::Number) lx.fail("expected integer exponent after '^'");
      const double v = lx.cur.number;
      const int n = static_cast<int>(v);
      if (static_cast<double>(n) != v || n < 0) lx.fail("exponent must be a non-negative integer");
      lx.advance();
      return make_power(base, n);
    }
    return base;
  }

  ExprPtr primary() {
    if (lx.cur.kind == Token::Kind::Number) {
      const double v = lx.cur.number;
      lx.advance();
      return make_const(v);
    }
    if (lx.cur.kind == Token::Kind::Ident) {
      const std::string name = lx.cur.text;
      if (name == "spline")
        lx.fail("unresolved spline markers cannot be parsed back; re-extract with a lower "
                "threshold");
      lx.advance();
      if (is_function_name(name)) {
        if (!lx.is_op('(')) lx.fail("expected '(' after function " + name);
        lx.advance();
        ExprPtr arg = expr();
        if (!lx.is_op(')')) lx.fail("expected ')' closing " + name);
        lx.advance();
        return make_unary(function_cid(name), arg, 1.0, 0.0, 1.0, 0.0);
      }
      return make_var(name);
    }
    if (lx.is_op('(')) {
      lx.advance();
      ExprPtr e = expr();
      if (!lx.is_op(')')) lx.fail("expected ')'");
      lx.advance();
      return e;
    }
    lx.fail("expected number, variable, function, or '('");
  }
};

}  // namespace

ParsedEquation parse_equation(const std::string& line) {
  EqLexer lx(line);
  if (lx.cur.kind != Token::Kind::Ident)
    throw InvalidInput("equation must start with a target name, e.g. 'P = ...'");
  ParsedEquation out;
  out.target = lx.cur.text;
  lx.advance();
  if (!lx.is_op('=')) throw InvalidInput("equation missing '=' after target name");
  lx.advance();
  EqParser parser{lx};
  out.expr = parser.expr();
  if (lx.cur.kind != Token::Kind::End) lx.fail("trailing content after expression");
  return out;
}

}  // namespace kanlm
