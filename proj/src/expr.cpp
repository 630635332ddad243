#include "gnepvi/expr.hpp"

#include "gnepvi/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace gnepvi {
namespace {

struct Token {
  enum class Type { Number, Ident, Op, End } type = Type::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    std::ostringstream os;
    os << "parse error at " << at.line << ":" << at.col << ": " << msg;
    throw UsageError(os.str());
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
    current_ = Token{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= src_.size()) {
      current_.type = Token::Type::End;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      current_.type = Token::Type::Number;
      current_.number = v;
      current_.text.assign(begin, end);
      for (const char* p = begin; p != end; ++p) bump();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_')) {
        id.push_back(src_[pos_]);
        bump();
      }
      current_.type = Token::Type::Ident;
      current_.text = std::move(id);
      return;
    }
    if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      current_.type = Token::Type::Op;
      current_.text = "==";
      bump();
      bump();
      return;
    }
    static const std::string singles = "+-*/^(),";
    if (singles.find(c) != std::string::npos) {
      current_.type = Token::Type::Op;
      current_.text = std::string(1, c);
      bump();
      return;
    }
    std::ostringstream os;
    os << "parse error at " << line_ << ":" << col_ << ": unexpected character '" << c << "'";
    throw UsageError(os.str());
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class Parser {
 public:
  Parser(const std::string& src, int n_vars) : lex_(src), n_(n_vars) {}

  Expr parse() {
    Expr e = expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End) lex_.fail("trailing input '" + t.text + "'", t);
    return e;
  }

 private:
  bool is_op(const char* s) const {
    return lex_.peek().type == Token::Type::Op && lex_.peek().text == s;
  }
  bool is_kw(const char* s) const {
    return lex_.peek().type == Token::Type::Ident && lex_.peek().text == s;
  }
  Token expect_op(const char* s) {
    if (!is_op(s)) lex_.fail(std::string("expected '") + s + "'", lex_.peek());
    return lex_.next();
  }
  Token expect_kw(const char* s) {
    if (!is_kw(s)) lex_.fail(std::string("expected '") + s + "'", lex_.peek());
    return lex_.next();
  }

  Expr expr() {
    Expr lhs = term();
    while (is_op("+") || is_op("-")) {
      const bool add = is_op("+");
      lex_.next();
      Expr rhs = term();
      Expr node;
      node.kind = add ? Expr::Kind::Add : Expr::Kind::Sub;
      node.children = {std::move(lhs), std::move(rhs)};
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_op("*") || is_op("/")) {
      const bool mul = is_op("*");
      lex_.next();
      Expr rhs = unary();
      Expr node;
      node.kind = mul ? Expr::Kind::Mul : Expr::Kind::Div;
      node.children = {std::move(lhs), std::move(rhs)};
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr unary() {
    if (is_op("-")) {
      lex_.next();
      Expr node;
      node.kind = Expr::Kind::Neg;
      node.children = {unary()};
      return node;
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (is_op("^")) {
      const Token caret = lex_.next();
      const Token& t = lex_.peek();
      if (t.type != Token::Type::Number) lex_.fail("exponent must be a literal integer", t);
      const Token num = lex_.next();
      const double v = num.number;
      if (v < 0.0 || v != std::floor(v) || num.text.find('.') != std::string::npos ||
          num.text.find('e') != std::string::npos || num.text.find('E') != std::string::npos)
        lex_.fail("exponent must be a nonnegative integer literal", num);
      (void)caret;
      Expr node;
      node.kind = Expr::Kind::Pow;
      node.exponent = static_cast<int>(v);
      node.children = {std::move(base)};
      return node;
    }
    return base;
  }

  int var_index(const Token& t) {
    if (t.text.size() < 2 || t.text[0] != 'x') lex_.fail("unknown identifier '" + t.text + "'", t);
    int idx = 0;
    const auto [p, ec] =
        std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      lex_.fail("unknown identifier '" + t.text + "'", t);
    if (idx < 1 || idx > n_) lex_.fail("variable index out of range: " + t.text, t);
    return idx - 1;
  }

  Expr atom() {
    const Token& t = lex_.peek();
    if (t.type == Token::Type::Number) {
      const Token num = lex_.next();
      Expr node;
      node.kind = Expr::Kind::Literal;
      node.literal = num.number;
      return node;
    }
    if (is_op("(")) {
      lex_.next();
      Expr inner = expr();
      expect_op(")");
      return inner;
    }
    if (t.type == Token::Type::Ident) {
      if (t.text == "if") return conditional();
      if (t.text == "abs" || t.text == "sqrt") {
        const Token fn = lex_.next();
        expect_op("(");
        Expr arg = expr();
        expect_op(")");
        Expr node;
        node.kind = fn.text == "abs" ? Expr::Kind::Abs : Expr::Kind::Sqrt;
        node.children = {std::move(arg)};
        return node;
      }
      if (t.text == "min" || t.text == "max") {
        const Token fn = lex_.next();
        expect_op("(");
        Expr a = expr();
        expect_op(",");
        Expr b = expr();
        expect_op(")");
        Expr node;
        node.kind = fn.text == "min" ? Expr::Kind::Min : Expr::Kind::Max;
        node.children = {std::move(a), std::move(b)};
        return node;
      }
      const Token var = lex_.next();
      Expr node;
      node.kind = Expr::Kind::Var;
      node.var = var_index(var);
      return node;
    }
    lex_.fail("expected expression", t);
  }

  Expr conditional() {
    expect_kw("if");
    Expr node;
    if (is_kw("tag")) {
      lex_.next();
      expect_op("(");
      const Token& vt = lex_.peek();
      if (vt.type != Token::Type::Ident) lex_.fail("expected variable in tag()", vt);
      const Token var = lex_.next();
      node.var = var_index(var);
      expect_op(")");
      expect_op("==");
      const Token& tt = lex_.peek();
      if (tt.type != Token::Type::Ident || (tt.text != "Q" && tt.text != "I"))
        lex_.fail("expected tag Q or I", tt);
      const Token tagtok = lex_.next();
      node.kind = Expr::Kind::IfTag;
      node.tag = tagtok.text == "Q" ? Tag::Q : Tag::I;
    } else {
      const Token& vt = lex_.peek();
      if (vt.type != Token::Type::Ident) lex_.fail("expected variable in condition", vt);
      const Token var = lex_.next();
      node.var = var_index(var);
      expect_op("==");
      const Token& ct = lex_.peek();
      bool neg = false;
      if (is_op("-")) {
        lex_.next();
        neg = true;
      }
      if (lex_.peek().type != Token::Type::Number)
        lex_.fail("expected literal in condition", ct);
      const Token num = lex_.next();
      node.kind = Expr::Kind::IfEq;
      node.literal = neg ? -num.number : num.number;
    }
    expect_kw("then");
    Expr then_branch = expr();
    expect_kw("else");
    Expr else_branch = expr();
    node.children = {std::move(then_branch), std::move(else_branch)};
    return node;
  }

  Lexer lex_;
  int n_;
};

[[noreturn]] void eval_fail(const char* what, const Expr& e) {
  throw NumericError(std::string(what) + " in subexpression " + pretty_print(e));
}

std::string format_literal(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

bool Expr::operator==(const Expr& other) const {
  if (kind != other.kind || var != other.var || exponent != other.exponent || tag != other.tag)
    return false;
  if (kind == Kind::Literal || kind == Kind::IfEq) {
    // Bitwise comparison: canonical printing must round-trip exactly.
    if (!(literal == other.literal) &&
        !(std::isnan(literal) && std::isnan(other.literal)))
      return false;
  }
  return children == other.children;
}

Expr parse_expr(const std::string& src, int n_vars) {
  if (n_vars < 0) throw UsageError("parse_expr: negative variable count");
  return Parser(src, n_vars).parse();
}

std::string pretty_print(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return format_literal(e.literal);
    case Expr::Kind::Var:
      return "x" + std::to_string(e.var + 1);
    case Expr::Kind::Add:
      return "(" + pretty_print(e.children[0]) + " + " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::Sub:
      return "(" + pretty_print(e.children[0]) + " - " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::Mul:
      return "(" + pretty_print(e.children[0]) + " * " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::Div:
      return "(" + pretty_print(e.children[0]) + " / " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::Pow:
      return "(" + pretty_print(e.children[0]) + ")^" + std::to_string(e.exponent);
    case Expr::Kind::Neg:
      return "(-(" + pretty_print(e.children[0]) + "))";
    case Expr::Kind::Abs:
      return "abs(" + pretty_print(e.children[0]) + ")";
    case Expr::Kind::Sqrt:
      return "sqrt(" + pretty_print(e.children[0]) + ")";
    case Expr::Kind::Min:
      return "min(" + pretty_print(e.children[0]) + ", " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::Max:
      return "max(" + pretty_print(e.children[0]) + ", " + pretty_print(e.children[1]) + ")";
    case Expr::Kind::IfTag:
      return "if tag(x" + std::to_string(e.var + 1) + ") == " + tag_name(e.tag) + " then (" +
             pretty_print(e.children[0]) + ") else (" + pretty_print(e.children[1]) + ")";
    case Expr::Kind::IfEq:
      return "if x" + std::to_string(e.var + 1) + " == " + format_literal(e.literal) +
             " then (" + pretty_print(e.children[0]) + ") else (" +
             pretty_print(e.children[1]) + ")";
  }
  return "?";
}

double evaluate(const Expr& e, const std::vector<TaggedReal>& x) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return e.literal;
    case Expr::Kind::Var:
      if (e.var < 0 || e.var >= static_cast<int>(x.size()))
        throw UsageError("evaluate: variable index out of range");
      return x[static_cast<std::size_t>(e.var)].value;
    case Expr::Kind::Add:
      return evaluate(e.children[0], x) + evaluate(e.children[1], x);
    case Expr::Kind::Sub:
      return evaluate(e.children[0], x) - evaluate(e.children[1], x);
    case Expr::Kind::Mul:
      return evaluate(e.children[0], x) * evaluate(e.children[1], x);
    case Expr::Kind::Div: {
      const double num = evaluate(e.children[0], x);
      const double den = evaluate(e.children[1], x);
      if (den == 0.0) eval_fail("division by zero", e);
      return num / den;
    }
    case Expr::Kind::Pow: {
      const double base = evaluate(e.children[0], x);
      double out = 1.0;
      for (int i = 0; i < e.exponent; ++i) out *= base;
      return out;
    }
    case Expr::Kind::Neg:
      return -evaluate(e.children[0], x);
    case Expr::Kind::Abs:
      return std::abs(evaluate(e.children[0], x));
    case Expr::Kind::Sqrt: {
      const double v = evaluate(e.children[0], x);
      if (v < 0.0) eval_fail("sqrt of negative value", e);
      return std::sqrt(v);
    }
    case Expr::Kind::Min:
      return std::min(evaluate(e.children[0], x), evaluate(e.children[1], x));
    case Expr::Kind::Max:
      return std::max(evaluate(e.children[0], x), evaluate(e.children[1], x));
    case Expr::Kind::IfTag: {
      if (e.var < 0 || e.var >= static_cast<int>(x.size()))
        throw UsageError("evaluate: variable index out of range");
      const bool hit = x[static_cast<std::size_t>(e.var)].tag == e.tag;
      return evaluate(e.children[hit ? 0 : 1], x);
    }
    case Expr::Kind::IfEq: {
      if (e.var < 0 || e.var >= static_cast<int>(x.size()))
        throw UsageError("evaluate: variable index out of range");
      const bool hit = x[static_cast<std::size_t>(e.var)].value == e.literal;
      return evaluate(e.children[hit ? 0 : 1], x);
    }
  }
  throw NumericError("evaluate: corrupt AST");
}

double evaluate(const Expr& e, const Vec& x) {
  std::vector<TaggedReal> t(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) t[static_cast<std::size_t>(i)] = {x[i], Tag::Q};
  return evaluate(e, t);
}

double evaluate(const Expr& e, const Vec& x, const TagVector& tags) {
  std::vector<TaggedReal> t(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    t[static_cast<std::size_t>(i)] = {
        x[i], tags.empty() ? Tag::Q : tags[static_cast<std::size_t>(i)]};
  }
  return evaluate(e, t);
}

bool uses_tags(const Expr& e) {
  if (e.kind == Expr::Kind::IfTag) return true;
  for (const auto& c : e.children)
    if (uses_tags(c)) return true;
  return false;
}

FdGradient finite_diff_gradient(const Expr& e, const Vec& x, double h, double nonsmooth_tol) {
  FdGradient out;
  out.grad = Vec::Zero(x.size());
  out.nonsmooth.assign(static_cast<std::size_t>(x.size()), false);
  const double f0 = evaluate(e, x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double hi = h * (1.0 + std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += hi;
    xm[i] -= hi;
    const double fp = evaluate(e, xp);
    const double fm = evaluate(e, xm);
    out.grad[i] = (fp - fm) / (2.0 * hi);
    const double fwd = (fp - f0) / hi;
    const double bwd = (f0 - fm) / hi;
    if (std::abs(fwd - bwd) > nonsmooth_tol * (1.0 + std::abs(fwd) + std::abs(bwd)))
      out.nonsmooth[static_cast<std::size_t>(i)] = true;
  }
  return out;
}

}  // namespace gnepvi
