#ifndef GNEPVI_EXPR_HPP
#define GNEPVI_EXPR_HPP

#include "gnepvi/types.hpp"

#include <string>
#include <vector>

namespace gnepvi {

/// AST for the small loss-expression language:
///   literals, variables x1..xn, + - * / ^, unary minus,
///   abs/min/max/sqrt, and two-branch conditionals
///   `if tag(xi) == Q then e1 else e2` / `if xi == c then e1 else e2`.
struct Expr {
  enum class Kind {
    Literal,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Abs,
    Min,
    Max,
    Sqrt,
    IfTag,  // condition: tag(x[var]) == tag
    IfEq,   // condition: x[var] == literal (bitwise after parsing)
  };

  Kind kind = Kind::Literal;
  double literal = 0.0;   // Literal, IfEq comparison constant
  int var = -1;           // Var, IfTag, IfEq (0-based)
  int exponent = 0;       // Pow
  Tag tag = Tag::Q;       // IfTag
  std::vector<Expr> children;

  bool operator==(const Expr& other) const;
};

/// Parse with standard precedence (^ over unary minus over * / over + -),
/// left-associative binaries. Throws UsageError with line:column on bad input.
Expr parse_expr(const std::string& src, int n_vars);

/// Fully parenthesized canonical form; reparses to an identical AST.
std::string pretty_print(const Expr& e);

double evaluate(const Expr& e, const std::vector<TaggedReal>& x);
/// Tag-free convenience: all coordinates Q-tagged.
double evaluate(const Expr& e, const Vec& x);
double evaluate(const Expr& e, const Vec& x, const TagVector& tags);

/// True when the AST contains a tag() conditional.
bool uses_tags(const Expr& e);

struct FdGradient {
  Vec grad;                      // central differences
  std::vector<bool> nonsmooth;   // one-sided slopes disagree beyond tolerance
};

/// Central finite differences, step h*(1+|xi|) per coordinate. Nonsmoothness
/// is flagged where forward/backward slopes disagree by more than
/// nonsmooth_tol * (1 + |fwd| + |bwd|).
FdGradient finite_diff_gradient(const Expr& e, const Vec& x, double h = 1e-6,
                                double nonsmooth_tol = 1e-4);

}  // namespace gnepvi

#endif
