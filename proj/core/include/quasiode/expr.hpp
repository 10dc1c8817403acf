#pragma once

// Closed-form coefficient expressions in one real variable `x`.
//
// Grammar (whitespace insensitive):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?        exponent must fold to an integer
//   primary := number | 'x' | 'i' | func '(' sum ')' | '(' sum ')'
//   func    := sin | cos | exp | sqrt
//
// `^` binds tighter than unary minus, so "-x^2" is -(x^2).

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace quasiode {

using cplx = std::complex<double>;

enum class ExprOp { Const, Var, Neg, Sin, Cos, Exp, Sqrt, Add, Sub, Mul, Div, Pow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op;
    cplx value{};        // Const
    int exponent = 0;    // Pow
    Expr lhs;            // unary argument or left operand
    Expr rhs;            // right operand (binary ops other than Pow)
};

/// Default cap on the derivative order accepted by `differentiate`.
inline constexpr int kDefaultDerivativeCap = 12;

Expr parse_expression(std::string_view src);

/// Exact symbolic derivative of the given order; order 0 returns `e` itself.
/// Throws ValidationError when `order` is negative or exceeds `cap`.
Expr differentiate(const Expr& e, int order = 1, int cap = kDefaultDerivativeCap);

/// Throws EvaluationError on division by zero or any non-finite intermediate.
cplx evaluate(const Expr& e, double x);

/// Round-trippable text form (parse_expression(to_string(e)) evaluates identically).
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Node count, useful for keeping an eye on derivative growth.
std::size_t expr_size(const Expr& e);

// Builders with light constant folding.
Expr make_const(cplx v);
Expr make_var();
Expr make_unary(ExprOp op, Expr arg);
Expr make_binary(ExprOp op, Expr lhs, Expr rhs);
Expr make_pow(Expr base, int exponent);

/// Parses a complex literal such as "1+2i", "-i", "2.5", "3i", "1e-3-4i".
cplx parse_complex(std::string_view src);

}  // namespace quasiode
