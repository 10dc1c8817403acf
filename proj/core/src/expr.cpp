#include "quasiode/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "quasiode/error.hpp"

namespace quasiode {

namespace {

bool is_const(const Expr& e, cplx v) { return e->op == ExprOp::Const && e->value == v; }

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        Expr e = sum();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    Expr sum() {
        Expr lhs = product();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(ExprOp::Add, lhs, product());
            else if (accept('-'))
                lhs = make_binary(ExprOp::Sub, lhs, product());
            else
                return lhs;
        }
    }

    Expr product() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(ExprOp::Mul, lhs, unary());
            else if (accept('/'))
                lhs = make_binary(ExprOp::Div, lhs, unary());
            else
                return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return make_unary(ExprOp::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip_ws();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t at = pos_;
        Expr ex = unary();
        if (ex->op != ExprOp::Const || ex->value.imag() != 0.0 || ex->value.real() != std::round(ex->value.real()) ||
            std::abs(ex->value.real()) > 1e6)
            throw ParseError("exponent must be an integer constant", at);
        return make_pow(base, static_cast<int>(ex->value.real()));
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
        // "2i" is an imaginary literal.
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            (pos_ + 1 == src_.size() || !std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
            ++pos_;
            return make_const(cplx(0.0, v));
        }
        return make_const(v);
    }

    Expr primary() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string_view id = src_.substr(start, pos_ - start);
            if (id == "x") return make_var();
            if (id == "i") return make_const(cplx(0.0, 1.0));
            ExprOp op;
            if (id == "sin")
                op = ExprOp::Sin;
            else if (id == "cos")
                op = ExprOp::Cos;
            else if (id == "exp")
                op = ExprOp::Exp;
            else if (id == "sqrt")
                op = ExprOp::Sqrt;
            else
                throw ParseError("unknown identifier `" + std::string(id) + "`", start);
            expect('(');
            Expr arg = sum();
            expect(')');
            return make_unary(op, arg);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_const(cplx v) {
    if (v.imag() == 0.0) {
        std::string s = format_double(v.real());
        return v.real() < 0 ? "(" + s + ")" : s;
    }
    if (v.real() == 0.0) return "(" + format_double(v.imag()) + "i)";
    std::string im = format_double(std::abs(v.imag()));
    return "(" + format_double(v.real()) + (v.imag() < 0 ? "-" : "+") + im + "i)";
}

Expr derivative(const Expr& e) {
    const Expr& u = e->lhs;
    switch (e->op) {
        case ExprOp::Const:
            return make_const(0.0);
        case ExprOp::Var:
            return make_const(1.0);
        case ExprOp::Neg:
            return make_unary(ExprOp::Neg, derivative(u));
        case ExprOp::Sin:
            return make_binary(ExprOp::Mul, make_unary(ExprOp::Cos, u), derivative(u));
        case ExprOp::Cos:
            return make_unary(ExprOp::Neg, make_binary(ExprOp::Mul, make_unary(ExprOp::Sin, u), derivative(u)));
        case ExprOp::Exp:
            return make_binary(ExprOp::Mul, e, derivative(u));
        case ExprOp::Sqrt:
            return make_binary(ExprOp::Div, derivative(u), make_binary(ExprOp::Mul, make_const(2.0), e));
        case ExprOp::Add:
            return make_binary(ExprOp::Add, derivative(u), derivative(e->rhs));
        case ExprOp::Sub:
            return make_binary(ExprOp::Sub, derivative(u), derivative(e->rhs));
        case ExprOp::Mul:
            return make_binary(ExprOp::Add, make_binary(ExprOp::Mul, derivative(u), e->rhs),
                               make_binary(ExprOp::Mul, u, derivative(e->rhs)));
        case ExprOp::Div: {
            Expr num = make_binary(ExprOp::Sub, make_binary(ExprOp::Mul, derivative(u), e->rhs),
                                   make_binary(ExprOp::Mul, u, derivative(e->rhs)));
            return make_binary(ExprOp::Div, num, make_pow(e->rhs, 2));
        }
        case ExprOp::Pow:
            return make_binary(ExprOp::Mul,
                               make_binary(ExprOp::Mul, make_const(static_cast<double>(e->exponent)),
                                           make_pow(u, e->exponent - 1)),
                               derivative(u));
    }
    throw AssertionError("unhandled expression node");
}

}  // namespace

Expr make_const(cplx v) {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Const;
    n->value = v;
    return n;
}

Expr make_var() {
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Var;
    return n;
}

Expr make_unary(ExprOp op, Expr arg) {
    if (op == ExprOp::Neg) {
        if (arg->op == ExprOp::Const) return make_const(-arg->value);
        if (arg->op == ExprOp::Neg) return arg->lhs;
    }
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(arg);
    return n;
}

Expr make_binary(ExprOp op, Expr lhs, Expr rhs) {
    const bool lc = lhs->op == ExprOp::Const, rc = rhs->op == ExprOp::Const;
    switch (op) {
        case ExprOp::Add:
            if (lc && rc) return make_const(lhs->value + rhs->value);
            if (is_const(lhs, 0.0)) return rhs;
            if (is_const(rhs, 0.0)) return lhs;
            break;
        case ExprOp::Sub:
            if (lc && rc) return make_const(lhs->value - rhs->value);
            if (is_const(rhs, 0.0)) return lhs;
            if (is_const(lhs, 0.0)) return make_unary(ExprOp::Neg, rhs);
            break;
        case ExprOp::Mul:
            if (lc && rc) return make_const(lhs->value * rhs->value);
            if (is_const(lhs, 0.0) || is_const(rhs, 0.0)) return make_const(0.0);
            if (is_const(lhs, 1.0)) return rhs;
            if (is_const(rhs, 1.0)) return lhs;
            if (is_const(lhs, -1.0)) return make_unary(ExprOp::Neg, rhs);
            if (is_const(rhs, -1.0)) return make_unary(ExprOp::Neg, lhs);
            break;
        case ExprOp::Div:
            if (lc && rc && rhs->value != 0.0) return make_const(lhs->value / rhs->value);
            if (is_const(rhs, 1.0)) return lhs;
            break;
        default:
            throw AssertionError("make_binary: not a binary operator");
    }
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

Expr make_pow(Expr base, int exponent) {
    if (exponent == 0) return make_const(1.0);
    if (exponent == 1) return base;
    if (base->op == ExprOp::Const && (base->value != 0.0 || exponent > 0))
        return make_const(std::pow(base->value, exponent));
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Pow;
    n->exponent = exponent;
    n->lhs = std::move(base);
    return n;
}

Expr parse_expression(std::string_view src) { return Parser(src).parse(); }

Expr differentiate(const Expr& e, int order, int cap) {
    if (order < 0) throw ValidationError("derivative order must be non-negative");
    if (order > cap)
        throw ValidationError("derivative order " + std::to_string(order) + " exceeds cap " + std::to_string(cap));
    Expr d = e;
    for (int k = 0; k < order; ++k) d = derivative(d);
    return d;
}

cplx evaluate(const Expr& e, double x) {
    cplx r;
    switch (e->op) {
        case ExprOp::Const:
            return e->value;
        case ExprOp::Var:
            return x;
        case ExprOp::Neg:
            return -evaluate(e->lhs, x);
        case ExprOp::Sin:
            r = std::sin(evaluate(e->lhs, x));
            break;
        case ExprOp::Cos:
            r = std::cos(evaluate(e->lhs, x));
            break;
        case ExprOp::Exp:
            r = std::exp(evaluate(e->lhs, x));
            break;
        case ExprOp::Sqrt:
            r = std::sqrt(evaluate(e->lhs, x));
            break;
        case ExprOp::Add:
            r = evaluate(e->lhs, x) + evaluate(e->rhs, x);
            break;
        case ExprOp::Sub:
            r = evaluate(e->lhs, x) - evaluate(e->rhs, x);
            break;
        case ExprOp::Mul:
            r = evaluate(e->lhs, x) * evaluate(e->rhs, x);
            break;
        case ExprOp::Div: {
            const cplx den = evaluate(e->rhs, x);
            if (den == 0.0) throw EvaluationError("division by zero at x=" + format_double(x));
            r = evaluate(e->lhs, x) / den;
            break;
        }
        case ExprOp::Pow: {
            const cplx b = evaluate(e->lhs, x);
            if (b == 0.0 && e->exponent < 0)
                throw EvaluationError("division by zero (negative power of 0) at x=" + format_double(x));
            // integer power by repeated squaring keeps real bases exact
            cplx acc = 1.0, base = e->exponent < 0 ? 1.0 / b : b;
            for (unsigned k = static_cast<unsigned>(std::abs(e->exponent)); k; k >>= 1) {
                if (k & 1u) acc *= base;
                base *= base;
            }
            r = acc;
            break;
        }
    }
    if (!finite(r)) throw EvaluationError("non-finite value at x=" + format_double(x));
    return r;
}

std::string to_string(const Expr& e) {
    switch (e->op) {
        case ExprOp::Const:
            return format_const(e->value);
        case ExprOp::Var:
            return "x";
        case ExprOp::Neg:
            return "(-" + to_string(e->lhs) + ")";
        case ExprOp::Sin:
            return "sin(" + to_string(e->lhs) + ")";
        case ExprOp::Cos:
            return "cos(" + to_string(e->lhs) + ")";
        case ExprOp::Exp:
            return "exp(" + to_string(e->lhs) + ")";
        case ExprOp::Sqrt:
            return "sqrt(" + to_string(e->lhs) + ")";
        case ExprOp::Add:
            return "(" + to_string(e->lhs) + "+" + to_string(e->rhs) + ")";
        case ExprOp::Sub:
            return "(" + to_string(e->lhs) + "-" + to_string(e->rhs) + ")";
        case ExprOp::Mul:
            return "(" + to_string(e->lhs) + "*" + to_string(e->rhs) + ")";
        case ExprOp::Div:
            return "(" + to_string(e->lhs) + "/" + to_string(e->rhs) + ")";
        case ExprOp::Pow:
            return "(" + to_string(e->lhs) + "^" + (e->exponent < 0 ? "(" + std::to_string(e->exponent) + ")" : std::to_string(e->exponent)) + ")";
    }
    return {};
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b || a->op != b->op) return false;
    switch (a->op) {
        case ExprOp::Const:
            return a->value == b->value;
        case ExprOp::Var:
            return true;
        case ExprOp::Pow:
            return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div:
            return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
        default:
            return structurally_equal(a->lhs, b->lhs);
    }
}

std::size_t expr_size(const Expr& e) {
    if (!e) return 0;
    return 1 + expr_size(e->lhs) + expr_size(e->rhs);
}

cplx parse_complex(std::string_view src) {
    Expr e = parse_expression(src);
    if (e->op != ExprOp::Const) {
        // allow things like "1/3" or "sqrt(2)" that fold only at evaluation
        try {
            auto probe = [&](const auto& self, const Expr& n) -> bool {
                if (!n) return true;
                if (n->op == ExprOp::Var) return false;
                return self(self, n->lhs) && self(self, n->rhs);
            };
            if (!probe(probe, e)) throw ParseError("complex literal must not depend on x", 0);
            return evaluate(e, 0.0);
        } catch (const EvaluationError& err) {
            throw ParseError(std::string("invalid complex literal: ") + err.what(), 0);
        }
    }
    return e->value;
}

}  // namespace quasiode
