#pragma once

// Coefficient primitives q0, p0..pn, q1..qn of an odd-order expression and
// the combinations phi_k = p_k + i q_k, phi~_k = p_k - i q_k.

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quasiode/expr.hpp"

namespace quasiode {

/// Which one-sided limit to take when evaluating exactly at a breakpoint.
enum class Side { None, Left, Right };

inline constexpr int kInfiniteSmoothness = std::numeric_limits<int>::max();

/// Closed-form primitive; derivatives are exact and cached lazily.
struct ExprKind {
    std::string source;
    Expr ast;
};

/// Piecewise-constant primitive: values[i] holds on (breakpoints[i-1], breakpoints[i]).
struct StepsKind {
    std::vector<double> breakpoints;
    std::vector<cplx> values;
};

/// Sampled primitive, linearly interpolated between abscissae.
struct GridKind {
    std::vector<double> abscissae;
    std::vector<cplx> values;
};

class Coefficient {
public:
    using Kind = std::variant<ExprKind, StepsKind, GridKind>;

    /// The zero function (an expr coefficient "0").
    Coefficient();

    static Coefficient from_expr(std::string_view source);
    static Coefficient steps(std::vector<double> breakpoints, std::vector<cplx> values);
    static Coefficient grid(std::vector<double> abscissae, std::vector<cplx> values);

    const Kind& kind() const noexcept { return kind_; }
    bool is_expr() const noexcept { return std::holds_alternative<ExprKind>(kind_); }
    bool is_steps() const noexcept { return std::holds_alternative<StepsKind>(kind_); }
    bool is_grid() const noexcept { return std::holds_alternative<GridKind>(kind_); }

    /// Number of classical derivatives available (kInfiniteSmoothness for expr).
    int smoothness_order() const noexcept { return is_expr() ? kInfiniteSmoothness : 0; }

    /// True for the constant-zero expr coefficient.
    bool is_zero() const;

    /// Breakpoints of a step coefficient; empty for other kinds.
    const std::vector<double>& breakpoints() const;

    /// Points where the coefficient is not smooth (step breakpoints, interior grid nodes).
    std::vector<double> kinks() const;

    /// Symbolic derivative of an expr coefficient (order <= kDefaultDerivativeCap).
    Expr derivative_expr(int order) const;

    bool operator==(const Coefficient& other) const;

private:
    struct DerivativeCache;

    explicit Coefficient(Kind kind);

    Kind kind_;
    std::shared_ptr<DerivativeCache> cache_;
};

/// Throws ValidationError if `deriv` exceeds the smoothness order, EvaluationError
/// when x sits on a step breakpoint with Side::None or lies outside a grid.
cplx eval_coefficient(const Coefficient& c, double x, int deriv = 0, Side side = Side::None);

class CoefficientSet {
public:
    /// Validates the standing hypotheses: n >= 1, a < b, q0 not a step function,
    /// breakpoints inside (a, b), grids covering [a, b], Re q0 > 0 on a uniform
    /// 1024-point grid plus every breakpoint and grid node.
    CoefficientSet(int n, double a, double b, Coefficient q0, std::vector<Coefficient> p, std::vector<Coefficient> q);

    int n() const noexcept { return n_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    const Coefficient& q0() const noexcept { return q0_; }
    /// k in 0..n
    const Coefficient& p(int k) const;
    /// k in 0..n; q(0) is q0.
    const Coefficient& q(int k) const;

    /// Sorted, de-duplicated step breakpoints of all coefficients.
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    /// Breakpoints together with interior grid nodes; the integrator splits here.
    const std::vector<double>& knots() const noexcept { return knots_; }

    /// True when every coefficient is of kind expr.
    bool all_smooth() const;
    /// True when every value of every coefficient is real.
    bool all_real() const;

    bool operator==(const CoefficientSet& other) const;

private:
    int n_;
    double a_, b_;
    Coefficient q0_;
    std::vector<Coefficient> p_;  // 0..n
    std::vector<Coefficient> q_;  // 1..n stored at 0..n-1
    std::vector<double> breakpoints_;
    std::vector<double> knots_;
};

inline constexpr int kPositivitySamples = 1024;

/// Reads n, interval and the coefficient map of a problem document (JSON text).
/// Other top-level keys are left for the caller. Missing p_k, q_k default to zero.
CoefficientSet load_coefficient_set(std::string_view document);

/// Inverse of load_coefficient_set for the n/interval/coefficients part.
std::string serialize_coefficient_set(const CoefficientSet& cs);

/// phi_k = p_k + i q_k, or the literal phi~_k = p_k - i q_k when `tilde` is set
/// (not the complex conjugate of phi_k for complex-valued data).
cplx phi(const CoefficientSet& cs, int k, double x, bool tilde, Side side = Side::None);

}  // namespace quasiode
