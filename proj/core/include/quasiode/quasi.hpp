#pragma once

// Numeric quasi-derivatives y^[0..2n] of a smooth test function and numeric
// application of tau_{2n+1}, by two independent routes.

#include <span>
#include <string_view>
#include <vector>

#include "quasiode/coeffs.hpp"
#include "quasiode/symbolic.hpp"

namespace quasiode {

/// A closed-form test function y with its symbolic derivatives up to `max_order`.
class SmoothFunction {
public:
    SmoothFunction(Expr y, int max_order);
    static SmoothFunction parse(std::string_view source, int max_order);

    int max_order() const noexcept { return static_cast<int>(derivs_.size()) - 1; }
    const Expr& expr() const noexcept { return derivs_.front(); }
    /// y^(k)(x), k <= max_order
    cplx derivative(int k, double x) const;

private:
    std::vector<Expr> derivs_;
};

struct QuasiVector {
    double x = 0.0;
    std::vector<cplx> u;  // u[j] = y^[j], j = 0..2n
};

/// u[0..n-1] = y^(k); u[n] = sqrt(2 q0) y^(n); u[n+1] from
///   sqrt(2q0) (sqrt(2q0) y^(n))' - i p0 y^(n) - i sum_j (-1)^j phi~_j y^(n-j)
/// with (sqrt(2q0))' = q0'/sqrt(2q0); u[n+2..2n] from the expanded formal chain.
/// Needs classical derivatives of the coefficients the chain references.
QuasiVector quasi_derivatives(const CoefficientSet& cs, const SmoothFunction& y, double x);

enum class TauMethod {
    /// Term-by-term evaluation of the Leibniz-expanded divergent form.
    Expanded,
    /// i^(2n+1) [(y^[2n])' - i phi_n y^(n)] with a five-point difference for (y^[2n])'.
    Chain,
};

/// Five-point stencil width used by TauMethod::Chain: max(1e-4, 1e-3 (b - a)).
double chain_stencil_width(const CoefficientSet& cs);

/// tau y on each grid point. `jobs` > 1 splits the grid over threads.
std::vector<cplx> apply_tau(const CoefficientSet& cs, const SmoothFunction& y, std::span<const double> grid,
                            TauMethod method, int jobs = 1);

/// Numeric value of a formal expression: symbols bound to coefficient derivatives at x,
/// s to sqrt(2 q0(x)), y^(b) to y's derivatives (null `y` requires a y-free expression).
/// conj-marked symbols evaluate to the complex conjugate.
cplx evaluate_formal(const symbolic::FormalExpr& e, const CoefficientSet& cs, const SmoothFunction* y, double x,
                     Side side = Side::None);

/// Cached formal objects for order 2n+1 (built once per n, thread-safe).
struct FormalForms {
    std::vector<symbolic::FormalExpr> chain;  // y^[0..2n]
    symbolic::FormalExpr tau;                 // expand(divergent_form(n))
};
const FormalForms& formal_forms(int n);

}  // namespace quasiode
