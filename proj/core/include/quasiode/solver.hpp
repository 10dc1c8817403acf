#pragma once

// The regularized first-order system u' = (F(x) + lambda E) u, its fundamental
// matrix, and eigenvalues of two-point boundary problems A u(a) + B u(b) = 0.
//
// tau y = lambda y with u = (y^[0], ..., y^[2n]) is equivalent to the system
// above when E has the single entry (-i)^(2n+1) at (2n+1, 1): the last row of
// the recursion reads i^(2n+1) [u_{2n+1}' - f(2n+1, n+1) u_{n+1}] = lambda u_1.

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "quasiode/shinzettl.hpp"

namespace quasiode {

/// (-i)^(2n+1), the weight of lambda at entry (2n+1, 1).
cplx spectral_weight(int n);

class SpectralSystem {
public:
    SpectralSystem(std::shared_ptr<const CoefficientSet> cs, cplx lambda);

    int n() const noexcept { return matrix_.n(); }
    int dim() const noexcept { return matrix_.dim(); }
    cplx lambda() const noexcept { return lambda_; }
    const ShinZettlMatrix& matrix() const noexcept { return matrix_; }
    const CoefficientSet& coefficients() const noexcept { return matrix_.coefficients(); }

    /// F(x) + lambda E
    Eigen::MatrixXcd system_matrix(double x, Side side = Side::None) const;

private:
    ShinZettlMatrix matrix_;
    cplx lambda_;
};

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: automatic
    double max_step = 0.0;      // 0: unbounded
    long max_steps = 2'000'000;
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    int segments = 0;
    /// Largest scaled error estimate of an accepted step (<= 1 when tolerances were met).
    double max_error_estimate = 0.0;
};

/// Adaptive Dormand-Prince 5(4) with PI step control. The range is split at
/// every coefficient knot; on each piece F is evaluated from inside that piece,
/// so step and sampled coefficients are handled exactly and u stays continuous.
/// x1 < x0 integrates backwards. Throws NumericError on step-size underflow
/// or a non-finite matrix entry.
Eigen::VectorXcd integrate_system(const SpectralSystem& sys, double x0, const Eigen::VectorXcd& u0, double x1,
                                  const IntegratorOptions& opts = {}, IntegrationStats* stats = nullptr);

/// Matrix-valued variant: every column of U0 is propagated with shared steps.
Eigen::MatrixXcd integrate_columns(const SpectralSystem& sys, double x0, const Eigen::MatrixXcd& U0, double x1,
                                   const IntegratorOptions& opts = {}, IntegrationStats* stats = nullptr);

/// Fixed-step Dormand-Prince (5th-order solution) with `steps` equal steps per
/// knot segment; used to measure the convergence order.
Eigen::MatrixXcd integrate_fixed_step(const SpectralSystem& sys, double x0, const Eigen::MatrixXcd& U0, double x1,
                                      int steps);

struct FundamentalMatrix {
    Eigen::MatrixXcd Y;
    double a = 0.0;
    double b = 0.0;
    cplx lambda{};
    double error_estimate = 0.0;
    IntegrationStats stats;
};

/// Y(a) = I propagated to b.
FundamentalMatrix fundamental_matrix(std::shared_ptr<const CoefficientSet> cs, cplx lambda, double a, double b,
                                     const IntegratorOptions& opts = {});

/// integral over [a, b] of the trace i p0 / (2 q0), by adaptive Gauss-Kronrod on each knot segment.
cplx trace_integral(const CoefficientSet& cs, double a, double b, double tol = 1e-13);

/// exp(trace_integral): the value det Y(b) must take for every lambda.
cplx liouville_determinant(const CoefficientSet& cs, double a, double b);

struct BoundaryProblem {
    std::shared_ptr<const CoefficientSet> cs;
    Eigen::MatrixXcd A;
    Eigen::MatrixXcd B;
    std::string preset;  // "periodic", "antiperiodic", or empty for explicit matrices

    /// A = I, B = -I
    static BoundaryProblem periodic(std::shared_ptr<const CoefficientSet> cs);
    /// A = I, B = I
    static BoundaryProblem antiperiodic(std::shared_ptr<const CoefficientSet> cs);
    static BoundaryProblem from_matrices(std::shared_ptr<const CoefficientSet> cs, Eigen::MatrixXcd A,
                                         Eigen::MatrixXcd B);

    /// rank [A | B] == 2n+1; degenerate conditions otherwise.
    bool full_rank() const;
};

/// det(A + B Y(b; lambda)); zero exactly at eigenvalues. Evaluated by propagating from the
/// midpoint to both ends, which keeps the matrices that enter the determinant small.
cplx characteristic_det(const BoundaryProblem& bp, cplx lambda, const IntegratorOptions& opts = {});

struct RealInterval {
    double lo = 0.0;
    double hi = 0.0;
    int samples = 2;
};

struct ComplexRect {
    cplx lower_left;
    cplx upper_right;
    int re_samples = 2;
    int im_samples = 2;
};

using SearchRegion = std::variant<RealInterval, ComplexRect>;

struct EigenOptions {
    IntegratorOptions integrator;
    double refine_tol = 1e-10;
    int max_iter = 50;
    int jobs = 1;
};

struct Eigenvalue {
    cplx lambda;
    double residual = 0.0;  // |det(lambda)|
    int iterations = 0;
};

struct EigenSearchResult {
    std::vector<Eigenvalue> eigenvalues;  // sorted by |lambda|
    std::vector<std::string> warnings;    // dropped candidates, rank deficiency
    int evaluations = 0;
};

/// Scans |det| over the region, refines each local minimum by complex secant
/// iteration, drops candidates outside the region or not converging within
/// max_iter, and merges roots closer than 10 refine_tol (relative to max(1, |lambda|)).
/// Degenerate conditions give a warning and no eigenvalues.
EigenSearchResult find_eigenvalues(const BoundaryProblem& bp, const SearchRegion& region, const EigenOptions& opts = {});

}  // namespace quasiode
