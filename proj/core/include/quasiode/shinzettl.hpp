#pragma once

// The (2n+1)x(2n+1) Shin-Zettl matrix F_{2n+1} whose recursion defines the
// quasi-derivatives y^[0..2n]. Indices in this API are 1-based.
//
// Nonzero entries:
//   f(i, i+1)        = 1                          i = 1..n-1, n+2..2n
//   f(n, n+1)        = f(n+1, n+2) = 1/sqrt(2 q0)
//   f(n+1, n+1)      = i p0 / (2 q0)
//   f(n+1, n+1-j)    = (-1)^j i phi~_j / sqrt(2 q0)      j = 1..n
//   f(n+1+j, n+1)    = i phi_j / sqrt(2 q0)              j = 1..n
//   f(n+1+k, n+k-j)  = (-1)^(j+k+1) C(j+1, k) [i p_{j+1} + (1 - 2k/(j+1)) q_{j+1}]
//                                                        k = 1..n-1, j = k..n-1
// Only primitives appear, never their derivatives.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quasiode/coeffs.hpp"

namespace quasiode {

struct EntryKind {
    enum class Tag { Zero, One, InvSqrt2Q0, CenterDiag, PhiTildeRow, PhiCol, LowerBlock };

    Tag tag = Tag::Zero;
    int j = 0;  // PhiTildeRow(j), PhiCol(j), LowerBlock(k, j)
    int k = 0;  // LowerBlock(k, j)

    static EntryKind zero() { return {}; }
    static EntryKind one() { return {Tag::One}; }
    static EntryKind inv_sqrt_2q0() { return {Tag::InvSqrt2Q0}; }
    static EntryKind center_diag() { return {Tag::CenterDiag}; }
    static EntryKind phi_tilde_row(int j) { return {Tag::PhiTildeRow, j}; }
    static EntryKind phi_col(int j) { return {Tag::PhiCol, j}; }
    static EntryKind lower_block(int k, int j) { return {Tag::LowerBlock, j, k}; }

    bool is_zero() const noexcept { return tag == Tag::Zero; }
    friend bool operator==(const EntryKind&, const EntryKind&) = default;
};

/// "One", "InvSqrt2Q0", "CenterDiag", "PhiTildeRow(j)", "PhiCol(j)", "LowerBlock(k,j)", "Zero".
std::string to_string(const EntryKind& kind);

/// Dense (2n+1)^2 table of entry kinds, addressed 1-based.
class SparsityPattern {
public:
    explicit SparsityPattern(int n);

    int n() const noexcept { return n_; }
    int dim() const noexcept { return 2 * n_ + 1; }
    const EntryKind& at(int row, int col) const;

    /// Number of non-Zero entries.
    int nonzeros() const;

private:
    int n_;
    std::vector<EntryKind> kinds_;
};

/// Static pattern of F_{2n+1}. Throws ValidationError for n < 1.
SparsityPattern sparsity_pattern(int n);

/// binomial(n, k) as used by the lower block, C_{j+1}^k = (j+1 choose k).
long long binomial(int n, int k);

/// Numeric value of one entry; principal branch of sqrt(2 q0).
cplx eval_entry(const EntryKind& kind, const CoefficientSet& cs, double x, Side side = Side::None);

class ShinZettlMatrix {
public:
    explicit ShinZettlMatrix(std::shared_ptr<const CoefficientSet> cs);

    int n() const noexcept { return pattern_.n(); }
    int dim() const noexcept { return pattern_.dim(); }
    const SparsityPattern& pattern() const noexcept { return pattern_; }
    const CoefficientSet& coefficients() const noexcept { return *cs_; }
    const std::shared_ptr<const CoefficientSet>& coefficients_ptr() const noexcept { return cs_; }

private:
    std::shared_ptr<const CoefficientSet> cs_;
    SparsityPattern pattern_;
};

/// Assembles F(x). Zero entries are exactly 0. Throws EvaluationError for x outside [a, b].
Eigen::MatrixXcd eval_matrix(const ShinZettlMatrix& m, double x, Side side = Side::None);

}  // namespace quasiode
