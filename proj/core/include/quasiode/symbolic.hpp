#pragma once

// Exact formal expressions linear in y, with polynomial coefficients in the
// primitives q_k^(a), p_k^(a), the auxiliary symbol s = sqrt(2 q0) and
// (possibly negative) powers of q0.
//
// Rewrite rules: s^2 -> 2 q0, s' -> q0' / s. A term is stored with s_exp in {0, 1}.

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "quasiode/gaussian_rational.hpp"
#include "quasiode/shinzettl.hpp"

namespace quasiode::symbolic {

enum class Family { P, Q };

/// p_index or q_index; q_0 is q0. `conj` is a formal complex-conjugation marker.
struct Symbol {
    Family family = Family::Q;
    int index = 0;
    bool conj = false;

    static Symbol p(int k) { return {Family::P, k}; }
    static Symbol q(int k) { return {Family::Q, k}; }
    static Symbol q0() { return {Family::Q, 0}; }

    auto operator<=>(const Symbol&) const = default;
};

/// symbol^(deriv)
struct Factor {
    Symbol symbol;
    int deriv = 0;

    auto operator<=>(const Factor&) const = default;
};

/// Product of factor powers times s^s_exp. The q0 exponent lives in the factor
/// map under Factor{q0, 0} and may be negative before a completed expansion.
struct Monomial {
    std::map<Factor, int> factors;
    int s_exp = 0;

    int q0_exp() const;
    auto operator<=>(const Monomial&) const = default;
};

/// Signature of one term: y^(y_deriv) (y_deriv = -1 means no y) times a monomial.
struct TermKey {
    int y_deriv = -1;
    Monomial monomial;

    auto operator<=>(const TermKey&) const = default;
};

struct FormalTerm {
    GaussRational coeff;
    TermKey key;
};

/// Canonical sum of terms: sorted by (y_deriv, factors, s_exp), distinct
/// signatures, nonzero coefficients, s_exp in {0, 1}.
class FormalExpr {
public:
    FormalExpr() = default;

    static FormalExpr constant(const GaussRational& c);
    static FormalExpr symbol(Symbol s, int deriv = 0);
    /// y^(b)
    static FormalExpr y(int b);
    /// s^e, normalized.
    static FormalExpr sqrt2q0(int e = 1);
    /// q0^e (e may be negative).
    static FormalExpr q0_pow(int e);

    /// Adds c * key, normalizing s powers first.
    void add_term(GaussRational c, TermKey key);

    const std::map<TermKey, GaussRational>& terms() const noexcept { return terms_; }
    std::vector<FormalTerm> term_list() const;
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    FormalExpr& operator+=(const FormalExpr& o);
    FormalExpr& operator-=(const FormalExpr& o);
    FormalExpr& operator*=(const GaussRational& c);

    friend FormalExpr operator+(FormalExpr a, const FormalExpr& b) { return a += b; }
    friend FormalExpr operator-(FormalExpr a, const FormalExpr& b) { return a -= b; }
    friend FormalExpr operator*(FormalExpr a, const GaussRational& c) { return a *= c; }
    friend FormalExpr operator*(const GaussRational& c, FormalExpr a) { return a *= c; }
    /// Product; at most one operand may contain y.
    friend FormalExpr operator*(const FormalExpr& a, const FormalExpr& b);
    FormalExpr operator-() const { return *this * GaussRational(-1); }

    friend bool operator==(const FormalExpr& a, const FormalExpr& b) { return a.terms_ == b.terms_; }

    /// Re-applies the normal form; idempotent.
    FormalExpr normalized() const;

    /// Highest y derivative present, or -1.
    int max_y_deriv() const;

    std::string str() const;

private:
    std::map<TermKey, GaussRational> terms_;
};

/// d/dx with the product rule over every factor, s' = q0'/s and y^(b)' = y^(b+1).
FormalExpr formal_derivative(const FormalExpr& e);

std::string to_string(const Symbol& s);
std::string to_string(const FormalTerm& t);

// ---------------------------------------------------------------------------
// Divergent forms

/// c * (w^(w_deriv) * y^(a))^(b)
struct DivergentAtom {
    GaussRational c;
    Symbol w;
    int w_deriv = 0;
    int a = 0;
    int b = 0;

    friend bool operator==(const DivergentAtom&, const DivergentAtom&) = default;
};

using AtomicDivergentExpr = std::vector<DivergentAtom>;

/// How the q_k terms are differentiated in the divergent form.
enum class DivergentVariant {
    /// q_k^(k-1): what the quasi-derivative recursion produces.
    Regularized,
    /// q_k^(k): the literal reading of the printed headline formula.
    LiteralQOrder,
};

/// The 3n+3 atoms of tau_{2n+1}:
///   (-1)^n i (q0 y^(n+1))^(n),  (-1)^n i (q0 y^(n))^(n+1),
///   (-1)^(n+k) (p_k^(k) y^(n-k))^(n-k)                                    k = 0..n
///   i (-1)^(n+k+1) (q_k^(d) y^(n+1-k))^(n-k), i (-1)^(n+k+1) (q_k^(d) y^(n-k))^(n+1-k)   k = 1..n
/// with d = k-1 (Regularized) or d = k (LiteralQOrder).
AtomicDivergentExpr divergent_form(int n, DivergentVariant variant = DivergentVariant::Regularized);

/// Leibniz expansion: c (w y^(a))^(b) = sum_m c C(b,m) w^(m + w_deriv) y^(a+b-m).
FormalExpr expand(const AtomicDivergentExpr& ade);

/// Lagrange adjoint atom map: c (w y^(a))^(b) -> conj(c) (-1)^(a+b) (conj(w) y^(b))^(a).
AtomicDivergentExpr formal_adjoint(const AtomicDivergentExpr& ade);

/// Resolves conj markers to the plain symbols (coefficients declared real).
AtomicDivergentExpr resolve_real(AtomicDivergentExpr ade);

std::string to_string(const DivergentAtom& a);

// ---------------------------------------------------------------------------
// Quasi-derivative recursion

/// Formal value of one matrix entry in the symbols p_k, q_k, s.
FormalExpr entry_expr(const EntryKind& kind);

/// u_1..u_{2n+1} (returned 0-based: chain[j] = y^[j]) from
/// u_{i+1} = f(i,i+1)^{-1} [u_i' - sum_{j != i+1} f(i,j) u_j], u_1 = y.
std::vector<FormalExpr> quasi_chain(int n);

/// i^(2n+1) [u_{2n+1}' - f(2n+1, n+1) u_{n+1}], fully expanded.
/// Throws AssertionError if any term keeps a power of s or a negative power of q0.
FormalExpr quasi_tau(int n);

struct Comparison {
    bool equal = false;
    /// a - b, i.e. terms only in a (positive) and only in b (negated), merged.
    FormalExpr difference;
    std::vector<FormalTerm> only_in_a;
    std::vector<FormalTerm> only_in_b;
};

Comparison expr_equal(const FormalExpr& a, const FormalExpr& b);

/// Default cap on n for verification runs.
inline constexpr int kDefaultVerifyCap = 5;

}  // namespace quasiode::symbolic
