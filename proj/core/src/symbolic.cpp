#include "quasiode/symbolic.hpp"

#include <sstream>

#include "quasiode/error.hpp"

namespace quasiode::symbolic {

namespace {

const Factor kQ0{Symbol::q0(), 0};
const Factor kQ0Prime{Symbol::q0(), 1};

GaussRational pow2(int m) {
    mpq_class r(1);
    if (m >= 0)
        r = mpz_class(1) << m;
    else {
        r = mpq_class(mpz_class(1), mpz_class(mpz_class(1) << -m));
    }
    return {r};
}

void bump(std::map<Factor, int>& factors, const Factor& f, int by) {
    if (by == 0) return;
    auto [it, inserted] = factors.try_emplace(f, by);
    if (!inserted) {
        it->second += by;
        if (it->second == 0) factors.erase(it);
    }
}

std::string primes(int d) {
    if (d <= 3) return std::string(static_cast<std::size_t>(d), '\'');
    return "^(" + std::to_string(d) + ")";
}

int sign_pow(int e) { return e % 2 == 0 ? 1 : -1; }

}  // namespace

int Monomial::q0_exp() const {
    auto it = factors.find(kQ0);
    return it == factors.end() ? 0 : it->second;
}

FormalExpr FormalExpr::constant(const GaussRational& c) {
    FormalExpr e;
    e.add_term(c, TermKey{});
    return e;
}

FormalExpr FormalExpr::symbol(Symbol s, int deriv) {
    TermKey k;
    k.monomial.factors[Factor{s, deriv}] = 1;
    FormalExpr e;
    e.add_term(1, k);
    return e;
}

FormalExpr FormalExpr::y(int b) {
    TermKey k;
    k.y_deriv = b;
    FormalExpr e;
    e.add_term(1, k);
    return e;
}

FormalExpr FormalExpr::sqrt2q0(int exponent) {
    TermKey k;
    k.monomial.s_exp = exponent;
    FormalExpr e;
    e.add_term(1, k);
    return e;
}

FormalExpr FormalExpr::q0_pow(int exponent) {
    TermKey k;
    if (exponent != 0) k.monomial.factors[kQ0] = exponent;
    FormalExpr e;
    e.add_term(1, k);
    return e;
}

void FormalExpr::add_term(GaussRational c, TermKey key) {
    if (c.is_zero()) return;
    // s^(2m + r) = 2^m q0^m s^r, r in {0, 1}
    const int r = ((key.monomial.s_exp % 2) + 2) % 2;
    const int m = (key.monomial.s_exp - r) / 2;
    if (m != 0) {
        c *= pow2(m);
        bump(key.monomial.factors, kQ0, m);
    }
    key.monomial.s_exp = r;
    for (auto it = key.monomial.factors.begin(); it != key.monomial.factors.end();)
        it = it->second == 0 ? key.monomial.factors.erase(it) : std::next(it);

    auto [it, inserted] = terms_.try_emplace(std::move(key), c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

std::vector<FormalTerm> FormalExpr::term_list() const {
    std::vector<FormalTerm> out;
    out.reserve(terms_.size());
    for (const auto& [k, c] : terms_) out.push_back({c, k});
    return out;
}

FormalExpr& FormalExpr::operator+=(const FormalExpr& o) {
    for (const auto& [k, c] : o.terms_) add_term(c, k);
    return *this;
}

FormalExpr& FormalExpr::operator-=(const FormalExpr& o) {
    for (const auto& [k, c] : o.terms_) add_term(-c, k);
    return *this;
}

FormalExpr& FormalExpr::operator*=(const GaussRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

FormalExpr operator*(const FormalExpr& a, const FormalExpr& b) {
    FormalExpr out;
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) {
            if (ka.y_deriv >= 0 && kb.y_deriv >= 0) throw AssertionError("product of two y-linear expressions");
            TermKey k = ka;
            k.y_deriv = std::max(ka.y_deriv, kb.y_deriv);
            for (const auto& [f, e] : kb.monomial.factors) bump(k.monomial.factors, f, e);
            k.monomial.s_exp += kb.monomial.s_exp;
            out.add_term(ca * cb, std::move(k));
        }
    return out;
}

FormalExpr FormalExpr::normalized() const {
    FormalExpr out;
    for (const auto& [k, c] : terms_) out.add_term(c, k);
    return out;
}

int FormalExpr::max_y_deriv() const {
    int m = -1;
    for (const auto& [k, _] : terms_) m = std::max(m, k.y_deriv);
    return m;
}

std::string FormalExpr::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        std::string t = to_string(FormalTerm{c, k});
        if (!first) out += (t.front() == '-') ? " - " + t.substr(1) : " + " + t;
        else out += t;
        first = false;
    }
    return out;
}

FormalExpr formal_derivative(const FormalExpr& e) {
    FormalExpr out;
    for (const auto& [key, c] : e.terms()) {
        if (key.y_deriv >= 0) {
            TermKey k = key;
            ++k.y_deriv;
            out.add_term(c, std::move(k));
        }
        for (const auto& [f, exponent] : key.monomial.factors) {
            TermKey k = key;
            bump(k.monomial.factors, f, -1);
            bump(k.monomial.factors, Factor{f.symbol, f.deriv + 1}, 1);
            out.add_term(c * GaussRational(exponent), std::move(k));
        }
        if (key.monomial.s_exp != 0) {
            // (s^r)' = r s^(r-1) q0' / s
            TermKey k = key;
            k.monomial.s_exp -= 2;
            bump(k.monomial.factors, kQ0Prime, 1);
            out.add_term(c * GaussRational(key.monomial.s_exp), std::move(k));
        }
    }
    return out;
}

std::string to_string(const Symbol& s) {
    std::string base = (s.family == Family::P ? "p" : "q") + std::to_string(s.index);
    return s.conj ? "conj(" + base + ")" : base;
}

std::string to_string(const FormalTerm& t) {
    std::vector<std::string> parts;
    for (const auto& [f, e] : t.key.monomial.factors) {
        std::string p = to_string(f.symbol) + primes(f.deriv);
        if (e != 1) p += "^" + std::to_string(e);
        parts.push_back(p);
    }
    if (t.key.monomial.s_exp != 0) parts.push_back("s");
    if (t.key.y_deriv >= 0) parts.push_back("y" + primes(t.key.y_deriv));

    std::string coeff = t.coeff.str();
    std::string out;
    if (parts.empty()) return coeff;
    if (coeff == "1")
        out = "";
    else if (coeff == "-1")
        out = "-";
    else
        out = coeff + "*";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "*" : "") + parts[i];
    return out;
}

// ---------------------------------------------------------------------------

AtomicDivergentExpr divergent_form(int n, DivergentVariant variant) {
    if (n < 1) throw ValidationError("divergent_form needs n >= 1");
    AtomicDivergentExpr atoms;
    const GaussRational lead = GaussRational(sign_pow(n)) * GaussRational::i();
    atoms.push_back({lead, Symbol::q0(), 0, n + 1, n});
    atoms.push_back({lead, Symbol::q0(), 0, n, n + 1});
    for (int k = 0; k <= n; ++k) atoms.push_back({GaussRational(sign_pow(n + k)), Symbol::p(k), k, n - k, n - k});
    for (int k = 1; k <= n; ++k) {
        const GaussRational c = GaussRational::i() * GaussRational(sign_pow(n + k + 1));
        const int d = variant == DivergentVariant::Regularized ? k - 1 : k;
        atoms.push_back({c, Symbol::q(k), d, n + 1 - k, n - k});
        atoms.push_back({c, Symbol::q(k), d, n - k, n + 1 - k});
    }
    return atoms;
}

FormalExpr expand(const AtomicDivergentExpr& ade) {
    FormalExpr out;
    for (const auto& atom : ade) {
        if (atom.a < 0 || atom.b < 0 || atom.w_deriv < 0) throw ValidationError("divergent atom with negative order");
        for (int m = 0; m <= atom.b; ++m) {
            TermKey k;
            k.y_deriv = atom.a + atom.b - m;
            k.monomial.factors[Factor{atom.w, atom.w_deriv + m}] = 1;
            out.add_term(atom.c * GaussRational(binomial(atom.b, m)), std::move(k));
        }
    }
    return out;
}

AtomicDivergentExpr formal_adjoint(const AtomicDivergentExpr& ade) {
    AtomicDivergentExpr out;
    out.reserve(ade.size());
    for (const auto& atom : ade) {
        Symbol w = atom.w;
        w.conj = !w.conj;
        out.push_back({atom.c.conj() * GaussRational(sign_pow(atom.a + atom.b)), w, atom.w_deriv, atom.b, atom.a});
    }
    return out;
}

AtomicDivergentExpr resolve_real(AtomicDivergentExpr ade) {
    for (auto& atom : ade) atom.w.conj = false;
    return ade;
}

std::string to_string(const DivergentAtom& a) {
    std::ostringstream os;
    os << a.c.str() << "*(" << to_string(a.w) << primes(a.w_deriv) << "*y" << primes(a.a) << ")" << primes(a.b);
    if (a.b == 0) os << "^(0)";
    return os.str();
}

// ---------------------------------------------------------------------------

FormalExpr entry_expr(const EntryKind& kind) {
    using Tag = EntryKind::Tag;
    const GaussRational i = GaussRational::i();
    switch (kind.tag) {
        case Tag::Zero:
            return {};
        case Tag::One:
            return FormalExpr::constant(1);
        case Tag::InvSqrt2Q0:
            return FormalExpr::sqrt2q0(-1);
        case Tag::CenterDiag:
            return (i * GaussRational::frac(1, 2)) * (FormalExpr::symbol(Symbol::p(0)) * FormalExpr::q0_pow(-1));
        case Tag::PhiTildeRow: {
            FormalExpr phi_tilde = FormalExpr::symbol(Symbol::p(kind.j)) - i * FormalExpr::symbol(Symbol::q(kind.j));
            return (GaussRational(sign_pow(kind.j)) * i) * (phi_tilde * FormalExpr::sqrt2q0(-1));
        }
        case Tag::PhiCol: {
            FormalExpr phi = FormalExpr::symbol(Symbol::p(kind.j)) + i * FormalExpr::symbol(Symbol::q(kind.j));
            return i * (phi * FormalExpr::sqrt2q0(-1));
        }
        case Tag::LowerBlock: {
            const int m = kind.j + 1;
            const GaussRational weight = GaussRational::frac(m - 2 * kind.k, m);
            FormalExpr bracket = i * FormalExpr::symbol(Symbol::p(m)) + weight * FormalExpr::symbol(Symbol::q(m));
            return GaussRational(sign_pow(kind.j + kind.k + 1) * binomial(m, kind.k)) * bracket;
        }
    }
    return {};
}

namespace {

FormalExpr inverse_superdiagonal(const EntryKind& kind) {
    switch (kind.tag) {
        case EntryKind::Tag::One:
            return FormalExpr::constant(1);
        case EntryKind::Tag::InvSqrt2Q0:
            return FormalExpr::sqrt2q0(1);
        default:
            throw AssertionError("superdiagonal entry " + to_string(kind) + " has no formal inverse");
    }
}

// u_i' - sum_{j != skip} f(i, j) u_j over the computed prefix of the chain.
FormalExpr row_residual(const SparsityPattern& pattern, int row, int skip, const std::vector<FormalExpr>& u) {
    FormalExpr acc = formal_derivative(u[static_cast<std::size_t>(row - 1)]);
    for (int col = 1; col <= pattern.dim(); ++col) {
        if (col == skip) continue;
        const EntryKind& e = pattern.at(row, col);
        if (e.is_zero()) continue;
        if (col > static_cast<int>(u.size()))
            throw AssertionError("row " + std::to_string(row) + " references u_" + std::to_string(col) + " before it exists");
        acc -= entry_expr(e) * u[static_cast<std::size_t>(col - 1)];
    }
    return acc;
}

}  // namespace

std::vector<FormalExpr> quasi_chain(int n) {
    const SparsityPattern pattern = sparsity_pattern(n);
    std::vector<FormalExpr> u{FormalExpr::y(0)};
    for (int row = 1; row <= 2 * n; ++row) {
        FormalExpr acc = row_residual(pattern, row, row + 1, u);
        u.push_back(inverse_superdiagonal(pattern.at(row, row + 1)) * acc);
    }
    return u;
}

FormalExpr quasi_tau(int n) {
    const SparsityPattern pattern = sparsity_pattern(n);
    const std::vector<FormalExpr> u = quasi_chain(n);
    FormalExpr tau = GaussRational::i_pow(2 * n + 1) * row_residual(pattern, 2 * n + 1, -1, u);
    for (const auto& [k, c] : tau.terms()) {
        if (k.monomial.s_exp != 0) throw AssertionError("residual sqrt(2 q0) power in " + to_string(FormalTerm{c, k}));
        if (k.monomial.q0_exp() < 0) throw AssertionError("negative q0 power in " + to_string(FormalTerm{c, k}));
    }
    return tau;
}

Comparison expr_equal(const FormalExpr& a, const FormalExpr& b) {
    Comparison cmp;
    const FormalExpr na = a.normalized(), nb = b.normalized();
    cmp.equal = na == nb;
    cmp.difference = na - nb;
    for (const auto& [k, c] : na.terms()) {
        auto it = nb.terms().find(k);
        if (it == nb.terms().end() || it->second != c) cmp.only_in_a.push_back({c, k});
    }
    for (const auto& [k, c] : nb.terms()) {
        auto it = na.terms().find(k);
        if (it == na.terms().end() || it->second != c) cmp.only_in_b.push_back({c, k});
    }
    return cmp;
}

}  // namespace quasiode::symbolic
