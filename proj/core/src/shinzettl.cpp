#include "quasiode/shinzettl.hpp"

#include <cmath>
#include <cstdio>

#include "quasiode/error.hpp"

namespace quasiode {

namespace {

constexpr cplx kI{0.0, 1.0};

double sign_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

// Coefficient values at one point, shared by all entries of a row.
struct PointValues {
    cplx q0, s;
    std::vector<cplx> p, q;  // p[0..n], q[0..n] with q[0] = q0
};

PointValues sample(const CoefficientSet& cs, double x, Side side) {
    PointValues v;
    v.q0 = eval_coefficient(cs.q0(), x, 0, side);
    v.s = std::sqrt(2.0 * v.q0);
    v.p.resize(static_cast<std::size_t>(cs.n()) + 1);
    v.q.resize(static_cast<std::size_t>(cs.n()) + 1);
    for (int k = 0; k <= cs.n(); ++k) {
        v.p[k] = eval_coefficient(cs.p(k), x, 0, side);
        v.q[k] = k == 0 ? v.q0 : eval_coefficient(cs.q(k), x, 0, side);
    }
    return v;
}

cplx entry_value(const EntryKind& e, const PointValues& v) {
    using Tag = EntryKind::Tag;
    switch (e.tag) {
        case Tag::Zero:
            return 0.0;
        case Tag::One:
            return 1.0;
        case Tag::InvSqrt2Q0:
            return 1.0 / v.s;
        case Tag::CenterDiag:
            return kI * v.p[0] / (2.0 * v.q0);
        case Tag::PhiTildeRow:
            return sign_pow(e.j) * kI * (v.p[e.j] - kI * v.q[e.j]) / v.s;
        case Tag::PhiCol:
            return kI * (v.p[e.j] + kI * v.q[e.j]) / v.s;
        case Tag::LowerBlock: {
            const int m = e.j + 1;
            const double weight = 1.0 - 2.0 * e.k / static_cast<double>(m);
            return sign_pow(e.j + e.k + 1) * static_cast<double>(binomial(m, e.k)) * (kI * v.p[m] + weight * v.q[m]);
        }
    }
    return 0.0;
}

void check_range(const CoefficientSet& cs, double x) {
    if (!(x >= cs.a() && x <= cs.b())) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "x=%.17g outside [%.17g, %.17g]", x, cs.a(), cs.b());
        throw EvaluationError(buf);
    }
}

}  // namespace

std::string to_string(const EntryKind& kind) {
    using Tag = EntryKind::Tag;
    switch (kind.tag) {
        case Tag::Zero:
            return "Zero";
        case Tag::One:
            return "One";
        case Tag::InvSqrt2Q0:
            return "InvSqrt2Q0";
        case Tag::CenterDiag:
            return "CenterDiag";
        case Tag::PhiTildeRow:
            return "PhiTildeRow(" + std::to_string(kind.j) + ")";
        case Tag::PhiCol:
            return "PhiCol(" + std::to_string(kind.j) + ")";
        case Tag::LowerBlock:
            return "LowerBlock(" + std::to_string(kind.k) + "," + std::to_string(kind.j) + ")";
    }
    return "?";
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SparsityPattern::SparsityPattern(int n) : n_(n) {
    if (n < 1) throw ValidationError("Shin-Zettl matrix needs n >= 1");
    const int d = dim();
    kinds_.assign(static_cast<std::size_t>(d) * d, EntryKind::zero());
    auto set = [&](int r, int c, EntryKind e) {
        EntryKind& slot = kinds_[static_cast<std::size_t>(r - 1) * d + (c - 1)];
        if (!slot.is_zero()) throw AssertionError("pattern collision at (" + std::to_string(r) + "," + std::to_string(c) + ")");
        slot = e;
    };
    for (int i = 1; i <= n - 1; ++i) set(i, i + 1, EntryKind::one());
    for (int i = n + 2; i <= 2 * n; ++i) set(i, i + 1, EntryKind::one());
    set(n, n + 1, EntryKind::inv_sqrt_2q0());
    set(n + 1, n + 2, EntryKind::inv_sqrt_2q0());
    set(n + 1, n + 1, EntryKind::center_diag());
    for (int j = 1; j <= n; ++j) {
        set(n + 1, n + 1 - j, EntryKind::phi_tilde_row(j));
        set(n + 1 + j, n + 1, EntryKind::phi_col(j));
    }
    for (int k = 1; k <= n - 1; ++k)
        for (int j = k; j <= n - 1; ++j) set(n + 1 + k, n + k - j, EntryKind::lower_block(k, j));
}

const EntryKind& SparsityPattern::at(int row, int col) const {
    const int d = dim();
    if (row < 1 || row > d || col < 1 || col > d)
        throw ValidationError("entry (" + std::to_string(row) + "," + std::to_string(col) + ") out of range");
    return kinds_[static_cast<std::size_t>(row - 1) * d + (col - 1)];
}

int SparsityPattern::nonzeros() const {
    int c = 0;
    for (const auto& e : kinds_) c += e.is_zero() ? 0 : 1;
    return c;
}

SparsityPattern sparsity_pattern(int n) { return SparsityPattern(n); }

cplx eval_entry(const EntryKind& kind, const CoefficientSet& cs, double x, Side side) {
    check_range(cs, x);
    if ((kind.tag == EntryKind::Tag::PhiTildeRow || kind.tag == EntryKind::Tag::PhiCol) && (kind.j < 1 || kind.j > cs.n()))
        throw ValidationError("entry index out of range for n=" + std::to_string(cs.n()));
    if (kind.tag == EntryKind::Tag::LowerBlock && (kind.k < 1 || kind.j < kind.k || kind.j > cs.n() - 1))
        throw ValidationError("LowerBlock index out of range for n=" + std::to_string(cs.n()));
    return entry_value(kind, sample(cs, x, side));
}

ShinZettlMatrix::ShinZettlMatrix(std::shared_ptr<const CoefficientSet> cs)
    : cs_(std::move(cs)), pattern_(cs_ ? cs_->n() : 0) {}

Eigen::MatrixXcd eval_matrix(const ShinZettlMatrix& m, double x, Side side) {
    const CoefficientSet& cs = m.coefficients();
    check_range(cs, x);
    const PointValues v = sample(cs, x, side);
    const int d = m.dim();
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d, d);
    for (int r = 1; r <= d; ++r)
        for (int c = 1; c <= d; ++c) {
            const EntryKind& e = m.pattern().at(r, c);
            if (!e.is_zero()) f(r - 1, c - 1) = entry_value(e, v);
        }
    return f;
}

}  // namespace quasiode
