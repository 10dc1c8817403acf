#include "quasiode/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "quasiode/error.hpp"

namespace quasiode {

namespace {

constexpr cplx kI{0.0, 1.0};

double sign_pow(int e) { return e % 2 == 0 ? 1.0 : -1.0; }

cplx ipow(cplx base, int e) {
    cplx acc = 1.0;
    cplx b = e < 0 ? 1.0 / base : base;
    for (unsigned k = static_cast<unsigned>(std::abs(e)); k; k >>= 1) {
        if (k & 1u) acc *= b;
        b *= b;
    }
    return acc;
}

}  // namespace

SmoothFunction::SmoothFunction(Expr y, int max_order) {
    if (max_order < 0) throw ValidationError("max_order must be non-negative");
    derivs_.push_back(std::move(y));
    for (int k = 1; k <= max_order; ++k) derivs_.push_back(differentiate(derivs_.back(), 1));
}

SmoothFunction SmoothFunction::parse(std::string_view source, int max_order) {
    return SmoothFunction(parse_expression(source), max_order);
}

cplx SmoothFunction::derivative(int k, double x) const {
    if (k < 0 || k > max_order())
        throw ValidationError("test function derivative " + std::to_string(k) + " not prepared (max " +
                              std::to_string(max_order()) + ")");
    return evaluate(derivs_[static_cast<std::size_t>(k)], x);
}

const FormalForms& formal_forms(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<FormalForms>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto forms = std::make_unique<FormalForms>();
        forms->chain = symbolic::quasi_chain(n);
        forms->tau = symbolic::expand(symbolic::divergent_form(n));
        slot = std::move(forms);
    }
    return *slot;
}

cplx evaluate_formal(const symbolic::FormalExpr& e, const CoefficientSet& cs, const SmoothFunction* y, double x,
                     Side side) {
    std::map<symbolic::Factor, cplx> memo;
    auto factor_value = [&](const symbolic::Factor& f) {
        symbolic::Factor plain = f;
        plain.symbol.conj = false;
        auto it = memo.find(plain);
        if (it == memo.end()) {
            const Coefficient& c = plain.symbol.family == symbolic::Family::P ? cs.p(plain.symbol.index)
                                                                              : cs.q(plain.symbol.index);
            it = memo.emplace(plain, eval_coefficient(c, x, plain.deriv, side)).first;
        }
        return f.symbol.conj ? std::conj(it->second) : it->second;
    };
    cplx s = 0.0;
    bool have_s = false;
    std::map<int, cplx> ymemo;

    cplx total = 0.0;
    for (const auto& [key, coeff] : e.terms()) {
        cplx t = coeff.to_complex();
        for (const auto& [f, exponent] : key.monomial.factors) t *= ipow(factor_value(f), exponent);
        if (key.monomial.s_exp != 0) {
            if (!have_s) {
                s = std::sqrt(2.0 * eval_coefficient(cs.q0(), x, 0, side));
                have_s = true;
            }
            t *= ipow(s, key.monomial.s_exp);
        }
        if (key.y_deriv >= 0) {
            if (!y) throw ValidationError("formal expression references y but no test function was given");
            auto it = ymemo.find(key.y_deriv);
            if (it == ymemo.end()) it = ymemo.emplace(key.y_deriv, y->derivative(key.y_deriv, x)).first;
            t *= it->second;
        }
        total += t;
    }
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag()))
        throw EvaluationError("non-finite formal evaluation");
    return total;
}

QuasiVector quasi_derivatives(const CoefficientSet& cs, const SmoothFunction& y, double x) {
    const int n = cs.n();
    if (!(x >= cs.a() && x <= cs.b())) throw EvaluationError("quasi_derivatives: x outside [a, b]");
    if (std::binary_search(cs.breakpoints().begin(), cs.breakpoints().end(), x))
        throw EvaluationError("quasi_derivatives: x is a coefficient breakpoint");

    QuasiVector out;
    out.x = x;
    out.u.resize(static_cast<std::size_t>(2 * n + 1));
    for (int k = 0; k < n; ++k) out.u[k] = y.derivative(k, x);

    const cplx q0 = eval_coefficient(cs.q0(), x);
    const cplx s = std::sqrt(2.0 * q0);
    const cplx yn = y.derivative(n, x);
    out.u[n] = s * yn;

    // u[n+1] directly from the defining formula
    const cplx ds = eval_coefficient(cs.q0(), x, 1) / s;
    cplx v = s * (ds * yn + s * y.derivative(n + 1, x)) - kI * eval_coefficient(cs.p(0), x) * yn;
    for (int j = 1; j <= n; ++j) v -= kI * sign_pow(j) * phi(cs, j, x, true) * y.derivative(n - j, x);
    out.u[n + 1] = v;

    const FormalForms& forms = formal_forms(n);
    for (int j = n + 2; j <= 2 * n; ++j) out.u[j] = evaluate_formal(forms.chain[static_cast<std::size_t>(j)], cs, &y, x);
    return out;
}

double chain_stencil_width(const CoefficientSet& cs) { return std::max(1e-4, 1e-3 * (cs.b() - cs.a())); }

namespace {

cplx tau_expanded(const CoefficientSet& cs, const SmoothFunction& y, double x) {
    return evaluate_formal(formal_forms(cs.n()).tau, cs, &y, x);
}

cplx tau_chain(const CoefficientSet& cs, const SmoothFunction& y, double x) {
    const int n = cs.n();
    const double h = chain_stencil_width(cs);
    for (double c : cs.breakpoints())
        if (std::abs(x - c) <= 2.0 * h)
            throw EvaluationError("apply_tau(chain): grid point within 2h of breakpoint " + std::to_string(c));
    auto top = [&](double t) { return quasi_derivatives(cs, y, t).u[static_cast<std::size_t>(2 * n)]; };

    cplx d;
    if (x - 2.0 * h >= cs.a() && x + 2.0 * h <= cs.b()) {
        d = (top(x - 2.0 * h) - 8.0 * top(x - h) + 8.0 * top(x + h) - top(x + 2.0 * h)) / (12.0 * h);
    } else {
        // one-sided fourth-order stencil pointing into the interval
        const double g = (x - 2.0 * h < cs.a()) ? h : -h;
        d = (-25.0 * top(x) + 48.0 * top(x + g) - 36.0 * top(x + 2.0 * g) + 16.0 * top(x + 3.0 * g) -
             3.0 * top(x + 4.0 * g)) /
            (12.0 * g);
    }
    const cplx i_pow(0.0, n % 2 == 0 ? 1.0 : -1.0);  // i^(2n+1)
    return i_pow * (d - kI * phi(cs, n, x, false) * y.derivative(n, x));
}

}  // namespace

std::vector<cplx> apply_tau(const CoefficientSet& cs, const SmoothFunction& y, std::span<const double> grid,
                            TauMethod method, int jobs) {
    const int n = cs.n();
    const int needed = method == TauMethod::Expanded ? 2 * n + 1 : 2 * n;
    if (y.max_order() < needed)
        throw ValidationError("test function prepared to order " + std::to_string(y.max_order()) + ", need " +
                              std::to_string(needed));
    for (double x : grid)
        if (!(x >= cs.a() && x <= cs.b())) throw EvaluationError("apply_tau: grid point outside [a, b]");
    formal_forms(n);  // build before fanning out

    std::vector<cplx> out(grid.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            out[i] = method == TauMethod::Expanded ? tau_expanded(cs, y, grid[i]) : tau_chain(cs, y, grid[i]);
    };
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));
    if (jobs == 1) {
        work(0, grid.size());
        return out;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    {
        std::vector<std::jthread> threads;
        const std::size_t chunk = (grid.size() + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            const std::size_t lo = t * chunk, hi = std::min(grid.size(), lo + chunk);
            threads.emplace_back([&, t, lo, hi] {
                try {
                    work(lo, hi);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace quasiode
