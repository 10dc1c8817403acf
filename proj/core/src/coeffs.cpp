#include "quasiode/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "json.hpp"
#include "quasiode/error.hpp"

namespace quasiode {

using json = nlohmann::json;

struct Coefficient::DerivativeCache {
    std::mutex mutex;
    std::vector<Expr> derivs;  // derivs[k] is the k-th derivative
};

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool all_finite(const std::vector<cplx>& v) {
    return std::all_of(v.begin(), v.end(), [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i])) return false;
    return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

const std::vector<double> kNoBreakpoints;

}  // namespace

Coefficient::Coefficient(Kind kind) : kind_(std::move(kind)), cache_(std::make_shared<DerivativeCache>()) {
    if (auto* e = std::get_if<ExprKind>(&kind_)) cache_->derivs.push_back(e->ast);
}

Coefficient::Coefficient() : Coefficient(ExprKind{"0", make_const(0.0)}) {}

Coefficient Coefficient::from_expr(std::string_view source) {
    return Coefficient(ExprKind{std::string(source), parse_expression(source)});
}

Coefficient Coefficient::steps(std::vector<double> breakpoints, std::vector<cplx> values) {
    if (values.size() != breakpoints.size() + 1)
        throw ValidationError("steps: need breakpoints+1 values, got " + std::to_string(values.size()) + " values for " +
                              std::to_string(breakpoints.size()) + " breakpoints");
    if (!strictly_increasing(breakpoints)) throw ValidationError("steps: breakpoints must be strictly increasing");
    if (!all_finite(values)) throw ValidationError("steps: values must be finite");
    return Coefficient(StepsKind{std::move(breakpoints), std::move(values)});
}

Coefficient Coefficient::grid(std::vector<double> abscissae, std::vector<cplx> values) {
    if (abscissae.size() < 2) throw ValidationError("grid: need at least two abscissae");
    if (values.size() != abscissae.size())
        throw ValidationError("grid: abscissae and values differ in length");
    if (!strictly_increasing(abscissae)) throw ValidationError("grid: abscissae must be strictly increasing");
    if (!all_finite(values)) throw ValidationError("grid: values must be finite");
    return Coefficient(GridKind{std::move(abscissae), std::move(values)});
}

bool Coefficient::is_zero() const {
    const auto* e = std::get_if<ExprKind>(&kind_);
    return e && e->ast->op == ExprOp::Const && e->ast->value == 0.0;
}

const std::vector<double>& Coefficient::breakpoints() const {
    if (const auto* s = std::get_if<StepsKind>(&kind_)) return s->breakpoints;
    return kNoBreakpoints;
}

std::vector<double> Coefficient::kinks() const {
    if (const auto* s = std::get_if<StepsKind>(&kind_)) return s->breakpoints;
    if (const auto* g = std::get_if<GridKind>(&kind_)) {
        if (g->abscissae.size() <= 2) return {};
        return {g->abscissae.begin() + 1, g->abscissae.end() - 1};
    }
    return {};
}

Expr Coefficient::derivative_expr(int order) const {
    if (!is_expr()) throw ValidationError("derivative_expr: coefficient is not a closed-form expression");
    if (order < 0 || order > kDefaultDerivativeCap)
        throw ValidationError("derivative order " + std::to_string(order) + " exceeds cap " +
                              std::to_string(kDefaultDerivativeCap));
    std::lock_guard lock(cache_->mutex);
    auto& d = cache_->derivs;
    while (static_cast<int>(d.size()) <= order) d.push_back(differentiate(d.back(), 1));
    return d[static_cast<std::size_t>(order)];
}

bool Coefficient::operator==(const Coefficient& other) const {
    if (kind_.index() != other.kind_.index()) return false;
    if (const auto* e = std::get_if<ExprKind>(&kind_))
        return structurally_equal(e->ast, std::get<ExprKind>(other.kind_).ast);
    if (const auto* s = std::get_if<StepsKind>(&kind_)) {
        const auto& o = std::get<StepsKind>(other.kind_);
        return s->breakpoints == o.breakpoints && s->values == o.values;
    }
    const auto& g = std::get<GridKind>(kind_);
    const auto& o = std::get<GridKind>(other.kind_);
    return g.abscissae == o.abscissae && g.values == o.values;
}

cplx eval_coefficient(const Coefficient& c, double x, int deriv, Side side) {
    if (deriv < 0) throw ValidationError("negative derivative order");
    if (deriv > c.smoothness_order())
        throw ValidationError("derivative order " + std::to_string(deriv) + " exceeds smoothness order " +
                              std::to_string(c.smoothness_order()) + " of a non-smooth coefficient");
    if (c.is_expr()) return evaluate(c.derivative_expr(deriv), x);
    if (const auto* s = std::get_if<StepsKind>(&c.kind())) {
        const auto& bp = s->breakpoints;
        const bool on_breakpoint = std::binary_search(bp.begin(), bp.end(), x);
        if (on_breakpoint && side == Side::None)
            throw EvaluationError("step coefficient evaluated exactly at breakpoint x=" + fmt(x) +
                                  " without a side flag");
        const auto it = side == Side::Left ? std::lower_bound(bp.begin(), bp.end(), x)
                                           : std::upper_bound(bp.begin(), bp.end(), x);
        return s->values[static_cast<std::size_t>(it - bp.begin())];
    }
    const auto& g = std::get<GridKind>(c.kind());
    const auto& xs = g.abscissae;
    if (x < xs.front() || x > xs.back()) throw EvaluationError("grid coefficient evaluated outside its abscissae at x=" + fmt(x));
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return g.values.back();
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    const auto lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return g.values[lo] + t * (g.values[hi] - g.values[lo]);
}

CoefficientSet::CoefficientSet(int n, double a, double b, Coefficient q0, std::vector<Coefficient> p,
                               std::vector<Coefficient> q)
    : n_(n), a_(a), b_(b), q0_(std::move(q0)), p_(std::move(p)), q_(std::move(q)) {
    if (n_ < 1) throw ValidationError("n must be >= 1");
    if (!(std::isfinite(a_) && std::isfinite(b_) && a_ < b_)) throw ValidationError("interval must satisfy a < b, both finite");
    if (p_.empty()) p_.resize(static_cast<std::size_t>(n_) + 1);
    if (q_.empty()) q_.resize(static_cast<std::size_t>(n_));
    if (p_.size() != static_cast<std::size_t>(n_) + 1) throw ValidationError("expected p_0..p_n");
    if (q_.size() != static_cast<std::size_t>(n_)) throw ValidationError("expected q_1..q_n");
    if (q0_.is_steps()) throw ValidationError("q0 must be absolutely continuous (kind expr or grid), not steps");

    std::vector<const Coefficient*> all{&q0_};
    for (const auto& c : p_) all.push_back(&c);
    for (const auto& c : q_) all.push_back(&c);

    for (const Coefficient* c : all) {
        for (double t : c->breakpoints()) {
            if (!(a_ < t && t < b_)) throw ValidationError("breakpoint " + fmt(t) + " outside (a, b)");
            breakpoints_.push_back(t);
        }
        if (const auto* g = std::get_if<GridKind>(&c->kind())) {
            if (g->abscissae.front() > a_ || g->abscissae.back() < b_)
                throw ValidationError("grid abscissae must cover [a, b]");
        }
        for (double t : c->kinks())
            if (a_ < t && t < b_) knots_.push_back(t);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());

    // Re q0 > 0: dense sampling, a validation rather than a proof.
    std::vector<double> samples;
    samples.reserve(kPositivitySamples + knots_.size());
    for (int i = 0; i < kPositivitySamples; ++i)
        samples.push_back(a_ + (b_ - a_) * static_cast<double>(i) / (kPositivitySamples - 1));
    samples.insert(samples.end(), knots_.begin(), knots_.end());
    if (const auto* g = std::get_if<GridKind>(&q0_.kind()))
        for (double t : g->abscissae)
            if (a_ <= t && t <= b_) samples.push_back(t);
    for (double t : samples) {
        const cplx v = eval_coefficient(q0_, t);
        if (!(v.real() > 0.0)) throw ValidationError("Re q0 <= 0 at x=" + fmt(t));
    }
}

const Coefficient& CoefficientSet::p(int k) const {
    if (k < 0 || k > n_) throw ValidationError("p index " + std::to_string(k) + " out of range 0.." + std::to_string(n_));
    return p_[static_cast<std::size_t>(k)];
}

const Coefficient& CoefficientSet::q(int k) const {
    if (k < 0 || k > n_) throw ValidationError("q index " + std::to_string(k) + " out of range 0.." + std::to_string(n_));
    return k == 0 ? q0_ : q_[static_cast<std::size_t>(k - 1)];
}

bool CoefficientSet::all_smooth() const {
    if (!q0_.is_expr()) return false;
    return std::all_of(p_.begin(), p_.end(), [](const Coefficient& c) { return c.is_expr(); }) &&
           std::all_of(q_.begin(), q_.end(), [](const Coefficient& c) { return c.is_expr(); });
}

bool CoefficientSet::all_real() const {
    auto real_valued = [&](const Coefficient& c) {
        if (const auto* s = std::get_if<StepsKind>(&c.kind()))
            return std::all_of(s->values.begin(), s->values.end(), [](cplx v) { return v.imag() == 0.0; });
        if (const auto* g = std::get_if<GridKind>(&c.kind()))
            return std::all_of(g->values.begin(), g->values.end(), [](cplx v) { return v.imag() == 0.0; });
        for (int i = 0; i < kPositivitySamples; ++i) {
            const double t = a_ + (b_ - a_) * (i + 0.5) / kPositivitySamples;
            if (eval_coefficient(c, t).imag() != 0.0) return false;
        }
        return true;
    };
    if (!real_valued(q0_)) return false;
    return std::all_of(p_.begin(), p_.end(), real_valued) && std::all_of(q_.begin(), q_.end(), real_valued);
}

bool CoefficientSet::operator==(const CoefficientSet& other) const {
    return n_ == other.n_ && a_ == other.a_ && b_ == other.b_ && q0_ == other.q0_ && p_ == other.p_ && q_ == other.q_;
}

cplx phi(const CoefficientSet& cs, int k, double x, bool tilde, Side side) {
    if (k < 1 || k > cs.n()) throw ValidationError("phi index " + std::to_string(k) + " out of range 1.." + std::to_string(cs.n()));
    const cplx pk = eval_coefficient(cs.p(k), x, 0, side);
    const cplx qk = eval_coefficient(cs.q(k), x, 0, side);
    const cplx i(0.0, 1.0);
    return tilde ? pk - i * qk : pk + i * qk;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

cplx complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_object()) {
        for (const auto& [key, _] : j.items())
            if (key != "re" && key != "im") throw ValidationError(where + ": unknown key '" + key + "' in complex value");
        const double re = j.value("re", 0.0), im = j.value("im", 0.0);
        return {re, im};
    }
    throw ValidationError(where + ": expected a complex value");
}

json complex_to_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

std::vector<double> reals_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw ValidationError(where + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<cplx> complexes_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError(where + ": expected an array of complex values");
    std::vector<cplx> out;
    for (const auto& e : j) out.push_back(complex_from_json(e, where));
    return out;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
    }
}

Coefficient coefficient_from_json(const json& j, const std::string& name) {
    if (j.is_string()) return Coefficient::from_expr(j.get<std::string>());
    if (j.is_number()) return Coefficient::from_expr(fmt(j.get<double>()));
    if (j.is_object() && !j.contains("kind") && (j.contains("re") || j.contains("im"))) {
        const cplx v = complex_from_json(j, name);
        return Coefficient::from_expr("(" + fmt(v.real()) + ") + (" + fmt(v.imag()) + ")*i");
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ValidationError(name + ": expected an expression string or an object with a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "expr") {
        only_keys(j, {"kind", "expr"}, name);
        if (!j.contains("expr") || !j["expr"].is_string()) throw ValidationError(name + ": expr kind needs an 'expr' string");
        return Coefficient::from_expr(j["expr"].get<std::string>());
    }
    if (kind == "steps") {
        only_keys(j, {"kind", "breakpoints", "values"}, name);
        if (!j.contains("breakpoints") || !j.contains("values")) throw ValidationError(name + ": steps need 'breakpoints' and 'values'");
        return Coefficient::steps(reals_from_json(j["breakpoints"], name), complexes_from_json(j["values"], name));
    }
    if (kind == "grid") {
        only_keys(j, {"kind", "abscissae", "values", "interpolation"}, name);
        if (j.contains("interpolation") && j["interpolation"] != "linear")
            throw ValidationError(name + ": only linear interpolation is supported");
        if (!j.contains("abscissae") || !j.contains("values")) throw ValidationError(name + ": grid needs 'abscissae' and 'values'");
        return Coefficient::grid(reals_from_json(j["abscissae"], name), complexes_from_json(j["values"], name));
    }
    throw ValidationError(name + ": unknown coefficient kind '" + kind + "'");
}

json coefficient_to_json(const Coefficient& c) {
    if (const auto* e = std::get_if<ExprKind>(&c.kind())) return json{{"kind", "expr"}, {"expr", e->source}};
    if (const auto* s = std::get_if<StepsKind>(&c.kind())) {
        json vals = json::array();
        for (cplx v : s->values) vals.push_back(complex_to_json(v));
        return json{{"kind", "steps"}, {"breakpoints", s->breakpoints}, {"values", vals}};
    }
    const auto& g = std::get<GridKind>(c.kind());
    json vals = json::array();
    for (cplx v : g.values) vals.push_back(complex_to_json(v));
    return json{{"kind", "grid"}, {"abscissae", g.abscissae}, {"values", vals}, {"interpolation", "linear"}};
}

}  // namespace

CoefficientSet load_coefficient_set(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw ValidationError("problem document must be a JSON object");
    if (!doc.contains("n") || !doc["n"].is_number_integer()) throw ValidationError("'n' must be an integer");
    const int n = doc["n"].get<int>();
    if (n < 1) throw ValidationError("n must be >= 1");
    if (!doc.contains("interval")) throw ValidationError("missing 'interval'");
    const auto iv = reals_from_json(doc["interval"], "interval");
    if (iv.size() != 2) throw ValidationError("'interval' must be [a, b]");

    Coefficient q0;
    bool have_q0 = false;
    std::vector<Coefficient> p(static_cast<std::size_t>(n) + 1), q(static_cast<std::size_t>(n));
    if (doc.contains("coefficients")) {
        const json& coeffs = doc["coefficients"];
        if (!coeffs.is_object()) throw ValidationError("'coefficients' must be an object");
        for (const auto& [name, value] : coeffs.items()) {
            int idx = -1;
            if (name.size() >= 2 && (name[0] == 'p' || name[0] == 'q') &&
                std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
                idx = std::stoi(name.substr(1));
            if (idx < 0 || idx > n) throw ValidationError("coefficients: unknown key '" + name + "' for n=" + std::to_string(n));
            Coefficient c = coefficient_from_json(value, name);
            if (name == "q0") {
                q0 = std::move(c);
                have_q0 = true;
            } else if (name[0] == 'p') {
                p[static_cast<std::size_t>(idx)] = std::move(c);
            } else {
                q[static_cast<std::size_t>(idx - 1)] = std::move(c);
            }
        }
    }
    if (!have_q0) throw ValidationError("coefficients: q0 is required");
    return CoefficientSet(n, iv[0], iv[1], std::move(q0), std::move(p), std::move(q));
}

std::string serialize_coefficient_set(const CoefficientSet& cs) {
    json coeffs = json::object();
    coeffs["q0"] = coefficient_to_json(cs.q0());
    for (int k = 0; k <= cs.n(); ++k) coeffs["p" + std::to_string(k)] = coefficient_to_json(cs.p(k));
    for (int k = 1; k <= cs.n(); ++k) coeffs["q" + std::to_string(k)] = coefficient_to_json(cs.q(k));
    json doc{{"n", cs.n()}, {"interval", {cs.a(), cs.b()}}, {"coefficients", coeffs}};
    return doc.dump(2);
}

}  // namespace quasiode
