#include "quasiode/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <thread>

#include "quasiode/error.hpp"

namespace quasiode {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b - b_hat
constexpr std::array<double, 7> kE{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525,
                                   -1.0 / 40};

// Right-hand side restricted to one knot segment [lo, hi]: abscissae are clamped
// into the segment and a breakpoint is approached from inside.
class SegmentRhs {
public:
    SegmentRhs(const SpectralSystem& sys, double lo, double hi) : sys_(sys), lo_(lo), hi_(hi) {}

    Eigen::MatrixXcd matrix(double x) const {
        x = std::clamp(x, lo_, hi_);
        const Side side = x == lo_ ? Side::Right : Side::Left;
        Eigen::MatrixXcd m = sys_.system_matrix(x, side);
        if (!m.allFinite()) throw NumericError("non-finite system matrix entry at x=" + fmt(x));
        return m;
    }

    Eigen::MatrixXcd operator()(double x, const Eigen::MatrixXcd& u) const { return matrix(x) * u; }

private:
    const SpectralSystem& sys_;
    double lo_, hi_;
};

std::vector<double> segment_points(const CoefficientSet& cs, double x0, double x1) {
    const double lo = std::min(x0, x1), hi = std::max(x0, x1);
    std::vector<double> pts{x0};
    std::vector<double> inner;
    for (double k : cs.knots())
        if (lo < k && k < hi) inner.push_back(k);
    if (x1 < x0) std::reverse(inner.begin(), inner.end());
    pts.insert(pts.end(), inner.begin(), inner.end());
    pts.push_back(x1);
    return pts;
}

void check_span(const CoefficientSet& cs, double x0, double x1) {
    if (!(x0 >= cs.a() && x0 <= cs.b() && x1 >= cs.a() && x1 <= cs.b()))
        throw ValidationError("integration range [" + fmt(std::min(x0, x1)) + ", " + fmt(std::max(x0, x1)) +
                              "] not inside [a, b]");
}

double error_norm(const Eigen::MatrixXcd& err, const Eigen::MatrixXcd& u0, const Eigen::MatrixXcd& u1, double rtol,
                  double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(u0(i)), std::abs(u1(i)));
        const double r = std::abs(err(i)) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

struct Stage {
    Eigen::MatrixXcd u_new;
    Eigen::MatrixXcd err;
    Eigen::MatrixXcd k_last;
};

Stage dopri_step(const SegmentRhs& f, double x, const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& k1, double h) {
    std::array<Eigen::MatrixXcd, 7> k;
    k[0] = k1;
    for (int s = 1; s < 7; ++s) {
        Eigen::MatrixXcd acc = u;
        for (int j = 0; j < s; ++j)
            if (kA[s][j] != 0.0) acc += (h * kA[s][j]) * k[j];
        k[s] = f(x + kC[s] * h, acc);
        if (s == 6) {
            Stage out;
            out.u_new = std::move(acc);
            out.err = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
            for (int j = 0; j < 7; ++j)
                if (kE[j] != 0.0) out.err += (h * kE[j]) * k[j];
            out.k_last = k[6];
            return out;
        }
    }
    throw AssertionError("unreachable");
}

double initial_step(const SegmentRhs& f, double x0, const Eigen::MatrixXcd& u0, const Eigen::MatrixXcd& k0,
                    double span, const IntegratorOptions& o) {
    // Hairer, Norsett & Wanner, algorithm II.4 "starting step size".
    const double dir = span >= 0 ? 1.0 : -1.0;
    auto norm = [&](const Eigen::MatrixXcd& v) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double r = std::abs(v(i)) / (o.atol + o.rtol * std::abs(u0(i)));
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double d0 = norm(u0), d1 = norm(k0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, std::abs(span));
    const Eigen::MatrixXcd u1 = u0 + (dir * h0) * k0;
    const double d2 = norm(f(x0 + dir * h0, u1) - k0) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, std::abs(span)});
}

Eigen::MatrixXcd integrate_segment(const SegmentRhs& f, double x0, Eigen::MatrixXcd u, double x1,
                                   const IntegratorOptions& o, double& h_carry, IntegrationStats& st) {
    const double span = x1 - x0;
    if (span == 0.0) return u;
    const double dir = span > 0 ? 1.0 : -1.0;
    Eigen::MatrixXcd k1 = f(x0, u);
    double h = o.initial_step > 0 ? o.initial_step : (h_carry > 0 ? h_carry : initial_step(f, x0, u, k1, span, o));
    if (o.max_step > 0) h = std::min(h, o.max_step);

    constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0, kBeta = 0.04;
    const double alpha = 0.2 - 0.75 * kBeta;
    double err_old = 1e-4;
    double x = x0;
    bool last_rejected = false;

    while ((x1 - x) * dir > 0) {
        if (st.accepted + st.rejected >= o.max_steps) throw NumericError("step budget exhausted at x=" + fmt(x));
        const double remaining = std::abs(x1 - x);
        const double h_free = h;
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            throw NumericError("step size underflow at x=" + fmt(x));

        Stage s = dopri_step(f, x, u, k1, dir * h);
        const double err = error_norm(s.err, u, s.u_new, o.rtol, o.atol);
        if (!std::isfinite(err)) throw NumericError("non-finite error estimate at x=" + fmt(x));

        if (err <= 1.0) {
            st.max_error_estimate = std::max(st.max_error_estimate, err);
            ++st.accepted;
            x = final_step ? x1 : x + dir * h;
            u = std::move(s.u_new);
            k1 = std::move(s.k_last);
            double fac = err == 0.0 ? kFacMax : kSafety * std::pow(err, -alpha) * std::pow(err_old, kBeta);
            fac = std::clamp(fac, kFacMin, kFacMax);
            if (last_rejected) fac = std::min(fac, 1.0);
            err_old = std::max(err, 1e-4);
            if (!final_step) h *= fac;
            else h_carry = std::max(h * fac, h_free);
            if (o.max_step > 0) h = std::min(h, o.max_step);
            last_rejected = false;
        } else {
            ++st.rejected;
            h *= std::max(kFacMin, kSafety * std::pow(err, -alpha));
            last_rejected = true;
        }
    }
    if (h_carry <= 0) h_carry = h;
    return u;
}

}  // namespace

cplx spectral_weight(int n) { return cplx(0.0, n % 2 == 0 ? -1.0 : 1.0); }

SpectralSystem::SpectralSystem(std::shared_ptr<const CoefficientSet> cs, cplx lambda)
    : matrix_(std::move(cs)), lambda_(lambda) {}

Eigen::MatrixXcd SpectralSystem::system_matrix(double x, Side side) const {
    Eigen::MatrixXcd m = eval_matrix(matrix_, x, side);
    m(dim() - 1, 0) += lambda_ * spectral_weight(n());
    return m;
}

Eigen::MatrixXcd integrate_columns(const SpectralSystem& sys, double x0, const Eigen::MatrixXcd& U0, double x1,
                                   const IntegratorOptions& opts, IntegrationStats* stats) {
    if (!(opts.rtol > 0 && opts.atol > 0)) throw ValidationError("rtol and atol must be positive");
    if (U0.rows() != sys.dim()) throw ValidationError("initial state has wrong dimension");
    check_span(sys.coefficients(), x0, x1);
    IntegrationStats st;
    const auto pts = segment_points(sys.coefficients(), x0, x1);
    Eigen::MatrixXcd u = U0;
    double h_carry = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const SegmentRhs f(sys, std::min(pts[i], pts[i + 1]), std::max(pts[i], pts[i + 1]));
        u = integrate_segment(f, pts[i], std::move(u), pts[i + 1], opts, h_carry, st);
        ++st.segments;
    }
    if (stats) *stats = st;
    return u;
}

Eigen::VectorXcd integrate_system(const SpectralSystem& sys, double x0, const Eigen::VectorXcd& u0, double x1,
                                  const IntegratorOptions& opts, IntegrationStats* stats) {
    return integrate_columns(sys, x0, u0, x1, opts, stats).col(0);
}

Eigen::MatrixXcd integrate_fixed_step(const SpectralSystem& sys, double x0, const Eigen::MatrixXcd& U0, double x1,
                                      int steps) {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    check_span(sys.coefficients(), x0, x1);
    const auto pts = segment_points(sys.coefficients(), x0, x1);
    Eigen::MatrixXcd u = U0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const SegmentRhs f(sys, std::min(pts[i], pts[i + 1]), std::max(pts[i], pts[i + 1]));
        const double h = (pts[i + 1] - pts[i]) / steps;
        for (int s = 0; s < steps; ++s) {
            const double x = pts[i] + s * h;
            u = dopri_step(f, x, u, f(x, u), h).u_new;
        }
    }
    return u;
}

FundamentalMatrix fundamental_matrix(std::shared_ptr<const CoefficientSet> cs, cplx lambda, double a, double b,
                                     const IntegratorOptions& opts) {
    const SpectralSystem sys(std::move(cs), lambda);
    FundamentalMatrix fm;
    fm.a = a;
    fm.b = b;
    fm.lambda = lambda;
    fm.Y = integrate_columns(sys, a, Eigen::MatrixXcd::Identity(sys.dim(), sys.dim()), b, opts, &fm.stats);
    fm.error_estimate = fm.stats.max_error_estimate;
    return fm;
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
cplx gk15(const F& f, double lo, double hi, double& err) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    cplx kron = kWgk[7] * f(c), gauss = kWg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const cplx s = f(c - r * kXgk[i]) + f(c + r * kXgk[i]);
        kron += kWgk[i] * s;
        if (i % 2 == 1) gauss += kWg[i / 2] * s;
    }
    err = std::abs((kron - gauss) * r);
    return kron * r;
}

template <class F>
cplx adaptive(const F& f, double lo, double hi, double tol, int depth) {
    double err = 0.0;
    const cplx whole = gk15(f, lo, hi, err);
    if (err <= tol || depth >= 40) return whole;
    const double mid = 0.5 * (lo + hi);
    return adaptive(f, lo, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace

cplx trace_integral(const CoefficientSet& cs, double a, double b, double tol) {
    check_span(cs, a, b);
    const auto pts = segment_points(cs, a, b);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = std::min(pts[i], pts[i + 1]), hi = std::max(pts[i], pts[i + 1]);
        // Gauss-Kronrod nodes are interior, so no breakpoint is ever hit exactly.
        auto f = [&](double x) {
            return cplx(0.0, 1.0) * eval_coefficient(cs.p(0), x) / (2.0 * eval_coefficient(cs.q0(), x));
        };
        const cplx part = adaptive(f, lo, hi, tol, 0);
        total += pts[i + 1] >= pts[i] ? part : -part;
    }
    return total;
}

cplx liouville_determinant(const CoefficientSet& cs, double a, double b) { return std::exp(trace_integral(cs, a, b)); }

// ---------------------------------------------------------------------------

BoundaryProblem BoundaryProblem::periodic(std::shared_ptr<const CoefficientSet> cs) {
    const int d = 2 * cs->n() + 1;
    BoundaryProblem bp{std::move(cs), Eigen::MatrixXcd::Identity(d, d), -Eigen::MatrixXcd::Identity(d, d), "periodic"};
    return bp;
}

BoundaryProblem BoundaryProblem::antiperiodic(std::shared_ptr<const CoefficientSet> cs) {
    const int d = 2 * cs->n() + 1;
    BoundaryProblem bp{std::move(cs), Eigen::MatrixXcd::Identity(d, d), Eigen::MatrixXcd::Identity(d, d),
                       "antiperiodic"};
    return bp;
}

BoundaryProblem BoundaryProblem::from_matrices(std::shared_ptr<const CoefficientSet> cs, Eigen::MatrixXcd A,
                                               Eigen::MatrixXcd B) {
    const int d = 2 * cs->n() + 1;
    if (A.rows() != d || A.cols() != d || B.rows() != d || B.cols() != d)
        throw ValidationError("boundary matrices must be " + std::to_string(d) + "x" + std::to_string(d));
    return BoundaryProblem{std::move(cs), std::move(A), std::move(B), ""};
}

bool BoundaryProblem::full_rank() const {
    Eigen::MatrixXcd ab(A.rows(), A.cols() + B.cols());
    ab << A, B;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(ab);
    return lu.rank() == A.rows();
}

namespace {

// det(A + B Y(b)) = det(A P(a) + B P(b)) det Y(c), with P the propagators from the midpoint c
// and det Y(c) known from the trace. Each propagator only grows over half the interval.
cplx midpoint_det(const BoundaryProblem& bp, cplx lambda, const IntegratorOptions& opts, cplx left_trace) {
    if (bp.B.isZero(0.0)) return bp.A.partialPivLu().determinant();
    const SpectralSystem sys(bp.cs, lambda);
    const double a = bp.cs->a(), b = bp.cs->b(), c = 0.5 * (a + b);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(sys.dim(), sys.dim());
    const Eigen::MatrixXcd m = bp.A * integrate_columns(sys, c, id, a, opts) + bp.B * integrate_columns(sys, c, id, b, opts);
    return m.partialPivLu().determinant() * std::exp(left_trace);
}

}  // namespace

cplx characteristic_det(const BoundaryProblem& bp, cplx lambda, const IntegratorOptions& opts) {
    return midpoint_det(bp, lambda, opts, trace_integral(*bp.cs, bp.cs->a(), 0.5 * (bp.cs->a() + bp.cs->b())));
}

namespace {

struct SecantOutcome {
    bool converged = false;
    cplx lambda;
    double residual = 0.0;
    double uncertainty = 0.0;
    int iterations = 0;
};

SecantOutcome secant(const BoundaryProblem& bp, cplx left_trace, cplx x0, cplx x1, const EigenOptions& o,
                     int& evaluations) {
    auto f = [&](cplx l) {
        ++evaluations;
        return midpoint_det(bp, l, o.integrator, left_trace);
    };
    cplx f0 = f(x0), f1 = f(x1);
    SecantOutcome best;
    best.lambda = std::abs(f0) < std::abs(f1) ? x0 : x1;
    best.residual = std::min(std::abs(f0), std::abs(f1));
    best.uncertainty = std::abs(x1 - x0);

    for (int it = 1; it <= o.max_iter; ++it) {
        const double scale = std::max(1.0, std::abs(x1));
        if (f1 == 0.0) return {true, x1, 0.0, 0.0, it};
        if (f1 == f0) break;
        const cplx x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!std::isfinite(x2.real()) || !std::isfinite(x2.imag())) break;
        const double step = std::abs(x2 - x1);
        const cplx f2 = f(x2);
        if (std::abs(f2) <= best.residual) best = {false, x2, std::abs(f2), step, it};
        if (step <= o.refine_tol * scale) return {true, x2, std::abs(f2), step, it};
        // stagnation at the integrator's noise floor: residual no longer decreasing
        if (step <= std::sqrt(o.refine_tol) * scale && std::abs(f2) >= std::abs(f1)) {
            best.converged = true;
            best.iterations = it;
            best.uncertainty = std::max(best.uncertainty, step);
            return best;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    best.converged = false;
    return best;
}

template <class Fn>
void parallel_for(int count, int jobs, const Fn& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    {
        std::vector<std::jthread> threads;
        for (int t = 0; t < jobs; ++t)
            threads.emplace_back([&, t] {
                try {
                    for (int i = t; i < count; i += jobs) fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

EigenSearchResult find_eigenvalues(const BoundaryProblem& bp, const SearchRegion& region, const EigenOptions& o) {
    if (!(o.refine_tol > 0)) throw ValidationError("refine_tol must be positive");
    if (o.max_iter < 1) throw ValidationError("max_iter must be >= 1");
    EigenSearchResult result;
    if (!bp.full_rank()) result.warnings.push_back("boundary conditions are degenerate: rank [A | B] < 2n+1");

    // scan
    std::vector<cplx> pts;
    std::vector<std::vector<int>> neighbours;
    double spacing = 0.0;
    std::function<bool(cplx)> inside;
    if (const auto* r = std::get_if<RealInterval>(&region)) {
        if (r->samples < 2) throw ValidationError("real_interval needs samples >= 2");
        if (!(r->lo < r->hi)) throw ValidationError("real_interval needs lo < hi");
        spacing = (r->hi - r->lo) / (r->samples - 1);
        for (int i = 0; i < r->samples; ++i) {
            pts.emplace_back(r->lo + spacing * i, 0.0);
            std::vector<int> nb;
            if (i > 0) nb.push_back(i - 1);
            if (i + 1 < r->samples) nb.push_back(i + 1);
            neighbours.push_back(nb);
        }
        const double lo = r->lo, hi = r->hi;
        inside = [lo, hi](cplx l) { return l.real() >= lo && l.real() <= hi; };
    } else {
        const auto& c = std::get<ComplexRect>(region);
        if (c.re_samples < 2 || c.im_samples < 2) throw ValidationError("complex_rect needs at least 2x2 samples");
        const double x0 = c.lower_left.real(), x1 = c.upper_right.real();
        const double y0 = c.lower_left.imag(), y1 = c.upper_right.imag();
        if (!(x0 < x1 && y0 < y1)) throw ValidationError("complex_rect corners must be lower-left, upper-right");
        const double dx = (x1 - x0) / (c.re_samples - 1), dy = (y1 - y0) / (c.im_samples - 1);
        spacing = std::min(dx, dy);
        for (int j = 0; j < c.im_samples; ++j)
            for (int i = 0; i < c.re_samples; ++i) {
                pts.emplace_back(x0 + dx * i, y0 + dy * j);
                std::vector<int> nb;
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        if (!di && !dj) continue;
                        const int ii = i + di, jj = j + dj;
                        if (ii >= 0 && ii < c.re_samples && jj >= 0 && jj < c.im_samples)
                            nb.push_back(jj * c.re_samples + ii);
                    }
                neighbours.push_back(nb);
            }
        inside = [=](cplx l) { return l.real() >= x0 && l.real() <= x1 && l.imag() >= y0 && l.imag() <= y1; };
    }

    // det vanishes identically for degenerate conditions, so there are no isolated eigenvalues to report
    if (!bp.full_rank()) return result;

    const cplx left_trace = trace_integral(*bp.cs, bp.cs->a(), 0.5 * (bp.cs->a() + bp.cs->b()));
    std::vector<double> mag(pts.size());
    parallel_for(static_cast<int>(pts.size()), o.jobs,
                 [&](int i) { mag[i] = std::abs(midpoint_det(bp, pts[i], o.integrator, left_trace)); });
    result.evaluations = static_cast<int>(pts.size());

    std::vector<int> seeds;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        bool minimum = true;
        for (int j : neighbours[i]) minimum = minimum && mag[i] <= mag[j];
        if (minimum) seeds.push_back(i);
    }

    std::vector<SecantOutcome> outcomes(seeds.size());
    std::vector<int> evals(seeds.size(), 0);
    parallel_for(static_cast<int>(seeds.size()), o.jobs, [&](int s) {
        const cplx x0 = pts[seeds[s]];
        outcomes[s] = secant(bp, left_trace, x0, x0 + 0.25 * spacing, o, evals[s]);
    });
    for (int e : evals) result.evaluations += e;

    std::vector<SecantOutcome> roots;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& r = outcomes[s];
        const cplx seed = pts[seeds[s]];
        if (!r.converged) {
            result.warnings.push_back("secant from seed " + fmt(seed.real()) + (seed.imag() ? "+" + fmt(seed.imag()) + "i" : "") +
                                      " did not converge within max_iter; candidate dropped");
            continue;
        }
        if (!inside(r.lambda)) continue;
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.residual < b.residual; });
    std::vector<SecantOutcome> unique;
    for (const auto& r : roots) {
        bool dup = false;
        for (const auto& u : unique) {
            const double tol = 10.0 * o.refine_tol * std::max(1.0, std::abs(u.lambda)) + 10.0 * (u.uncertainty + r.uncertainty);
            dup = dup || std::abs(u.lambda - r.lambda) <= tol;
        }
        if (!dup) unique.push_back(r);
    }
    std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
        if (ma != mb) return ma < mb;
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    for (const auto& u : unique) result.eigenvalues.push_back({u.lambda, u.residual, u.iterations});
    return result;
}

}  // namespace quasiode
