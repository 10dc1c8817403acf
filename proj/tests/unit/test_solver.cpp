#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "quasiode/error.hpp"
#include "quasiode/solver.hpp"
#include "support/oracles.hpp"

using namespace quasiode;
using testsupport::cplx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::shared_ptr<const CoefficientSet> only_q0(int n, double a, double b, const char* q0 = "1/2") {
    return std::make_shared<const CoefficientSet>(n, a, b, Coefficient::from_expr(q0),
                                                  std::vector<Coefficient>(static_cast<std::size_t>(n) + 1),
                                                  std::vector<Coefficient>(static_cast<std::size_t>(n)));
}

std::shared_ptr<const CoefficientSet> with_q1(Coefficient q1, double a = 0.0, double b = kTwoPi) {
    return std::make_shared<const CoefficientSet>(1, a, b, Coefficient::from_expr("1/2"),
                                                  std::vector<Coefficient>(2), std::vector<Coefficient>{std::move(q1)});
}

double nearest(const std::vector<Eigenvalue>& eigs, cplx target) {
    double best = INFINITY;
    for (const auto& e : eigs) best = std::min(best, std::abs(e.lambda - target));
    return best;
}

// Random constant-coefficient problem: data for both the library and the exponential oracle.
struct ConstantProblem {
    int n;
    cplx q0;
    std::vector<cplx> p, q;
    std::shared_ptr<const CoefficientSet> cs;
};

std::string complex_literal(cplx v) {
    return "(" + testsupport::num(v.real()) + " + " + testsupport::num(v.imag()) + "*i)";
}

ConstantProblem random_constant(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rnd = [&] { return cplx(testsupport::round6(u(rng)), testsupport::round6(u(rng))); };
    ConstantProblem pr;
    pr.n = n;
    pr.q0 = cplx(testsupport::round6(0.5 + std::abs(u(rng))), testsupport::round6(0.5 * u(rng)));
    std::vector<Coefficient> pc, qc;
    for (int k = 0; k <= n; ++k) {
        pr.p.push_back(rnd());
        pc.push_back(Coefficient::from_expr(complex_literal(pr.p.back())));
    }
    for (int k = 1; k <= n; ++k) {
        pr.q.push_back(rnd());
        qc.push_back(Coefficient::from_expr(complex_literal(pr.q.back())));
    }
    pr.cs = std::make_shared<const CoefficientSet>(n, 0.0, 1.0, Coefficient::from_expr(complex_literal(pr.q0)), pc, qc);
    return pr;
}

}  // namespace

TEST_SUITE("solver") {
    TEST_CASE("spectral weight is (-i)^(2n+1)") {
        CHECK(spectral_weight(1) == cplx(0, 1));
        CHECK(spectral_weight(2) == cplx(0, -1));
        CHECK(spectral_weight(3) == cplx(0, 1));
        const SpectralSystem sys(only_q0(2, 0, 1), cplx(2, 0));
        const Eigen::MatrixXcd M = sys.system_matrix(0.5);
        CHECK(M(4, 0) == cplx(0, -2));
        CHECK(sys.dim() == 5);
    }

    TEST_CASE("tau y = lambda y for an explicit eigenfunction") {
        // -i y''' = lambda y with y = e^{ikx}, lambda = -k^3, through the system: u = (y, y', y'')
        const double k = 1.7;
        const cplx lambda = -k * k * k;
        const SpectralSystem sys(only_q0(1, 0, 1), lambda);
        Eigen::VectorXcd u0(3);
        u0 << 1.0, cplx(0, k), -k * k;
        const Eigen::VectorXcd u1 = integrate_system(sys, 0.0, u0, 1.0, {1e-12, 1e-14});
        const cplx e = std::exp(cplx(0, k));
        CHECK(std::abs(u1(0) - e) < 1e-10);
        CHECK(std::abs(u1(1) - cplx(0, k) * e) < 1e-10);
        CHECK(std::abs(u1(2) + k * k * e) < 1e-10);
    }

    TEST_CASE("Jordan block closed forms") {
        const SpectralSystem sys(only_q0(1, 0, 3), 0.0);
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(3), e3 = Eigen::VectorXcd::Zero(3);
        e1(0) = 1.0;
        e3(2) = 1.0;
        for (double x1 : {0.5, 1.0, 2.5}) {
            CHECK((integrate_system(sys, 0.0, e1, x1) - e1).norm() == 0.0);
            const Eigen::VectorXcd u = integrate_system(sys, 0.25, e3, x1);
            const double t = x1 - 0.25;
            CHECK(std::abs(u(0) - t * t / 2) < 1e-12);
            CHECK(std::abs(u(1) - t) < 1e-12);
            CHECK(std::abs(u(2) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("fundamental matrix of the shift is the Pascal-like exponential") {
        const FundamentalMatrix fm = fundamental_matrix(only_q0(1, 0, 1), 0.0, 0.0, 1.0);
        Eigen::MatrixXcd want(3, 3);
        want << 1, 1, 0.5, 0, 1, 1, 0, 0, 1;
        CHECK((fm.Y - want).norm() < 1e-12);
        CHECK(fm.error_estimate <= 1.0);
        const FundamentalMatrix at_a = fundamental_matrix(only_q0(2, 0, 1), cplx(3, 1), 0.0, 0.0);
        CHECK((at_a.Y - Eigen::MatrixXcd::Identity(5, 5)).norm() == 0.0);
    }

    TEST_CASE("constant coefficients match the matrix exponential") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int t = 0; t < 9; ++t) {
            const int n = 1 + t % 3;
            const ConstantProblem pr = random_constant(rng, n);
            const cplx lambda(u(rng), u(rng));
            const Eigen::MatrixXcd oracle =
                testsupport::expm(testsupport::constant_system(n, pr.q0, pr.p, pr.q, lambda), 1.0);
            const FundamentalMatrix fm = fundamental_matrix(pr.cs, lambda, 0.0, 1.0, {1e-11, 1e-13});
            CAPTURE(n);
            CHECK((fm.Y - oracle).norm() <= 1e-8 * oracle.norm());
        }
    }

    TEST_CASE("backward integration inverts forward integration") {
        std::mt19937 rng(5);
        const auto pr = testsupport::random_problem(rng, 2);
        auto cs = std::make_shared<const CoefficientSet>(pr.build());
        const SpectralSystem sys(cs, cplx(1.5, -0.5));
        Eigen::VectorXcd u0 = Eigen::VectorXcd::LinSpaced(5, 1.0, 2.0);
        const Eigen::VectorXcd u1 = integrate_system(sys, cs->a(), u0, cs->b(), {1e-12, 1e-14});
        const Eigen::VectorXcd back = integrate_system(sys, cs->b(), u1, cs->a(), {1e-12, 1e-14});
        CHECK((back - u0).norm() < 1e-9 * u0.norm());
    }

    TEST_CASE("Liouville: det Y(b) is lambda-independent and equals the closed-form trace exponential") {
        std::mt19937 rng(123);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t < 20; ++t) {
            // q0 = c0 + c1 x > 0 on [0, 1], p0 = g q0' so that int i p0 / (2 q0) = (i g / 2) log(q0(1)/q0(0))
            const double c0 = 1.0 + std::abs(u(rng)), c1 = u(rng);
            const cplx g(u(rng), u(rng));
            auto pr = testsupport::random_problem(rng, 1 + t % 3);
            pr.a = 0.0;
            pr.b = 1.0;
            pr.q0 = testsupport::num(c0) + " + " + testsupport::num(c1) + "*x";
            pr.p[0] = complex_literal(g) + "*" + testsupport::num(c1);
            auto cs = std::make_shared<const CoefficientSet>(pr.build());
            const double c0r = testsupport::round6(c0), c1r = testsupport::round6(c1);
            const cplx gr(testsupport::round6(g.real()), testsupport::round6(g.imag()));
            const cplx expected = std::exp(cplx(0, 0.5) * gr * std::log((c0r + c1r) / c0r));
            CHECK(std::abs(liouville_determinant(*cs, 0.0, 1.0) - expected) <= 1e-12 * std::abs(expected));
            const cplx lambda(3 * u(rng), 3 * u(rng));
            const FundamentalMatrix fm = fundamental_matrix(cs, lambda, 0.0, 1.0);
            CAPTURE(t);
            CHECK(std::abs(fm.Y.determinant() / expected - 1.0) <= 1e-7);
        }
    }

    TEST_CASE("characteristic determinant of the periodic -i y''' problem") {
        const BoundaryProblem bp = BoundaryProblem::periodic(only_q0(1, 0, kTwoPi));
        CHECK(bp.full_rank());
        CHECK(std::abs(characteristic_det(bp, -1.0)) < 1e-6);
        CHECK(std::abs(characteristic_det(bp, -8.0, {1e-12, 1e-14})) < 1e-5);
        CHECK(std::abs(characteristic_det(bp, -0.5)) > 1.0);
        const BoundaryProblem uncoupled =
            BoundaryProblem::from_matrices(bp.cs, Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Zero(3, 3));
        for (cplx l : {cplx(0), cplx(-1), cplx(2, 3)}) CHECK(characteristic_det(uncoupled, l) == cplx(1.0));
        CHECK_THROWS_AS(BoundaryProblem::from_matrices(bp.cs, Eigen::MatrixXcd::Identity(2, 2),
                                                       Eigen::MatrixXcd::Zero(3, 3)),
                        ValidationError);
    }

    TEST_CASE("eigenvalues -k^3 for |k| <= 3 and an empty window") {
        const BoundaryProblem bp = BoundaryProblem::periodic(only_q0(1, 0, kTwoPi));
        const EigenSearchResult r = find_eigenvalues(bp, RealInterval{-30, 30, 600});
        CHECK(r.warnings.empty());
        REQUIRE(r.eigenvalues.size() == 7);
        for (int k = -3; k <= 3; ++k) CHECK(nearest(r.eigenvalues, -double(k * k * k)) <= 1e-6);
        for (std::size_t i = 1; i < r.eigenvalues.size(); ++i)
            CHECK(std::abs(r.eigenvalues[i - 1].lambda) <= std::abs(r.eigenvalues[i].lambda));
        CHECK(find_eigenvalues(bp, RealInterval{10.5, 10.6, 50}).eigenvalues.empty());
    }

    TEST_CASE("antiperiodic eigenvalues are -(k + 1/2)^3") {
        const BoundaryProblem bp = BoundaryProblem::antiperiodic(only_q0(1, 0, kTwoPi));
        const EigenSearchResult r = find_eigenvalues(bp, RealInterval{-16, 16, 400});
        REQUIRE(r.eigenvalues.size() == 6);
        for (double k : {-2.5, -1.5, -0.5, 0.5, 1.5, 2.5}) CHECK(nearest(r.eigenvalues, -k * k * k) <= 1e-6);
    }

    TEST_CASE("dense seeding at one root collapses to one entry") {
        const BoundaryProblem bp = BoundaryProblem::periodic(only_q0(1, 0, kTwoPi));
        const EigenSearchResult r = find_eigenvalues(bp, RealInterval{-1.3, -0.7, 400});
        REQUIRE(r.eigenvalues.size() == 1);
        CHECK(std::abs(r.eigenvalues[0].lambda + 1.0) <= 1e-6);
    }

    TEST_CASE("complex rectangle search and parallel scan") {
        const BoundaryProblem bp = BoundaryProblem::periodic(only_q0(1, 0, kTwoPi));
        EigenOptions o;
        o.jobs = 4;
        const EigenSearchResult r = find_eigenvalues(bp, ComplexRect{cplx(-9, -0.5), cplx(-0.5, 0.5), 40, 8}, o);
        REQUIRE(r.eigenvalues.size() == 2);
        CHECK(std::abs(r.eigenvalues[0].lambda + 1.0) <= 1e-6);
        CHECK(std::abs(r.eigenvalues[1].lambda + 8.0) <= 1e-6);

        const EigenSearchResult seq = find_eigenvalues(bp, RealInterval{-30, 30, 600});
        EigenOptions par;
        par.jobs = 3;
        const EigenSearchResult threaded = find_eigenvalues(bp, RealInterval{-30, 30, 600}, par);
        REQUIRE(seq.eigenvalues.size() == threaded.eigenvalues.size());
        for (std::size_t i = 0; i < seq.eigenvalues.size(); ++i)
            CHECK(seq.eigenvalues[i].lambda == threaded.eigenvalues[i].lambda);
    }

    TEST_CASE("non-real spectrum of a complex problem") {
        auto cs = std::make_shared<const CoefficientSet>(1, 0.0, kTwoPi, Coefficient::from_expr("1/2"),
                                                         std::vector<Coefficient>{Coefficient(), Coefficient::from_expr("0.3i")},
                                                         std::vector<Coefficient>{Coefficient::from_expr("0.2")});
        const BoundaryProblem bp = BoundaryProblem::periodic(cs);
        const EigenSearchResult r = find_eigenvalues(bp, ComplexRect{cplx(-3, -2), cplx(3, 2), 30, 20});
        REQUIRE_FALSE(r.eigenvalues.empty());
        for (const auto& e : r.eigenvalues) {
            const Eigen::MatrixXcd Y = testsupport::expm(
                testsupport::constant_system(1, 0.5, {0.0, cplx(0, 0.3)}, {0.2}, e.lambda), kTwoPi);
            const cplx det = (Eigen::MatrixXcd::Identity(3, 3) - Y).determinant();
            CHECK(std::abs(det) < 1e-6 * (1 + Y.norm()));
        }
    }

    TEST_CASE("search warnings and argument validation") {
        auto cs = only_q0(1, 0, kTwoPi);
        const BoundaryProblem degenerate =
            BoundaryProblem::from_matrices(cs, Eigen::MatrixXcd::Zero(3, 3), Eigen::MatrixXcd::Zero(3, 3));
        CHECK_FALSE(degenerate.full_rank());
        const EigenSearchResult r = find_eigenvalues(degenerate, RealInterval{-1, 1, 5});
        CHECK_FALSE(r.warnings.empty());
        CHECK(r.eigenvalues.empty());

        const BoundaryProblem bp = BoundaryProblem::periodic(cs);
        EigenOptions tight;
        tight.max_iter = 1;
        const EigenSearchResult dropped = find_eigenvalues(bp, RealInterval{-10, 10, 40}, tight);
        CHECK(dropped.eigenvalues.size() < 5);
        CHECK_FALSE(dropped.warnings.empty());

        CHECK_THROWS_AS(find_eigenvalues(bp, RealInterval{-1, 1, 1}), ValidationError);
        CHECK_THROWS_AS(find_eigenvalues(bp, RealInterval{1, -1, 10}), ValidationError);
        EigenOptions bad;
        bad.refine_tol = 0;
        CHECK_THROWS_AS(find_eigenvalues(bp, RealInterval{-1, 1, 10}, bad), ValidationError);
        const SpectralSystem sys(cs, 0.0);
        CHECK_THROWS_AS(integrate_system(sys, 0.0, Eigen::VectorXcd::Ones(3), 1.0, {0.0, 1e-12}), ValidationError);
        CHECK_THROWS_AS(integrate_system(sys, 0.0, Eigen::VectorXcd::Ones(2), 1.0), ValidationError);
        CHECK_THROWS_AS(integrate_system(sys, 0.0, Eigen::VectorXcd::Ones(3), 7.0), ValidationError);
    }

    TEST_CASE("singular data surfaces as a numeric failure") {
        auto cs = std::make_shared<const CoefficientSet>(1, 0.0, 1.0, Coefficient::from_expr("1"),
                                                         std::vector<Coefficient>{Coefficient::from_expr("1/(x-0.5)^2"), Coefficient()},
                                                         std::vector<Coefficient>{Coefficient()});
        const SpectralSystem sys(cs, 0.0);
        CHECK_THROWS_AS(integrate_system(sys, 0.0, Eigen::VectorXcd::Ones(3), 1.0), Error);
    }

    TEST_CASE("convergence order of the fixed-step scheme is at least 4.5") {
        std::mt19937 rng(9);
        const ConstantProblem pr = random_constant(rng, 1);
        const cplx lambda(2.0, 0.5);
        const SpectralSystem sys(pr.cs, lambda);
        const Eigen::MatrixXcd oracle = testsupport::expm(testsupport::constant_system(1, pr.q0, pr.p, pr.q, lambda), 1.0);
        const Eigen::MatrixXcd I3 = Eigen::MatrixXcd::Identity(3, 3);
        std::vector<double> errs;
        for (int steps : {8, 16, 32, 64}) errs.push_back((integrate_fixed_step(sys, 0.0, I3, 1.0, steps) - oracle).norm());
        for (std::size_t i = 1; i < errs.size(); ++i) {
            const double order = std::log2(errs[i - 1] / errs[i]);
            CAPTURE(errs[i - 1]);
            CAPTURE(errs[i]);
            CHECK(order >= 4.5);
        }

        // the adaptive integrator tracks its tolerance as well
        double prev = INFINITY;
        for (double rtol : {1e-6, 1e-8, 1e-10}) {
            const FundamentalMatrix fm = fundamental_matrix(pr.cs, lambda, 0.0, 1.0, {rtol, rtol * 1e-3});
            const double err = (fm.Y - oracle).norm() / oracle.norm();
            CHECK(err < prev);
            CHECK(err < 100 * rtol);
            prev = err;
        }
    }

    TEST_CASE("u is continuous across a step in q1 while y'' jumps") {
        const double a = 0.0, c = 0.6, b = 1.5;
        auto cs = with_q1(Coefficient::steps({c}, {0.0, 1.0}), a, b);
        const SpectralSystem sys(cs, 0.0);
        const IntegratorOptions o{1e-12, 1e-14};
        Eigen::VectorXcd u0(3);
        u0 << 1.0, 0.5, -0.25;

        const Eigen::VectorXcd ub = integrate_system(sys, a, u0, b, o);
        const Eigen::VectorXcd left = integrate_system(sys, a, u0, c, o);
        const Eigen::VectorXcd right = integrate_system(sys, b, ub, c, o);
        CHECK((left - right).norm() <= 1e-9);

        // piecewise-constant oracle: exponentials of the two constant systems
        const Eigen::MatrixXcd M0 = testsupport::constant_system(1, 0.5, {0.0, 0.0}, {0.0}, 0.0);
        const Eigen::MatrixXcd M1 = testsupport::constant_system(1, 0.5, {0.0, 0.0}, {1.0}, 0.0);
        const Eigen::VectorXcd uc = testsupport::expm(M0, c - a) * u0;
        const Eigen::VectorXcd oracle = testsupport::expm(M1, b - c) * uc;
        CHECK((left - uc).norm() <= 1e-10);
        CHECK((ub - oracle).norm() <= 1e-10);

        // y'' = u3 - q1 u1 with unit weights, so it jumps by -(q1+ - q1-) y(c)
        const cplx ypp_left = left(2) - 0.0 * left(0);
        const cplx ypp_right = right(2) - 1.0 * right(0);
        CHECK(std::abs((ypp_right - ypp_left) + left(0)) <= 1e-9);
        CHECK(std::abs(left(0)) > 0.1);
    }

    TEST_CASE("mollified step coefficients converge to the step spectrum") {
        const double c = std::numbers::pi;
        EigenOptions o;
        o.integrator = {1e-11, 1e-13};
        const RealInterval window{-12, 12, 480};
        const EigenSearchResult step =
            find_eigenvalues(BoundaryProblem::periodic(with_q1(Coefficient::steps({c}, {0.0, 1.0}))), window, o);
        REQUIRE(step.eigenvalues.size() >= 3);
        std::vector<double> gaps;
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const Coefficient ramp = Coefficient::grid({0.0, c - eps / 2, c + eps / 2, kTwoPi}, {0.0, 0.0, 1.0, 1.0});
            const EigenSearchResult r = find_eigenvalues(BoundaryProblem::periodic(with_q1(ramp)), window, o);
            REQUIRE(r.eigenvalues.size() == step.eigenvalues.size());
            double gap = 0;
            for (const auto& e : step.eigenvalues) gap = std::max(gap, nearest(r.eigenvalues, e.lambda));
            gaps.push_back(gap);
        }
        CHECK(gaps[1] < gaps[0]);
        CHECK(gaps[2] < gaps[1]);
        CHECK(gaps[2] <= 1e-3);
    }

    TEST_CASE("reality of the spectrum for the real periodic -i y''' problem") {
        const EigenSearchResult r =
            find_eigenvalues(BoundaryProblem::periodic(only_q0(1, 0, kTwoPi)), RealInterval{-30, 30, 600});
        REQUIRE(r.eigenvalues.size() == 7);
        for (const auto& e : r.eigenvalues) CHECK(std::abs(e.lambda.imag()) <= 1e-8);
    }
}
