#include <benchmark/benchmark.h>

#include <numbers>

#include "quasiode/quasi.hpp"
#include "quasiode/solver.hpp"
#include "quasiode/symbolic.hpp"

using namespace quasiode;

namespace {

std::shared_ptr<const CoefficientSet> smooth_set(int n) {
    std::vector<Coefficient> p, q;
    for (int k = 0; k <= n; ++k) p.push_back(Coefficient::from_expr("sin(x) + " + std::to_string(k) + "*x"));
    for (int k = 1; k <= n; ++k) q.push_back(Coefficient::from_expr("cos(" + std::to_string(k) + "*x)"));
    return std::make_shared<const CoefficientSet>(n, 0.0, 1.0, Coefficient::from_expr("1 + x^2/4"), p, q);
}

void BM_QuasiTau(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(symbolic::quasi_tau(n));
}
BENCHMARK(BM_QuasiTau)->DenseRange(1, 5)->Unit(benchmark::kMillisecond);

void BM_ApplyTau(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cs = smooth_set(n);
    const SmoothFunction y = SmoothFunction::parse("sin(2*x) + exp(x/2)", 2 * n + 1);
    std::vector<double> grid(101);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(i) / 100.0;
    const auto method = state.range(1) == 0 ? TauMethod::Expanded : TauMethod::Chain;
    for (auto _ : state) benchmark::DoNotOptimize(apply_tau(*cs, y, grid, method));
}
BENCHMARK(BM_ApplyTau)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SpectralSystem sys(smooth_set(n), cplx(1.5, 0.5));
    const Eigen::MatrixXcd U0 = Eigen::MatrixXcd::Identity(2 * n + 1, 2 * n + 1);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_columns(sys, 0.0, U0, 1.0));
}
BENCHMARK(BM_Integrate)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_CharacteristicDet(benchmark::State& state) {
    auto cs = std::make_shared<const CoefficientSet>(1, 0.0, 2.0 * std::numbers::pi, Coefficient::from_expr("1/2"),
                                                     std::vector<Coefficient>(2), std::vector<Coefficient>(1));
    const BoundaryProblem bp = BoundaryProblem::periodic(cs);
    for (auto _ : state) benchmark::DoNotOptimize(characteristic_det(bp, cplx(-7.5, 0.1)));
}
BENCHMARK(BM_CharacteristicDet)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
