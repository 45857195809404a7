#include <benchmark/benchmark.h>

#include <memory>

#include "eigensymm/elliptic.hpp"
#include "eigensymm/radial.hpp"
#include "eigensymm/rearrange.hpp"

using namespace eigensymm;

namespace {

GridPtr disk_grid(int n) { return std::make_shared<Grid2D>(DomainSpec::disk(1.0), n); }

void BM_assemble(benchmark::State& state) {
    auto grid = disk_grid(static_cast<int>(state.range(0)));
    auto A = MatrixField2D::identity(grid);
    VectorField2D v(grid);
    ScalarField2D V(grid);
    for (auto _ : state) {
        Operator2D op = assemble(grid, A, v, V);
        benchmark::DoNotOptimize(op.unknowns());
    }
}
BENCHMARK(BM_assemble)->Arg(64)->Arg(128)->Arg(256);

void BM_principal_eigenpair(benchmark::State& state) {
    auto grid = disk_grid(static_cast<int>(state.range(0)));
    auto A = MatrixField2D::identity(grid);
    VectorField2D v(grid);
    ScalarField2D V(grid);
    Operator2D op = assemble(grid, A, v, V);
    for (auto _ : state) {
        auto res = principal_eigenpair(op);
        benchmark::DoNotOptimize(res.lambda1);
    }
}
BENCHMARK(BM_principal_eigenpair)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_radial_eigenpair(benchmark::State& state) {
    RadialOptions opts;
    opts.m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto res = radial_eigenpair(2, 1.0, RadialProfile::constant(1.0, 1.0),
                                    RadialProfile::constant(1.0, 1.0),
                                    RadialProfile::constant(1.0, 0.0), opts);
        benchmark::DoNotOptimize(res.lambda1);
    }
}
BENCHMARK(BM_radial_eigenpair)->Arg(1000)->Arg(2000)->Arg(4000);

void BM_level_table(benchmark::State& state) {
    auto grid = disk_grid(static_cast<int>(state.range(0)));
    auto psi = ScalarField2D::from_function(
        grid, [](double x, double y) { return (1.0 - x * x - y * y) / 4.0; });
    ScalarField2D one(grid), zero(grid);
    const Grid2D& g = *grid;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.masked(i, j)) one(i, j) = 1.0;
    auto A = MatrixField2D::identity(grid);
    for (auto _ : state) {
        auto t = build_level_table(psi, one, zero, zero, A, 200);
        benchmark::DoNotOptimize(t.Rstar);
    }
}
BENCHMARK(BM_level_table)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
