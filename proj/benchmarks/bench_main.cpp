#include <benchmark/benchmark.h>

#include <random>

#include "stokesrbf/dense.hpp"
#include "stokesrbf/geometry.hpp"
#include "stokesrbf/kernels.hpp"

using namespace stokesrbf;

namespace {

Functional lbar(Point2 z, int comp) { return modified_interior(z, comp, 1.0, 0.01); }

void bm_pair_double(benchmark::State& state) {
    const DivFreeKernel k = DivFreeKernel::make({RbfFamily::InverseMultiquadric, 0.1, 16});
    const Functional f = lbar({0.3, -0.2}, 0), g = lbar({-0.1, 0.5}, 1);
    for (auto _ : state) {
        double v = apply_functional_pair<double>(f, g, k);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_pair_double);

void bm_pair_bigfloat_50(benchmark::State& state) {
    ScopedDigits guard(50);
    const DivFreeKernel k = DivFreeKernel::make({RbfFamily::InverseMultiquadric, 0.1, 50});
    const Functional f = lbar({0.3, -0.2}, 0), g = lbar({-0.1, 0.5}, 1);
    for (auto _ : state) {
        BigFloat v = apply_functional_pair<BigFloat>(f, g, k);
        benchmark::DoNotOptimize(v.raw());
    }
}
BENCHMARK(bm_pair_bigfloat_50);

template <class T>
void bm_lu(benchmark::State& state) {
    ScopedDigits guard(50);
    const std::size_t n = state.range(0);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix<T> a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = T(u(rng));
        a(i, i) = T(4.0 + u(rng));
    }
    for (auto _ : state) {
        LuFactors<T> lu(a, 50);
        benchmark::DoNotOptimize(lu.growth_factor());
    }
}
BENCHMARK_TEMPLATE(bm_lu, double)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(bm_lu, BigFloat)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_disk_stencils(benchmark::State& state) {
    const NodeSet nodes = generate_disk_nodes(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto st = build_stencils(nodes, 30);
        benchmark::DoNotOptimize(st.size());
    }
}
BENCHMARK(bm_disk_stencils)->Arg(362)->Arg(1312)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
