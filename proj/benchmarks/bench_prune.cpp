#include "adaprune/adaprune.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace adaprune;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(rows * cols);
    for (double& x : v) x = g(rng);
    return Matrix(rows, cols, std::move(v));
}

void BM_BuildHessian(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Matrix x = gaussian(d, 4 * d, 1);
    for (auto _ : state) benchmark::DoNotOptimize(build_hessian(x, kDefaultLambda));
}
BENCHMARK(BM_BuildHessian)->Arg(32)->Arg(128)->Arg(256);

void BM_InverseDowndate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const HessianState base = init_state(build_hessian(gaussian(d, 4 * d, 2), kDefaultLambda));
    for (auto _ : state) {
        HessianState s = base;
        s.remove(d / 2);
        benchmark::DoNotOptimize(s.inverse().data().data());
    }
}
BENCHMARK(BM_InverseDowndate)->Arg(32)->Arg(128)->Arg(256);

void BM_PruneLayer(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Matrix w = gaussian(16, d, 3);
    const Matrix x = gaussian(d, 2 * d, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(prune_layer(w, x, SparsityTarget::unstructured(0.5), kDefaultLambda));
}
BENCHMARK(BM_PruneLayer)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PruneLayerStructured(benchmark::State& state) {
    const Matrix w = gaussian(16, 128, 5);
    const Matrix x = gaussian(128, 256, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(prune_layer(w, x, SparsityTarget::structured(32, 64), kDefaultLambda));
}
BENCHMARK(BM_PruneLayerStructured)->Unit(benchmark::kMillisecond);

void BM_PruneModel(benchmark::State& state) {
    const bool adaptive = state.range(0) != 0;
    Checkpoint c;
    for (std::size_t l = 0; l < 3; ++l) {
        Layer layer;
        layer.weight = gaussian(l == 2 ? 8 : 32, 32, 10 + l);
        layer.bias = std::vector<double>(layer.weight.rows(), 0.0);
        layer.activation = l == 2 ? Activation::identity : Activation::relu;
        c.layers.push_back(layer);
    }
    const Matrix calib = gaussian(32, 128, 7);
    const std::vector<SparsityTarget> targets(3, SparsityTarget::unstructured(0.5));
    PipelineOptions opts;
    opts.adaptive = adaptive;
    for (auto _ : state) benchmark::DoNotOptimize(prune_model(c, calib, targets, opts));
}
BENCHMARK(BM_PruneModel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
