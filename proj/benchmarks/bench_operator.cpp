#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bezsimplex/expmodel.hpp"
#include "bezsimplex/harness.hpp"
#include "bezsimplex/lattice.hpp"
#include "bezsimplex/operator.hpp"

using namespace bezsimplex;

namespace {

ControlNet exp_net(std::size_t dimension, int n) {
    const auto s = Simplex::standard(dimension);
    return sample_control_net(s, n, [](const Point& x) {
        double sum = 0.0;
        for (double v : x.coords()) {
            sum += v;
        }
        return std::exp(sum);
    });
}

std::vector<Point> probes(const Simplex& s) { return random_interior_points(s, 64, 1); }

void BM_DeCasteljau(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto net = exp_net(d, static_cast<int>(state.range(1)));
    const auto pts = probes(net.simplex());
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_de_casteljau(net, pts[i++ % pts.size()]));
    }
}

void BM_Direct(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto net = exp_net(d, static_cast<int>(state.range(1)));
    const auto pts = probes(net.simplex());
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_direct(net, pts[i++ % pts.size()]));
    }
}

void BM_ClosedForm(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto s = Simplex::standard(d);
    const std::vector<double> a(d, 1.0);
    const auto pts = probes(s);
    const int n = static_cast<int>(state.range(1));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bezier_exp_closed_form(s, n, a, pts[i++ % pts.size()]));
    }
}

void BM_Enumerate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const int n = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_multi_indices(n, d));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lattice_size(n, d)));
}

void orders(benchmark::internal::Benchmark* b) {
    for (int d : {1, 2, 3}) {
        for (int n : {5, 10, 20, 40}) {
            b->Args({d, n});
        }
    }
}

}  // namespace

BENCHMARK(BM_DeCasteljau)->Apply(orders);
BENCHMARK(BM_Direct)->Apply(orders);
BENCHMARK(BM_ClosedForm)->Apply(orders);
BENCHMARK(BM_Enumerate)->Apply(orders);

BENCHMARK_MAIN();
