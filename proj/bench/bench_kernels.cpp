// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "reserveflow/io.hpp"
#include "reserveflow/kernels.hpp"
#include "reserveflow/ptdf.hpp"

using namespace reserveflow;

namespace {

// Block-structured rows shaped like the clearing LP: each scenario block couples a
// shared column set with its own columns.
struct Shape {
    kernels::RowMatrix Gr;
    kernels::ColMatrix Gc;
    std::vector<double> w, d;
};

Shape make_shape(int shared, int blocks, int per_block, int rows_per_block) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = shared + blocks * per_block;
    std::vector<Eigen::Triplet<double>> t;
    int row = 0;
    for (int b = 0; b < blocks; ++b)
        for (int r = 0; r < rows_per_block; ++r, ++row) {
            for (int j = 0; j < shared; ++j) t.emplace_back(row, j, u(rng));
            for (int j = 0; j < per_block; ++j) t.emplace_back(row, shared + b * per_block + j, u(rng));
        }
    Shape s;
    s.Gr.resize(row, n);
    s.Gr.setFromTriplets(t.begin(), t.end());
    s.Gr.makeCompressed();
    s.Gc = s.Gr;
    s.w.assign(row, 1.5);
    s.d.assign(n, 0.25);
    return s;
}

void assemble(benchmark::State& state, Execution ex) {
    auto s = make_shape(54, static_cast<int>(state.range(0)), 200, 370);
    auto pat = kernels::normal_pattern(s.Gc, s.Gr);
    std::vector<double> vals(pat.row_idx.size());
    for (auto _ : state) {
        kernels::assemble_normal(pat, s.Gc, s.Gr, s.w, s.d, vals, ex);
        benchmark::DoNotOptimize(vals.data());
    }
    state.counters["threads"] = ex == Execution::parallel ? kernels::max_threads() : 1;
}

void BM_AssembleSerial(benchmark::State& s) { assemble(s, Execution::serial); }
void BM_AssembleParallel(benchmark::State& s) { assemble(s, Execution::parallel); }

void networks(benchmark::State& state, Execution ex) {
    auto mc = fixture_ieee118();
    for (auto _ : state) {
        auto nm = build_network(mc, ex);
        benchmark::DoNotOptimize(nm.scenarios.data());
    }
}

void BM_NetworksSerial(benchmark::State& s) { networks(s, Execution::serial); }
void BM_NetworksParallel(benchmark::State& s) { networks(s, Execution::parallel); }

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(4)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(4)->Arg(11)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworksSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NetworksParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
