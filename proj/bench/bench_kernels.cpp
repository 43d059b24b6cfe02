#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include "hyplqr/kernels.hpp"

namespace {

using namespace hyplqr::kernels;

struct TransportData {
    int n = 2;
    std::vector<double> speeds, state, out;
    explicit TransportData(int N) : speeds(std::size_t(n) * N), state(std::size_t(n) * (N + 1)), out(speeds.size()) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& v : speeds) v = d(rng);
        for (auto& v : state) v = d(rng);
    }
    TransportView view() const { return {speeds, state, n, 100.0}; }
};

template <void (*Kernel)(const TransportView&, std::span<double>)>
void bm_transport(benchmark::State& st) {
    TransportData data(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        Kernel(data.view(), data.out);
        benchmark::DoNotOptimize(data.out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct ResidualData {
    int n = 2, N;
    Eigen::MatrixXd P, D, Q, quad, out;
    std::vector<Eigen::MatrixXd> E;
    explicit ResidualData(int N_) : N(N_) {
        const int ns = n * N;
        P = Eigen::MatrixXd::Random(ns, ns);
        P = (P + P.transpose()).eval();
        D = Eigen::MatrixXd::Random(n, N + 1);
        Q = Eigen::MatrixXd::Identity(ns, ns);
        quad = Eigen::MatrixXd::Random(ns, ns);
        E.assign(std::size_t(N) + 1, Eigen::MatrixXd::Random(n, n));
    }
    ResidualView view() const { return {&P, &D, &E, &Q, &quad, n, 1.0 / N, 2, N - 2}; }
};

template <void (*Kernel)(const ResidualView&, Eigen::MatrixXd&)>
void bm_residual(benchmark::State& st) {
    ResidualData data(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        Kernel(data.view(), data.out);
        benchmark::DoNotOptimize(data.out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

}  // namespace

BENCHMARK(bm_transport<serial::upwind_transport>)->Name("transport/serial")->RangeMultiplier(8)->Range(64, 1 << 18);
BENCHMARK(bm_transport<parallel::upwind_transport>)->Name("transport/parallel")->RangeMultiplier(8)->Range(64, 1 << 18);
BENCHMARK(bm_residual<serial::riccati_residual>)->Name("residual/serial")->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(bm_residual<parallel::riccati_residual>)->Name("residual/parallel")->Arg(50)->Arg(100)->Arg(200);

BENCHMARK_MAIN();
