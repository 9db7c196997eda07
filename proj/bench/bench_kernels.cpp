// Serial reference vs OpenMP kernels, plus the dense LAPACK eigensolver the
// arrowhead solver replaces.

#include "raman/analytic_ww.hpp"
#include "raman/effective_dynamics.hpp"
#include "raman/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace raman;

HamiltonianMatrix default_hamiltonian(int n_modes)
{
    SystemParams p;
    const double gamma = 0.1;
    const double spacing = 40.0 * gamma / (n_modes - 1);
    p.coupling = CouplingProfile::flat(std::sqrt(gamma * spacing / (2.0 * M_PI * p.n_atoms)));
    return assemble_hamiltonian(p, build_mode_grid(p, 40.0 * gamma, n_modes));
}

void BM_arrowhead_serial(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::arrowhead_eigensystem(h.entries, 0, kernels::Exec::serial));
}

void BM_arrowhead_parallel(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kernels::arrowhead_eigensystem(h.entries, 0, kernels::Exec::parallel));
}

void BM_dense_dsyevd(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::dense_eigensystem(h.entries));
}

void BM_evolve_naive(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    const auto es = kernels::arrowhead_eigensystem(h.entries, 0);
    const Eigen::VectorXcd c = es.vectors.row(0).transpose().cast<std::complex<double>>();
    const auto times = linspace(0.0, 50.0, 201);
    Eigen::MatrixXcd out;
    for (auto _ : state) {
        kernels::evolve_samples_serial(es, c, times, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_evolve_blocked(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    const auto es = kernels::arrowhead_eigensystem(h.entries, 0);
    const Eigen::VectorXcd c = es.vectors.row(0).transpose().cast<std::complex<double>>();
    const auto times = linspace(0.0, 50.0, 201);
    Eigen::MatrixXcd out;
    for (auto _ : state) {
        kernels::evolve_samples(es, c, times, out, kernels::Exec::parallel);
        benchmark::DoNotOptimize(out.data());
    }
}

template <kernels::Exec E>
void BM_sparse_apply(benchmark::State& state)
{
    const auto h = default_hamiltonian(static_cast<int>(state.range(0)));
    const auto a = kernels::SparseRows::from_dense(h.entries, h.entries(0, 0));
    const auto n = static_cast<std::size_t>(h.dim());
    std::vector<std::complex<double>> x(n, {1.0, 0.5}), y(n);
    for (auto _ : state) {
        kernels::apply(a, x, y, E);
        benchmark::DoNotOptimize(y.data());
    }
}

} // namespace

BENCHMARK(BM_arrowhead_serial)->Arg(401)->Arg(1601)->Arg(3201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_arrowhead_parallel)->Arg(401)->Arg(1601)->Arg(3201)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dense_dsyevd)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evolve_naive)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evolve_blocked)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_sparse_apply, kernels::Exec::serial)->Arg(1601)->Arg(6401);
BENCHMARK_TEMPLATE(BM_sparse_apply, kernels::Exec::parallel)->Arg(1601)->Arg(6401);

BENCHMARK_MAIN();
