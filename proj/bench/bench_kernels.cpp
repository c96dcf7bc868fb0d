#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wentzell/kernels.hpp"
#include "wentzell/mesh.hpp"
#include "wentzell/metric.hpp"

using namespace wentzell;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

template <bool Serial>
void BM_Laplacian(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const DiskMesh mesh(n, 3 * n);
  const OperatorSet ops(mesh, 4.0);
  const auto x = noise(mesh.size(), 1);
  std::vector<double> y(mesh.size());
  for (auto _ : st) {
    if constexpr (Serial)
      kernels::laplacian_apply_serial(ops.stiffness(), x, y);
    else
      kernels::laplacian_apply(ops.stiffness(), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(static_cast<long>(st.iterations() * ops.stiffness().nnz()));
}

template <bool Serial>
void BM_LseRows(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto C = noise(n * n, 2), g = noise(n, 3);
  std::vector<double> out(n);
  for (auto _ : st) {
    if constexpr (Serial)
      kernels::lse_rows_serial(n, n, C, 1e-2, g, out);
    else
      kernels::lse_rows(n, n, C, 1e-2, g, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Serial>
void BM_CostMatrix(benchmark::State& st) {
  const DiskMesh mesh(3, 8);
  const auto pts = mesh_points(mesh);
  for (auto _ : st) {
    auto C = Serial ? cost_matrix_serial(4.0, pts, 96) : cost_matrix(4.0, pts, 96);
    benchmark::DoNotOptimize(C.C.data());
  }
}

}  // namespace

BENCHMARK(BM_Laplacian<false>)->Arg(16)->Arg(64);
BENCHMARK(BM_Laplacian<true>)->Arg(16)->Arg(64);
BENCHMARK(BM_LseRows<false>)->Arg(112)->Arg(512);
BENCHMARK(BM_LseRows<true>)->Arg(112)->Arg(512);
BENCHMARK(BM_CostMatrix<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostMatrix<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
