#pragma once

// Hot loops with an OpenMP version and a plain serial reference.
// Parallel reductions use fixed blocks, so results do not depend on the
// thread count.

#include <cstddef>
#include <span>

#include "wentzell/sparse.hpp"

namespace wentzell::kernels {

inline constexpr std::size_t kReduceBlock = 512;

double dot(std::span<const double> x, std::span<const double> y);
double dot_serial(std::span<const double> x, std::span<const double> y);

// y = L x
void laplacian_apply(const LaplacianCsr& L, std::span<const double> x, std::span<double> y);
void laplacian_apply_serial(const LaplacianCsr& L, std::span<const double> x, std::span<double> y);

// y = diag(d) x + s L x
void shifted_apply(const LaplacianCsr& L, std::span<const double> d, double s,
                   std::span<const double> x, std::span<double> y);
void shifted_apply_serial(const LaplacianCsr& L, std::span<const double> d, double s,
                          std::span<const double> x, std::span<double> y);

// C is rows x cols, row-major.
// out_i = log sum_j exp(g_j - C_ij / eps)
void lse_rows(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
              std::span<const double> g, std::span<double> out);
void lse_rows_serial(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
                     std::span<const double> g, std::span<double> out);
// out_j = log sum_i exp(f_i - C_ij / eps)
void lse_cols(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
              std::span<const double> f, std::span<double> out);
void lse_cols_serial(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
                     std::span<const double> f, std::span<double> out);

}  // namespace wentzell::kernels
