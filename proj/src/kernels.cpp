#include "wentzell/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wentzell::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double block_dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <class Get>
double lse(std::size_t n, Get get) {
  double m = kNegInf;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, get(k));
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(get(k) - m);
  return m + std::log(s);
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * kReduceBlock;
    partial[b] = block_dot(x.data() + lo, y.data() + lo, std::min(kReduceBlock, n - lo));
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double dot_serial(std::span<const double> x, std::span<const double> y) {
  return block_dot(x.data(), y.data(), x.size());
}

void laplacian_apply(const LaplacianCsr& L, std::span<const double> x, std::span<double> y) {
  const auto& rp = L.row_ptr();
  const auto& ci = L.cols();
  const auto& v = L.values();
  const std::size_t n = L.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * (x[i] - x[ci[k]]);
    y[i] = s;
  }
}

void laplacian_apply_serial(const LaplacianCsr& L, std::span<const double> x, std::span<double> y) {
  const auto& rp = L.row_ptr();
  const auto& ci = L.cols();
  const auto& v = L.values();
  for (std::size_t i = 0; i < L.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * (x[i] - x[ci[k]]);
    y[i] = s;
  }
}

void shifted_apply(const LaplacianCsr& L, std::span<const double> d, double s,
                   std::span<const double> x, std::span<double> y) {
  const auto& rp = L.row_ptr();
  const auto& ci = L.cols();
  const auto& v = L.values();
  const std::size_t n = L.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) acc += v[k] * (x[i] - x[ci[k]]);
    y[i] = d[i] * x[i] + s * acc;
  }
}

void shifted_apply_serial(const LaplacianCsr& L, std::span<const double> d, double s,
                          std::span<const double> x, std::span<double> y) {
  const auto& rp = L.row_ptr();
  const auto& ci = L.cols();
  const auto& v = L.values();
  for (std::size_t i = 0; i < L.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) acc += v[k] * (x[i] - x[ci[k]]);
    y[i] = d[i] * x[i] + s * acc;
  }
}

void lse_rows(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
              std::span<const double> g, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    const double* c = C.data() + i * cols;
    out[i] = lse(cols, [&](std::size_t j) { return g[j] - c[j] / eps; });
  }
}

void lse_rows_serial(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
                     std::span<const double> g, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* c = C.data() + i * cols;
    out[i] = lse(cols, [&](std::size_t j) { return g[j] - c[j] / eps; });
  }
}

void lse_cols(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
              std::span<const double> f, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = lse(rows, [&](std::size_t i) { return f[i] - C[i * cols + j] / eps; });
  }
}

void lse_cols_serial(std::size_t rows, std::size_t cols, std::span<const double> C, double eps,
                     std::span<const double> f, std::span<double> out) {
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = lse(rows, [&](std::size_t i) { return f[i] - C[i * cols + j] / eps; });
  }
}

}  // namespace wentzell::kernels
