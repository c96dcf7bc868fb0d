#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "wentzell/kernels.hpp"
#include "wentzell/mesh.hpp"

using namespace wentzell;

TEST_CASE("dot: thread-count independent, close to serial and a long double oracle") {
  std::mt19937_64 rng(1);
  const int threads = omp_get_max_threads();
  for (std::size_t n : {1u, 7u, 511u, 512u, 513u, 5000u}) {
    const auto x = testing::random_vector(n, rng), y = testing::random_vector(n, rng);
    long double ref = 0;
    for (std::size_t k = 0; k < n; ++k) ref += static_cast<long double>(x[k]) * y[k];
    omp_set_num_threads(1);
    const double p1 = kernels::dot(x, y);
    omp_set_num_threads(4);
    const double p4 = kernels::dot(x, y);
    omp_set_num_threads(threads);
    const double s = kernels::dot_serial(x, y);
    CHECK(p1 == p4);
    if (n <= kernels::kReduceBlock) CHECK(p1 == s);
    CHECK(std::abs(p1 - s) <= 1e-13 * static_cast<double>(n));
    CHECK(std::abs(p1 - static_cast<double>(ref)) <= 1e-13 * static_cast<double>(n));
  }
}

TEST_CASE("laplacian_apply and shifted_apply agree with serial and dense") {
  const DiskMesh mesh(8, 24);
  const OperatorSet ops(mesh, 2.0);
  std::mt19937_64 rng(2);
  const auto x = testing::random_vector(mesh.size(), rng);
  const auto d = testing::random_vector(mesh.size(), rng, 0.5, 1.5);
  std::vector<double> y1(x.size()), y2(x.size()), z1(x.size()), z2(x.size());
  kernels::laplacian_apply(ops.stiffness(), x, y1);
  kernels::laplacian_apply_serial(ops.stiffness(), x, y2);
  kernels::shifted_apply(ops.stiffness(), d, 0.3, x, z1);
  kernels::shifted_apply_serial(ops.stiffness(), d, 0.3, x, z2);
  CHECK(y1 == y2);
  CHECK(z1 == z2);
  const Eigen::VectorXd ref = testing::dense(ops.stiffness()) * testing::vec(x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    CHECK(y1[k] == doctest::Approx(ref(static_cast<Eigen::Index>(k))).epsilon(1e-12).scale(1.0));
    CHECK(z1[k] == doctest::Approx(d[k] * x[k] + 0.3 * ref(static_cast<Eigen::Index>(k))).scale(1.0));
  }
}

TEST_CASE("log-sum-exp sweeps: parallel equals serial, stable for tiny eps") {
  std::mt19937_64 rng(3);
  const std::size_t r = 37, c = 53;
  const auto C = testing::random_vector(r * c, rng, 0.0, 4.0);
  const auto g = testing::random_vector(c, rng), f = testing::random_vector(r, rng);
  for (double eps : {1.0, 1e-2, 1e-5}) {
    std::vector<double> a(r), b(r), u(c), v(c);
    kernels::lse_rows(r, c, C, eps, g, a);
    kernels::lse_rows_serial(r, c, C, eps, g, b);
    kernels::lse_cols(r, c, C, eps, f, u);
    kernels::lse_cols_serial(r, c, C, eps, f, v);
    CHECK(a == b);
    CHECK(u == v);
    for (std::size_t i = 0; i < r; ++i) {
      CHECK(std::isfinite(a[i]));
      double m = -1e300;
      for (std::size_t j = 0; j < c; ++j) m = std::max(m, g[j] - C[i * c + j] / eps);
      long double s = 0;
      for (std::size_t j = 0; j < c; ++j) s += std::exp(static_cast<long double>(g[j] - C[i * c + j] / eps - m));
      CHECK(a[i] == doctest::Approx(m + std::log(static_cast<double>(s))).epsilon(1e-12));
    }
  }
}
